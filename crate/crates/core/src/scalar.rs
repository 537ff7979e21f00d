//! Floating point abstraction used by partition-function evaluation and the
//! bound pipelines. Exact quantities stay in `BigUint`/`BigRational`; only the
//! final evaluation in `e^beta` is generic.

use std::fmt::{Debug, Display};

use num_bigint::BigUint;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// Natural logarithm of an exact nonnegative integer, without overflow.
    /// Returns `-inf` for zero.
    fn ln_big(x: &BigUint) -> Self {
        let bits = x.bits();
        if bits == 0 {
            return Self::neg_infinity();
        }
        if bits <= 1000 {
            if let Some(v) = x.to_f64() {
                return Self::lit(v.ln());
            }
        }
        let shift = bits - 60;
        let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
        Self::lit(top.ln() + shift as f64 * std::f64::consts::LN_2)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
