//! Partition functions and finite-size free energies for polymers interacting
//! with the surface `x_1 = 0`.
//!
//! Every partition function here is an integer polynomial in `e^beta` whose
//! coefficients are exact contact histograms. The polynomial is the primary
//! object; evaluation at a given `beta` is a log-sum-exp over its terms in
//! whatever [`Scalar`] the caller picks.

mod bounds;

pub use bounds::{
    theorem1_bound_report, theorem3_bound_report, tree_counts, ChainRow, MarkedBoundRow,
    SawSumRow, Theorem1Report, Theorem1Row, Theorem3Report, Theorem3Row, WalkMarkRow,
    CHAIN_TOLERANCE, CORRECTED_RELATION, EPSILON_GRID, LITERAL_RELATION,
};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::enumeration::{self, Constraint, EnsembleSpec, Model, SurfaceProfile};
use crate::error::{Error, Result};
use crate::lattice::AnimalConvention;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    /// Configurations confined to `x_1 >= 0`.
    Impenetrable,
    /// Unrestricted configurations containing the origin.
    Penetrable,
}

impl Surface {
    pub fn name(&self) -> &'static str {
        match self {
            Surface::Impenetrable => "impenetrable",
            Surface::Penetrable => "penetrable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    SiteContacts,
    /// Surface edges of a walk; only for walks at an impenetrable surface.
    EdgeContacts,
}

impl Weighting {
    pub fn name(&self) -> &'static str {
        match self {
            Weighting::SiteContacts => "site-contacts",
            Weighting::EdgeContacts => "edge-contacts",
        }
    }
}

/// How a number in a report was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rigor {
    Exact,
    RigorousBound,
    Estimate,
}

impl Rigor {
    pub fn label(&self) -> &'static str {
        match self {
            Rigor::Exact => "exact",
            Rigor::RigorousBound => "rigorous-bound",
            Rigor::Estimate => "estimate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionQuery<S> {
    pub model: Model,
    pub convention: AnimalConvention,
    pub surface: Surface,
    pub weighting: Weighting,
    pub dim: usize,
    pub n: usize,
    pub beta: S,
}

impl<S: Scalar> PartitionQuery<S> {
    pub fn new(model: Model, surface: Surface, dim: usize, n: usize, beta: S) -> Self {
        PartitionQuery {
            model,
            convention: AnimalConvention::Site,
            surface,
            weighting: Weighting::SiteContacts,
            dim,
            n,
            beta,
        }
    }

    pub fn edge_weighted(dim: usize, n: usize, beta: S) -> Self {
        PartitionQuery {
            weighting: Weighting::EdgeContacts,
            ..Self::new(Model::Walk, Surface::Impenetrable, dim, n, beta)
        }
    }

    pub fn with_beta(&self, beta: S) -> Self {
        PartitionQuery { beta, ..*self }
    }

    pub fn with_convention(&self, convention: AnimalConvention) -> Self {
        PartitionQuery { convention, ..*self }
    }

    /// The ensemble whose contact histogram defines this partition function.
    pub fn ensemble(&self) -> Result<EnsembleSpec> {
        if self.weighting == Weighting::EdgeContacts
            && (self.model != Model::Walk || self.surface != Surface::Impenetrable)
        {
            return Err(Error::ProfileUnavailable(
                "edge contacts are defined only for walks at an impenetrable surface".into(),
            ));
        }
        let constraint = match self.surface {
            Surface::Impenetrable => Constraint::HalfSpace,
            Surface::Penetrable => Constraint::ContainsOrigin,
        };
        let spec = match self.model {
            Model::Tree => EnsembleSpec::trees(self.dim, self.n, constraint),
            Model::Animal => EnsembleSpec::animals(self.dim, self.n, constraint, self.convention),
            Model::Walk => EnsembleSpec::walks(self.dim, self.n, constraint),
        };
        spec.validate()
            .map_err(|e| Error::ProfileUnavailable(e.to_string()))?;
        Ok(spec)
    }
}

/// `Z(beta) = sum_k c_k e^{beta k}` with exact integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPolynomial {
    pub coefficients: Vec<BigUint>,
}

impl PartitionPolynomial {
    pub fn from_profile(p: &SurfaceProfile) -> Self {
        let mut coefficients = p.counts.clone();
        while coefficients.len() > 1 && coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        PartitionPolynomial { coefficients }
    }

    pub fn for_query<S: Scalar>(q: &PartitionQuery<S>) -> Result<Self> {
        let spec = q.ensemble()?;
        let profile = match q.weighting {
            Weighting::SiteContacts => enumeration::surface_profile(&spec)?,
            Weighting::EdgeContacts => enumeration::edge_profile(&spec)?,
        };
        Ok(Self::from_profile(&profile))
    }

    /// `Z(0)`, the ensemble size.
    pub fn cardinality(&self) -> BigUint {
        self.coefficients.iter().sum()
    }

    fn shift<S: Scalar>(&self, beta: S) -> S {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| S::ln_big(c) + beta * S::lit(k as f64))
            .fold(S::neg_infinity(), S::max)
    }

    /// `log Z(beta)`, stabilized against overflow at large `beta * k`.
    pub fn ln_eval<S: Scalar>(&self, beta: S) -> S {
        let m = self.shift(beta);
        if m == S::neg_infinity() {
            return m;
        }
        let sum = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (S::ln_big(c) + beta * S::lit(k as f64) - m).exp())
            .fold(S::zero(), |a, b| a + b);
        m + sum.ln()
    }

    pub fn eval<S: Scalar>(&self, beta: S) -> S {
        self.ln_eval(beta).exp()
    }

    /// `d/dbeta log Z`, the mean contact number under the Boltzmann weights.
    pub fn mean_contacts<S: Scalar>(&self, beta: S) -> S {
        let m = self.shift(beta);
        let (mut num, mut den) = (S::zero(), S::zero());
        for (k, c) in self.coefficients.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let w = (S::ln_big(c) + beta * S::lit(k as f64) - m).exp();
            num = num + w * S::lit(k as f64);
            den = den + w;
        }
        num / den
    }

    /// Exact value at `e^beta = x` for integer `x`.
    pub fn eval_at_integer(&self, x: u64) -> BigUint {
        let mut acc = BigUint::zero();
        let mut pow = BigUint::one();
        for c in &self.coefficients {
            acc += c * &pow;
            pow *= x;
        }
        acc
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionValue<S> {
    pub query: PartitionQuery<S>,
    pub polynomial: PartitionPolynomial,
    pub z: S,
    pub ln_z: S,
    /// `(1/N) log Z_N(beta)`.
    pub free_energy: S,
}

pub fn partition_function<S: Scalar>(q: &PartitionQuery<S>) -> Result<PartitionValue<S>> {
    let polynomial = PartitionPolynomial::for_query(q)?;
    let ln_z = polynomial.ln_eval(q.beta);
    Ok(PartitionValue {
        query: *q,
        z: ln_z.exp(),
        free_energy: ln_z / S::lit(q.n as f64),
        ln_z,
        polynomial,
    })
}

pub fn finite_free_energy<S: Scalar>(q: &PartitionQuery<S>) -> Result<S> {
    Ok(partition_function(q)?.free_energy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundDirection {
    /// `count^{1/N}` bounds the growth constant from below (supermultiplicative counts).
    Lower,
    /// `count^{1/N}` bounds the growth constant from above (submultiplicative counts).
    Upper,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthEstimate<S> {
    pub model: Model,
    pub convention: AnimalConvention,
    pub dim: usize,
    pub counts: Vec<BigUint>,
    /// `count_N^{1/N}` for `N = 1..=max_n`.
    pub point_estimates: Vec<S>,
    /// Best rigorous one-sided bound among the point estimates.
    pub bound: S,
    pub direction: BoundDirection,
    /// Ratio `count_N / count_{N-1}` at the largest `N`; an estimate only.
    pub ratio_estimate: Option<S>,
}

impl<S: Scalar> GrowthEstimate<S> {
    pub fn lower(&self) -> Option<S> {
        (self.direction == BoundDirection::Lower).then_some(self.bound)
    }
    pub fn upper(&self) -> Option<S> {
        (self.direction == BoundDirection::Upper).then_some(self.bound)
    }
}

/// Exact counts up to `max_n` turned into a one-sided bracket on the growth
/// constant (per-site counts for trees/animals, walk counts for walks).
pub fn growth_bracket<S: Scalar>(
    model: Model,
    convention: AnimalConvention,
    dim: usize,
    max_n: usize,
) -> Result<GrowthEstimate<S>> {
    if max_n == 0 {
        return Err(Error::Precondition("growth bracket needs max_n >= 1".into()));
    }
    let counts: Vec<BigUint> = (1..=max_n)
        .map(|n| {
            let spec = match model {
                Model::Tree => EnsembleSpec::trees(dim, n, Constraint::TranslationClasses),
                Model::Animal => {
                    EnsembleSpec::animals(dim, n, Constraint::TranslationClasses, convention)
                }
                Model::Walk => EnsembleSpec::walks(dim, n, Constraint::ContainsOrigin),
            };
            enumeration::count(&spec)
        })
        .collect::<Result<_>>()?;
    let point_estimates: Vec<S> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| (S::ln_big(c) / S::lit((i + 1) as f64)).exp())
        .collect();
    let direction = if model == Model::Walk {
        BoundDirection::Upper
    } else {
        BoundDirection::Lower
    };
    let bound = match direction {
        BoundDirection::Lower => point_estimates.iter().copied().fold(S::neg_infinity(), S::max),
        BoundDirection::Upper => point_estimates.iter().copied().fold(S::infinity(), S::min),
    };
    let ratio_estimate = (max_n >= 2)
        .then(|| (S::ln_big(&counts[max_n - 1]) - S::ln_big(&counts[max_n - 2])).exp());
    Ok(GrowthEstimate {
        model,
        convention,
        dim,
        counts,
        point_estimates,
        bound,
        direction,
        ratio_estimate,
    })
}
