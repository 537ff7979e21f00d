//! Exact enumeration of lattice trees, animals and self-avoiding walks near
//! an adsorbing surface, the injective maps between their ensembles, and
//! Monte Carlo estimators for sizes beyond exact reach.

pub mod adsorption;
pub mod constructions;
pub mod enumeration;
pub mod error;
pub mod io;
pub mod lattice;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type PartitionQueryF64 = adsorption::PartitionQuery<f64>;
pub type PartitionQueryF32 = adsorption::PartitionQuery<f32>;
pub type PartitionValueF64 = adsorption::PartitionValue<f64>;
pub type PartitionValueF32 = adsorption::PartitionValue<f32>;
pub type GrowthEstimateF64 = adsorption::GrowthEstimate<f64>;
pub type GrowthEstimateF32 = adsorption::GrowthEstimate<f32>;
