//! Random simplices in ellipsoids: exact closed-form constants on one side,
//! seeded Monte Carlo estimators and distributional samplers on the other,
//! and the statistical machinery that checks each identity between them to
//! a quantified tolerance.

pub mod error;
pub mod exact;
pub mod geometry;
pub mod montecarlo;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use exact::{Dims, IdentityId};
pub use geometry::{AffineSubspace, Ellipsoid, LinearSubspace, PointConfig};
pub use montecarlo::{
    verify_identity, EstimateReport, Family, IdentityParams, IdentityReport, Measurement,
    RunningMoments, VerifyPolicy, DEFAULT_KS_SAMPLES, DEFAULT_MOMENT_SAMPLES, IDENTITY_CATALOG,
};
pub use sampling::{BetaSpec, RandomStream, WeightedAffineSample};
pub use stats::{ks_two_sample, z_compare, KsResult};
