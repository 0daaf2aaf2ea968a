//! Numerical calculus for hyperbolic polynomials: eigenvalues, norms, and
//! hyperbolicity cones, plus seeded experiments that measure concentration,
//! anti-concentration, and discrepancy of Rademacher sums in these geometries.
//!
//! Everything randomized takes an explicit seed and derives one independent
//! counter-based stream per trial, so results are reproducible bit-for-bit
//! across runs and across thread counts.

/// Crate version, exposed so reports can record the library they came from.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod anticoncentration;
pub mod concentration;
pub mod discrepancy;
pub mod error;
pub mod forms;
pub mod mixed;
pub mod poly;
pub mod spectra;
pub mod stats;

pub(crate) mod parallel;
pub(crate) mod restriction;
pub mod rng;

pub use anticoncentration::{BoundaryReport, BucketHash, ConePair, IntervalReport};
pub use concentration::{
    ConeChernoffOutcome, ConeGenerator, ConeSampleSpec, ConeSampler, ExactDistribution,
    VectorSystem,
};
pub use discrepancy::{
    Partition, PartitionBudget, PartitionOutcome, RandomSignSearch, SignAssignment,
};
pub use error::{Error, Result};
pub use forms::{FamilyKind, HyperbolicForm, HyperbolicityReport, PointVec, Term};
pub use mixed::{DeltaBound, DeltaQuery, Extent, MixedRestriction};
pub use spectra::{ConePosition, RankReport, Spectrum, UnivariateRestriction};
pub use stats::{EstimateMode, TailEstimate};
