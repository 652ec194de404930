//! Random-walk simulation, boundary points, and statistical checks.

pub mod sampler;
pub mod stats;
pub mod testfn;
pub mod trajectory;

pub use sampler::{stream_rng, Sampler, Stream};
pub use stats::{
    entropy_sample, estimate_drift, estimate_entropy, stationarity_test, uniform_control_samples, valuation_slope,
    DriftEstimate, EntropyEstimate, FunctionResult, MeanStderr, StationarityConfig, StationarityReport,
};
pub use testfn::{FamilyRegistry, TestFamily, TestFunction, DEFAULT_FAMILY};
pub use trajectory::{
    boundary_point, guard, ols_slope, sample_boundary, sample_boundary_set, valuation_path, BoundarySample,
    BoundarySampleSet, Trajectory,
};
