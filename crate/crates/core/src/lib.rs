pub mod basis;
pub mod bounds;
pub mod error;
pub mod exact;
pub mod matrix;
pub mod oracle;
pub mod traces;

pub use basis::{optimal_scaling, ScalingResult};
pub use bounds::{error_bound, BoundReport, SeriesKind};
pub use error::{Error, Result};
pub use matrix::{
    compute_constants, product, spectral_pair, validate_ensemble, Ensemble, EnsembleConstants,
    PositiveMatrix2, SpectralPair, DEFAULT_PRECISION,
};
pub use oracle::{exact_single_matrix, monte_carlo_lyapunov, McEstimate};
pub use traces::{
    composition_sum_oracle, compute_traces, compute_traces_with, det_coefficients,
    lyapunov_estimate, lyapunov_estimates, DetCoefficients, Enumeration, TraceData, TraceOptions,
};
