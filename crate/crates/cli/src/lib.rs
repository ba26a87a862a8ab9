//! Job files, the compute pipeline and report rendering for the `lyapunov`
//! command.

pub mod config;
pub mod decimal;
pub mod job;
pub mod render;

pub use config::{Entry, JobConfig, OutputFormat, VerifyConfig};
pub use job::{run_constants, run_job, run_verify, ApproximationReport, JobError, ReportRow};
