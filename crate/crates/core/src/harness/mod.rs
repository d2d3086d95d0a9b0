//! Problem setup, boundary fills, error norms and the studies driven from
//! the command line.

pub mod boundary;
pub mod config;
pub mod norms;
pub mod problems;
pub mod run;
pub mod study;

pub use boundary::apply_boundary;
pub use config::{Problem, RunConfig, StopAt};
pub use norms::{error_norms, order_estimate, ErrorReport};
pub use run::{run_config, with_workers, RunSummary, Simulation};
pub use study::{run_benchmark, run_convergence_study, run_reproducibility_check};
