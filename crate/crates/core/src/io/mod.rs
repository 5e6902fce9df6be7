//! Configuration documents, run orchestration and result files.

pub mod config;
pub mod export;
pub mod plot;
pub mod run;

pub use config::{parse_config, parse_config_with, GeneratorSpec, MeshSpec, RunConfig};
pub use export::{RunSummary, CURVE_HEADER};
pub use run::{benchmark_config, run_config, RunOptions, RunOutcome, BENCHMARKS};
