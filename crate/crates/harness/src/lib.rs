//! Command-line plumbing around `qaccel-core`: the run pipeline, the
//! JSON-lines run store and the timing suites.

pub mod bench;
pub mod record;
pub mod run;
pub mod store;

pub use bench::{bench_depth_scaling, bench_gates, bench_qubit_scaling, BenchResult, SkipMode};
pub use record::{FinalState, RunConfig, RunRecord};
pub use run::{cli_run, run_program, RunError};
pub use store::{Filter, Store, StoreError};
