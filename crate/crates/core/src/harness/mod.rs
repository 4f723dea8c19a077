//! Instance generation, validation, benchmarking and plotting.

pub mod batch;
pub mod bench;
pub mod gen;
pub mod plot;
pub mod verify;

pub use batch::{run_batch, solve_batch};
pub use bench::{run_bench, BenchCase, BenchConfig, BenchReport, BenchRow, OptRow, RunMode, RunRecord};
pub use gen::{gen_instances, GenError};
pub use plot::emit_plot;
pub use verify::{verify_paths, verify_solution, Violation};
