//! Benchmark registry, runners and report tables.

pub mod examples;
pub mod report;
pub mod run;

pub use examples::{ExampleId, Method, Metric, Reference, Source};
pub use report::{emit, parse, parse_grid, Format};
pub use run::{run_example, run_sweep, self_check, RunConfig, RunReport, SweepConfig, DEFAULT_EPS};
