//! Instance generators, experiment suites, defect injection and charts.

pub mod gantt;
pub mod gen;
pub mod mutate;
pub mod suite;

pub use gantt::render_gantt;
pub use gen::{generate, Class, GenError, GenSpec};
pub use mutate::mutate;
pub use suite::{all_pass, run_suite, ExperimentRow, Suite};
