//! Domain types: jobs, interval unions, instances, schedules and the
//! schedule verifier.

mod instance;
mod interval;
mod job;
mod schedule;
pub mod text;
mod verify;

pub use instance::{structure_of, Instance, Structure};
pub use interval::IntervalUnion;
pub use job::{beta_agreeable, contribution_set, Job, JobId, RatInterval, Rational, Tightness};
pub(crate) use job::check_open_unit;
pub use schedule::Schedule;
pub use verify::{verify_schedule, Subject, VerifyReport, Violation, ViolationKind};

/// Integral time, in slots.
pub type Time = i64;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid job {0}: need r >= 0, p >= 1 and d >= r + p")]
    InvalidJob(Job),
    #[error("duplicate job id {0}")]
    DuplicateId(JobId),
    #[error("{name} = {value} outside {range}")]
    ParamOutOfRange { name: &'static str, value: String, range: &'static str },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
