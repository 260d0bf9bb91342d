//! Preemptive machine minimization with hard deadlines.
//!
//! Exact offline optima with density witnesses, the online policies for
//! loose, agreeable, laminar and general instances, a discrete-time engine
//! that validates every decision, and an experiment harness.

pub mod agreeable;
pub mod algo;
pub mod config;
pub mod edf;
pub mod engine;
pub mod general;
pub mod harness;
pub mod laminar;
pub mod model;
pub mod offline;

pub use algo::{build_policy, Algo, Base};
pub use config::AlgoConfig;
pub use model::{Instance, Job, JobId, Rational, Schedule, Time};
