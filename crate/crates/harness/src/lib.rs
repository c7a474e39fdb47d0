//! Configuration, experiment dispatch, acceptance criteria and reporting on
//! top of `fragbec-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod criteria;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{Experiment, RunConfig};
pub use error::{HarnessError, Result};
pub use experiments::{run_and_report, run_experiment};
pub use report::{emit_report, Section, Summary};
