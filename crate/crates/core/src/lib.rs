//! Makespan minimization on `m` identical `k`-stage open shops.
//!
//! The main entry point is [`eptas::solve`], an approximation scheme built
//! from four stages: [`reduce`] the instance, enumerate grid placements of the
//! big jobs ([`bigjobs`]), assign small jobs to the remaining gaps through an
//! exact LP ([`lp`], [`assign`]), then fill the gaps greedily ([`dense`]) and
//! append whatever did not fit. [`oracle`] solves tiny instances exactly and
//! [`bounds`] holds the list-scheduling baseline.

pub mod assign;
pub mod bench;
pub mod bigjobs;
pub mod bounds;
pub mod dense;
pub mod eptas;
pub mod error;
pub mod format;
pub mod generate;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod reduce;
pub mod validate;

pub use error::{Error, ParseError, Result};
pub use model::{Instance, Job, Schedule, ScheduledOp};
pub use rational::Rat;
