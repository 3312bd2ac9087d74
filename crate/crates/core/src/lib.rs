//! Closed-form solutions of the SIS and SIR (with demography) epidemic
//! models, a fixed-step Runge-Kutta reference solver to check them against,
//! and tools to measure where the linearized SIR solution stops being
//! trustworthy.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod integrator;
pub mod model;
pub mod trajectory;

pub use error::{Error, ErrorClass, Result};
pub use model::{ModelKind, Parameters, SirParameters, SisParameters, State};
pub use trajectory::{Provenance, TimeGrid, Trajectory};
