//! Ground-state cooling of a mechanical mode through a cavity-dressed magnon.
//!
//! The crate covers the whole chain from laboratory parameters to phonon
//! occupation: steady-state amplitudes ([`params`]), elimination of the
//! cavity ([`adiabatic`]), the weak-coupling noise-spectrum theory
//! ([`spectrum`]), exact Gaussian second moments ([`covariance`]), truncated
//! Fock-space dynamics ([`fockdyn`]) and regime checks ([`validate`]).

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabatic;
pub mod cli;
pub mod covariance;
pub mod error;
pub mod fockdyn;
pub mod model;
pub mod params;
pub mod presets;
pub mod spectrum;
pub mod validate;

pub use error::{Error, Result};
