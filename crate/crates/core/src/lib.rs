//! Band gaps of the Whittaker-Hill operator
//! `L y = -y'' + (b q^m1 cos 2x + c q^m2 cos 4x) y`
//! computed three independent ways: bisection on symmetry-sector Galerkin
//! matrices at arbitrary precision, an exact rational walk expansion, and
//! closed-form leading asymptotics.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod gapstruct;
pub mod potential;
pub mod spectral;
pub mod walks;

pub use error::{Error, Result};
