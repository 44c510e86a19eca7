//! Numerical workbench for convolution operators on the unit circle.
//!
//! The crate discretizes the circle ([`grid`]), samples the Fejér and
//! Poisson kernels ([`kernels`]), evaluates Lebesgue, Lorentz and Orlicz
//! norms ([`spaces`]), builds convolution operators, analytic restrictions
//! and the backward shift ([`operators`]), estimates their operator norms
//! ([`opnorm`]), computes the constants that bracket those norms
//! ([`constants`]), and constructs outer functions for weighted spaces
//! ([`outer`]).

pub mod constants;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod operators;
pub mod opnorm;
pub mod optimize;
pub mod outer;
pub mod spaces;

pub use error::{Error, Result};
