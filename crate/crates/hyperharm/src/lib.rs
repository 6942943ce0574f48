//! Numerical harmonic analysis on the hyperbolic plane and its cyclic
//! quotients: the PSL(2,R) structure layer, boundary-circle calculus with
//! the Poisson transform, weighted Radon and intertwining transforms, the
//! phase-space pairings they induce, and the hyperbolic-cylinder quotient
//! bookkeeping.

pub mod boundary;
pub mod constants;
pub mod cylinder;
pub mod error;
pub mod lie;
pub mod pairings;
pub mod quad;
pub mod transforms;

pub use error::{Error, Result};
