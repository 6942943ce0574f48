//! Batch harness around the hyperbolic-plane pairing library: experiment
//! configuration, the asymptotic sweep with its remainder fit, invariant
//! self-tests, and machine-readable reports.

pub mod config;
pub mod report;
pub mod selftest;
pub mod sweep;
