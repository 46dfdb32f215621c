//! Verification suites and flow integration behind the `haantjes` command.
//!
//! [`suites::run`] evaluates a suite into a [`VerificationReport`];
//! [`cli`] maps command-line arguments onto it and onto the integrator.

pub mod cli;
pub mod report;
pub mod suites;

pub use report::{Check, Measured, ReportParams, Status, VerificationReport};
pub use suites::{run, Context, Suite};
