//! Verification suites. Each suite appends checks to a [`Recorder`]; an
//! evaluation error becomes a failed check rather than aborting the run.

mod algebra;
mod euler;
mod euler_poisson;
mod reduced;
mod torsion;

use haantjes::{SampleSpec, Tolerances};
use haantjes_lagrange::TopParams;

use crate::report::{Check, Measured, ReportParams, Status, VerificationReport};

/// Fixed tolerance for the closed-form operator identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Fixed tolerance for involutivity, applied to scale-adjusted brackets.
pub const INVOLUTION_TOL: f64 = 1e-10;
/// Fixed tolerance for the separation-chart round trip.
pub const ROUND_TRIP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Torsion,
    Algebra,
    Euler,
    EulerPoisson,
    Reduced,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Torsion => "torsion",
            Suite::Algebra => "algebra",
            Suite::Euler => "euler",
            Suite::EulerPoisson => "euler-poisson",
            Suite::Reduced => "reduced",
            Suite::All => "all",
        }
    }

    fn parts(&self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Torsion, Suite::Algebra, Suite::Euler, Suite::EulerPoisson, Suite::Reduced],
            s => vec![*s],
        }
    }
}

/// Settings shared by every check of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Context {
    pub seed: u64,
    pub points: usize,
    pub tol: Tolerances,
    pub params: TopParams,
}

impl Context {
    pub fn new(seed: u64, points: usize, tol: Tolerances, params: TopParams) -> Self {
        Context { seed, points, tol, params }
    }

    pub fn spec(&self) -> SampleSpec {
        SampleSpec::new(self.points, self.seed)
    }
}

/// Whether a failing residual is a defect or an open reading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Identity,
    Flagged,
}

pub type Outcome = anyhow::Result<Measured>;

/// Collects checks in a fixed order.
#[derive(Debug, Default)]
pub struct Recorder {
    pub checks: Vec<Check>,
}

impl Recorder {
    pub fn record(&mut self, id: &str, description: &str, identity: &str, tolerance: f64, kind: Kind, outcome: Outcome) {
        let check = match outcome {
            Ok(m) => {
                let status = if m.residual <= tolerance {
                    Status::Pass
                } else if kind == Kind::Flagged {
                    Status::Finding
                } else {
                    Status::Fail
                };
                Check {
                    id: id.into(),
                    description: description.into(),
                    identity: identity.into(),
                    status,
                    max_residual: Some(m.residual),
                    tolerance,
                    points_sampled: m.points,
                    scale_aware: m.scale_aware,
                    note: m.note,
                }
            }
            Err(e) => Check {
                id: id.into(),
                description: description.into(),
                identity: identity.into(),
                status: Status::Fail,
                max_residual: None,
                tolerance,
                points_sampled: 0,
                scale_aware: false,
                note: Some(format!("evaluation failed: {e:#}")),
            },
        };
        self.checks.push(check);
    }

    /// An identity check.
    pub fn identity(&mut self, id: &str, description: &str, identity: &str, tolerance: f64, outcome: Outcome) {
        self.record(id, description, identity, tolerance, Kind::Identity, outcome)
    }

    /// A check whose failure is reported as a finding.
    pub fn flagged(&mut self, id: &str, description: &str, identity: &str, tolerance: f64, outcome: Outcome) {
        self.record(id, description, identity, tolerance, Kind::Flagged, outcome)
    }
}

/// Runs `suite` and assembles the report.
pub fn run(suite: Suite, ctx: &Context) -> VerificationReport {
    let mut rec = Recorder::default();
    for part in suite.parts() {
        match part {
            Suite::Torsion => torsion::run(ctx, &mut rec),
            Suite::Algebra => algebra::run(ctx, &mut rec),
            Suite::Euler => euler::run(ctx, &mut rec),
            Suite::EulerPoisson => euler_poisson::run(ctx, &mut rec),
            Suite::Reduced => reduced::run(ctx, &mut rec),
            Suite::All => unreachable!("expanded by parts"),
        }
    }
    VerificationReport {
        suite: suite.name().to_string(),
        seed: ctx.seed,
        params: ReportParams {
            c: ctx.params.c,
            a: ctx.params.a,
            tol_exact: ctx.tol.exact,
            tol_deriv: ctx.tol.deriv,
            points: ctx.points,
        },
        checks: rec.checks,
    }
}
