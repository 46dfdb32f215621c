//! The one-form chain `K_iᵀ dH` on the Euler chart.

use haantjes::{Residual, Sample};
use haantjes_lagrange::{euler_chain_operators, EulerChain, EulerChart, EULER_COORDS};

use super::{Context, Recorder};
use crate::report::Measured;

struct Setup {
    ec: EulerChart,
    ops: EulerChain,
    sample: Sample<f64>,
}

fn setup(ctx: &Context) -> anyhow::Result<Setup> {
    let ec = EulerChart::new(&ctx.params)?;
    let ops = euler_chain_operators(&ctx.params)?;
    let sample = ctx.spec().draw(&ec.chart, &ec.singular())?;
    Ok(Setup { ec, ops, sample })
}

fn format_covector(v: &[f64]) -> String {
    let parts: Vec<String> =
        v.iter().zip(EULER_COORDS).filter(|(c, _)| **c != 0.0).map(|(c, name)| format!("{c:.6e} d{name}")).collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Both sides of `K3ᵀ dH = dp_ψ` at the worst point, as a reading.
fn k3_reading(s: &Setup, r: &Residual) -> anyhow::Result<String> {
    let p = &s.sample.points()[r.worst];
    let (lhs, rhs) = s.ops.k3_sides(&s.ec, p)?;
    Ok(format!(
        "K3^T dH = {} but dp_psi = {}; the dp_psi component of K3^T dH is {:.1e}",
        format_covector(&lhs),
        format_covector(&rhs),
        lhs[5]
    ))
}

pub fn run(ctx: &Context, rec: &mut Recorder) {
    let d = ctx.tol.deriv;
    let s = match setup(ctx) {
        Ok(s) => s,
        Err(e) => return rec.identity("euler.setup", "Euler chart and chain operators", "", d, Err(e)),
    };
    let chain = s.ops.chain(&s.ec, &s.sample, d);
    let potentials = s.ops.potential_residuals(&s.ec, &s.sample, d);
    match (chain, potentials) {
        (Ok(chain), Ok(pot)) => {
            for (i, c) in chain.checks.iter().enumerate() {
                let id = format!("euler.closed.k{}", i + 1);
                let description = format!("Closedness of K{}^T dH", i + 1);
                let m = Measured::absolute(c.residual);
                if i == 2 {
                    let m = m.with_note("K3^T dH is not closed, so no potential exists for this K3");
                    rec.flagged(&id, &description, &c.label, d, Ok(m));
                } else {
                    rec.identity(&id, &description, &c.label, d, Ok(m));
                }
            }
            rec.identity("euler.chain.k1", "K1^T dH against dH", "K1^T dH = dH", d, Ok(Measured::absolute(pot[0])));
            rec.identity(
                "euler.chain.k2",
                "K2^T dH against dp_phi",
                "K2^T dH = dp_phi",
                d,
                Ok(Measured::absolute(pot[1])),
            );
            let k3 = k3_reading(&s, &pot[2]).map(|note| Measured::absolute(pot[2]).with_note(note));
            rec.flagged("euler.chain.k3", "K3^T dH against dp_psi, both sides evaluated", "K3^T dH = dp_psi", d, k3);
        }
        (Err(e), _) | (_, Err(e)) => rec.identity("euler.chain", "One-form chain K_i^T dH", "", d, Err(e.into())),
    }
}
