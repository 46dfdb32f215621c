//! The three Poisson structures, the tri-Hamiltonian flow and the
//! two-Casimir chain on the real chart `(ω, γ)`.

use haantjes::{MagriChain, PoissonStructure, Sample, ScalarField, SingularSet};
use haantjes_lagrange::{gz_chain_check, EulerPoissonFields};

use super::{Context, Recorder, INVOLUTION_TOL};
use crate::report::Measured;

fn setup(ctx: &Context) -> anyhow::Result<(EulerPoissonFields, Sample<f64>)> {
    let f = EulerPoissonFields::new(&ctx.params)?;
    let s = ctx.spec().draw(&f.chart, &SingularSet::new())?;
    Ok((f, s))
}

/// Slug of a chain label, e.g. `P0 d(-F3) = P1 dF2` → `p0-d-f3-p1-df2`.
fn slug(label: &str) -> String {
    let mut out = String::new();
    for ch in label.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    out.trim_end_matches('-').to_string()
}

pub fn run(ctx: &Context, rec: &mut Recorder) {
    let (e, d) = (ctx.tol.exact, ctx.tol.deriv);
    let (f, s) = match setup(ctx) {
        Ok(v) => v,
        Err(err) => return rec.identity("euler-poisson.setup", "Euler-Poisson fields", "", d, Err(err)),
    };
    for (k, p) in f.bivectors().into_iter().enumerate() {
        match PoissonStructure::verify(p, &s, ctx.tol) {
            Ok(ps) => {
                rec.identity(
                    &format!("euler-poisson.skew.p{k}"),
                    &format!("Skew-symmetry of P{k}"),
                    &format!("P{k} + P{k}^T = 0"),
                    e,
                    Ok(Measured::absolute(ps.skew)),
                );
                rec.identity(
                    &format!("euler-poisson.jacobi.p{k}"),
                    &format!("Jacobi identity for P{k}"),
                    &format!("[P{k}, P{k}] = 0"),
                    d,
                    Ok(Measured::absolute(ps.jacobi)),
                );
            }
            Err(err) => rec.identity(&format!("euler-poisson.poisson.p{k}"), "Poisson structure", "", d, Err(err.into())),
        }
    }
    match f.tri_hamiltonian_residuals(&s) {
        Ok(rs) => {
            for (k, r) in rs.into_iter().enumerate() {
                rec.identity(
                    &format!("euler-poisson.tri-hamiltonian.h{k}"),
                    &format!("Hamiltonian field of h{k} under P{k}"),
                    &format!("P{k} dh{k} = X_L"),
                    d,
                    Ok(Measured::absolute(r)),
                );
            }
        }
        Err(err) => rec.identity("euler-poisson.tri-hamiltonian", "Tri-Hamiltonian flow", "", d, Err(err.into())),
    }
    match gz_chain_check(&f, &s) {
        Ok(report) => {
            let last = report.checks.len().saturating_sub(1);
            for (k, c) in report.checks.iter().enumerate() {
                // The decomposition of X_L is algebraic in the chain fields.
                let tol = if k == last { e } else { d };
                rec.identity(
                    &format!("euler-poisson.gz.{}", slug(&c.label)),
                    "Two-Casimir chain identity",
                    &c.label,
                    tol,
                    Ok(Measured::absolute(c.residual)),
                );
            }
            for (lambda, r) in &report.pencil {
                rec.identity(
                    &format!("euler-poisson.pencil.lambda-{lambda}"),
                    &format!("Casimir of the pencil P0 - {lambda} P1"),
                    "(P0 - l P1) d((F4/2) l^2 - F3 l + F2) = 0",
                    d,
                    Ok(Measured::absolute(*r)),
                );
            }
        }
        Err(err) => rec.identity("euler-poisson.gz", "Two-Casimir chain", "", d, Err(err.into())),
    }
    let integrals: Vec<ScalarField> = f.integrals().into_iter().cloned().collect();
    for (k, p) in [&f.p0, &f.p1].into_iter().enumerate() {
        rec.identity(
            &format!("euler-poisson.involution.p{k}"),
            &format!("Pairwise brackets of F1..F4 under P{k}, relative to |dF_i| |dF_j| |P{k}|"),
            "{F_i, F_j} = 0",
            INVOLUTION_TOL,
            MagriChain::involution(p, &integrals, &s).map(Measured::relative).map_err(Into::into),
        );
    }
}
