//! Haantjes-algebra axioms on the Euler chain and on `{I, N, N²}`.

use haantjes::check::{map_points, sampled_scaled};
use haantjes::{
    cyclic_algebra, minimal_polynomial, AlgebraVerification, HaantjesAlgebra, OperatorField, Point, Sample, Scalar,
    ScalarField,
};
use haantjes_lagrange::complex::{F1, X1, X2};
use haantjes_lagrange::{euler_chain_operators, nijenhuis_operator, ComplexChartFields, EulerChart, NReading};

use super::{Context, Recorder};
use crate::report::Measured;

fn record_axioms(rec: &mut Recorder, prefix: &str, name: &str, ctx: &Context, v: anyhow::Result<AlgebraVerification>) {
    let (e, d) = (ctx.tol.exact, ctx.tol.deriv);
    match v {
        Ok(v) => {
            let generators = v.generators.iter().map(|g| g.residual).reduce(|a, b| a.combine(b));
            rec.identity(
                &format!("{prefix}.generators"),
                &format!("Haantjes torsion of each generator of {name}"),
                "H_{K_i} = 0",
                d,
                generators.map(Measured::relative).ok_or_else(|| anyhow::anyhow!("no generators")),
            );
            rec.identity(
                &format!("{prefix}.module"),
                &format!("Module condition on {name}"),
                "H_{f K_i + g K_j} = 0",
                d,
                Ok(Measured::relative(v.module)),
            );
            rec.identity(
                &format!("{prefix}.ring"),
                &format!("Ring condition on {name}"),
                "H_{K_i K_j} = 0",
                d,
                Ok(Measured::relative(v.ring)),
            );
            rec.identity(
                &format!("{prefix}.abelian"),
                &format!("Commutativity of {name}"),
                "K_i K_j - K_j K_i = 0",
                e,
                Ok(Measured::absolute(v.abelian)),
            );
            let changes = v.rank.per_point.iter().filter(|r| **r != v.rank.rank).count();
            rec.identity(
                &format!("{prefix}.rank"),
                &format!("Constant numerical rank of {name}"),
                "rank = const",
                0.0,
                Ok(Measured::value(changes as f64, v.rank.per_point.len(), false)
                    .with_note(format!("rank {} at the first point", v.rank.rank))),
            );
        }
        Err(err) => {
            let msg = format!("{err:#}");
            for part in ["generators", "module", "ring", "abelian", "rank"] {
                rec.identity(
                    &format!("{prefix}.{part}"),
                    &format!("Axioms of {name}"),
                    "",
                    d,
                    Err(anyhow::anyhow!("{msg}")),
                );
            }
        }
    }
}

fn euler_algebra(ctx: &Context) -> anyhow::Result<AlgebraVerification> {
    let ec = EulerChart::new(&ctx.params)?;
    let ops = euler_chain_operators(&ctx.params)?;
    let s: Sample<f64> = ctx.spec().draw(&ec.chart, &ec.singular())?;
    let f = ScalarField::coordinate(&ec.chart, 3)?;
    let g = ScalarField::coordinate(&ec.chart, 0)?;
    Ok(ops.algebra()?.verify(&s, ctx.tol, &f, &g)?)
}

struct Lagrange {
    fields: ComplexChartFields,
    n: OperatorField,
    sample: Sample<haantjes::C64>,
}

fn lagrange(ctx: &Context) -> anyhow::Result<Lagrange> {
    let fields = ComplexChartFields::new(&ctx.params)?;
    let n = nijenhuis_operator(&ctx.params, NReading::Corrected)?;
    let sample = ctx.spec().draw(&fields.chart, &fields.singular())?;
    Ok(Lagrange { fields, n, sample })
}

fn powers_algebra(ctx: &Context, l: &Lagrange) -> anyhow::Result<AlgebraVerification> {
    let alg = HaantjesAlgebra::new(vec![OperatorField::identity(&l.fields.chart), l.n.clone(), l.n.pow(2)])?;
    let f = ScalarField::coordinate(&l.fields.chart, X1)?;
    let g = ScalarField::coordinate(&l.fields.chart, F1)?;
    Ok(alg.verify(&l.sample, ctx.tol, &f, &g)?)
}

/// `|c1 − x1/x2|` and `|c0 + 1/x2|`, each relative to the closed form.
fn minimal_polynomial_coefficients(l: &Lagrange) -> anyhow::Result<Measured> {
    let r = sampled_scaled(&l.sample, |p: &Point| {
        let (x1, x2) = (p.coords()[X1], p.coords()[X2]);
        let mp = minimal_polynomial(&l.n, p)?;
        if mp.degree() != 2 {
            return Ok((1.0, 0.0));
        }
        let (a, b) = (x1 / x2, -x2.inv());
        let r1 = (mp.coefficients[1] - a).modulus() / (1.0 + a.modulus());
        let r0 = (mp.coefficients[0] - b).modulus() / (1.0 + b.modulus());
        Ok((r1.max(r0), 0.0))
    })?;
    Ok(Measured::value(r.max, r.points, true))
}

/// Points where the rank of `{I, N}` differs from the degree of the
/// minimal polynomial of `N`.
fn cyclic_rank(l: &Lagrange) -> anyhow::Result<Measured> {
    let alg = cyclic_algebra(&l.n, None, &l.sample)?;
    let rank = alg.rank(&l.sample)?;
    let degrees = map_points(&l.sample, |p| Ok(minimal_polynomial(&l.n, p)?.degree()))?;
    let mismatches = rank.per_point.iter().zip(&degrees).filter(|(r, d)| r != d).count();
    Ok(Measured::value(mismatches as f64, degrees.len(), false)
        .with_note(format!("{} generators, rank {}", alg.len(), rank.rank)))
}

pub fn run(ctx: &Context, rec: &mut Recorder) {
    record_axioms(rec, "algebra.euler", "{K1, K2, K3}", ctx, euler_algebra(ctx));
    match lagrange(ctx) {
        Ok(l) => {
            record_axioms(rec, "algebra.lagrange", "{I, N, N^2}", ctx, powers_algebra(ctx, &l));
            rec.identity(
                "algebra.minimal-polynomial",
                "Minimal polynomial coefficients of N against closed forms",
                "m_N(t) = t^2 + (x1/x2) t - 1/x2",
                ctx.tol.exact,
                minimal_polynomial_coefficients(&l),
            );
            rec.identity(
                "algebra.cyclic-rank",
                "Rank of the cyclic algebra of N equals the minimal-polynomial degree",
                "rank{I, N} = deg m_N",
                0.0,
                cyclic_rank(&l),
            );
        }
        Err(e) => rec.identity("algebra.lagrange", "Lagrange operator setup", "", ctx.tol.deriv, Err(e)),
    }
}
