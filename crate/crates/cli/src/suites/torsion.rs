//! Torsion classification on random and Lagrange operator fields.

use haantjes::check::sampled_scaled;
use haantjes::torsion::BracketTorsion;
use haantjes::{
    haantjes_torsion, is_haantjes, is_nijenhuis, nijenhuis_torsion, random_polynomial, Chart,
    OperatorField, Point, Residual, Sample, ScalarField, SingularSet, C64,
};
use haantjes_lagrange::{nijenhuis_operator, ComplexChartFields, NReading};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Context, Recorder};
use crate::report::Measured;

/// Number of random diagonal operators.
pub const DIAGONAL_FIELDS: usize = 10;
/// Points used to compare the local and bracket forms.
pub const BRACKET_POINTS: usize = 10;

fn rng(ctx: &Context, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

/// Diagonal operators with quadratic entries on charts of dimension 2, 3, 4.
pub fn random_diagonal_operators(ctx: &Context) -> Vec<OperatorField> {
    let mut r = rng(ctx, 1);
    (0..DIAGONAL_FIELDS)
        .map(|k| {
            let n = 2 + k % 3;
            let chart = Chart::numbered(format!("diag{n}"), n);
            let entries = (0..n).map(|_| random_polynomial(&mut r, n, 2)).collect();
            OperatorField::diagonal(&chart, entries).expect("entries match the chart")
        })
        .collect()
}

/// A dense operator with quadratic entries on a 3-chart.
pub fn random_dense_operator(ctx: &Context) -> OperatorField {
    let mut r = rng(ctx, 2);
    let chart = Chart::numbered("dense3", 3);
    OperatorField::new(&chart, (0..9).map(|_| random_polynomial(&mut r, 3, 2)).collect()).expect("nine entries")
}

fn diagonal(ctx: &Context) -> anyhow::Result<Measured> {
    let mut worst = Residual::zero(0);
    let mut points = 0;
    for l in random_diagonal_operators(ctx) {
        let s: Sample<C64> = ctx.spec().draw(l.chart(), &SingularSet::new())?;
        let chk = is_haantjes(&l, &s, ctx.tol.deriv)?;
        worst = worst.combine(chk.residual);
        points += s.len();
    }
    Ok(Measured::value(worst.max, points, false))
}

fn polynomial_closure(ctx: &Context) -> anyhow::Result<Measured> {
    let fields = ComplexChartFields::new(&ctx.params)?;
    let n = nijenhuis_operator(&ctx.params, NReading::Corrected)?;
    let mut r = rng(ctx, 3);
    let coeffs = (0..3)
        .map(|_| ScalarField::new(&fields.chart, random_polynomial(&mut r, 6, 2)))
        .collect::<Result<Vec<_>, _>>()?;
    let l = n.polynomial(&coeffs)?;
    let s: Sample<C64> = ctx.spec().draw(&fields.chart, &fields.singular())?;
    Ok(Measured::relative(is_haantjes(&l, &s, ctx.tol.deriv)?.residual))
}

fn bracket_sample(ctx: &Context, l: &OperatorField) -> anyhow::Result<Sample<C64>> {
    Ok(haantjes::SampleSpec::new(BRACKET_POINTS, ctx.seed).draw(l.chart(), &SingularSet::new())?)
}

fn local_vs_brackets(ctx: &Context) -> anyhow::Result<Measured> {
    let l = random_dense_operator(ctx);
    let s = bracket_sample(ctx, &l)?;
    let hb = BracketTorsion::haantjes(&l)?;
    let r = sampled_scaled(&s, |p: &Point| {
        let local = haantjes_torsion(&l, p)?;
        Ok((local.max_difference(&hb.eval(p)?), local.scale()))
    })?;
    Ok(Measured::relative(r))
}

fn antisymmetry(ctx: &Context) -> anyhow::Result<Measured> {
    let l = random_dense_operator(ctx);
    let s = bracket_sample(ctx, &l)?;
    let r = sampled_scaled(&s, |p: &Point| {
        let t = nijenhuis_torsion(&l, p)?;
        let h = haantjes_torsion(&l, p)?;
        let rel = (t.antisymmetry_residual() / (1.0 + t.scale())).max(h.antisymmetry_residual() / (1.0 + h.scale()));
        Ok((rel, 0.0))
    })?;
    Ok(Measured::value(r.max, r.points, true))
}

fn lagrange_n(ctx: &Context) -> anyhow::Result<Measured> {
    let fields = ComplexChartFields::new(&ctx.params)?;
    let n = nijenhuis_operator(&ctx.params, NReading::Corrected)?;
    let s: Sample<C64> = ctx.spec().draw(&fields.chart, &fields.singular())?;
    Ok(Measured::relative(is_nijenhuis(&n, &s, ctx.tol.deriv)?.residual))
}

pub fn run(ctx: &Context, rec: &mut Recorder) {
    let d = ctx.tol.deriv;
    rec.identity(
        "torsion.diagonal",
        "Haantjes torsion of random diagonal operators, dimensions 2 to 4",
        "H_L = 0 for L = diag(l_1, ..., l_n)",
        d,
        diagonal(ctx),
    );
    rec.identity(
        "torsion.polynomial-closure",
        "Haantjes torsion of a0 I + a1 N + a2 N^2 with random quadratic a_i",
        "H_{a0 I + a1 N + a2 N^2} = 0",
        d,
        polynomial_closure(ctx),
    );
    rec.identity(
        "torsion.local-vs-brackets",
        "Local-coordinate Haantjes torsion against Lie brackets of frames",
        "H_L(X,Y) = L^2 T(X,Y) + T(LX,LY) - L(T(X,LY) + T(LX,Y))",
        d,
        local_vs_brackets(ctx),
    );
    rec.identity(
        "torsion.antisymmetry",
        "Lower-index antisymmetry of both torsions of a dense operator",
        "T^i_jk = -T^i_kj, H^i_jk = -H^i_kj",
        d,
        antisymmetry(ctx),
    );
    rec.identity(
        "torsion.lagrange-n",
        "Nijenhuis torsion of the Lagrange operator N",
        "T_N = 0",
        d,
        lagrange_n(ctx),
    );
}
