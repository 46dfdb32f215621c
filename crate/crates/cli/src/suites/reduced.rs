//! The complex chart, the operator `N` with its Benenti family, the leaf
//! reduction and the separation chart.

use haantjes::check::{sampled, sampled_scaled};
use haantjes::linalg::max_modulus;
use haantjes::{
    check_compatibility, check_skew_compositions, differential, is_nijenhuis, lie_bracket, lie_derivative_bivector,
    r_tensor, BivectorField, Field, OneFormField, OperatorField, Point, Residual, Sample, Scalar, ScalarField,
    VectorField, C64,
};
use haantjes_lagrange::complex::{F1, F4, X1, X2};
use haantjes_lagrange::separation::SeparationChart;
use haantjes_lagrange::util::{bivector_gap, matrix_gap, oneform_gap, operator_gap, operator_norm, vector_gap, vector_norm};
use haantjes_lagrange::{
    benenti_operators, deformation, eigenform_pairing, nijenhuis_operator, restricted_hamiltonian_chain,
    separation_chart, BenentiOperators, ComplexChartFields, Deformation, Leaf, LeafFields, MomentumReading, NReading,
    SEPARATION_COORDS,
};
use nalgebra::{DMatrix, DVector};

use super::{Context, Recorder, IDENTITY_TOL, INVOLUTION_TOL, ROUND_TRIP_TOL};
use crate::report::Measured;

/// Leaf constants `(C1, C4)` of the reduced checks.
pub const LEAF: (f64, f64) = (1.0, 2.0);
/// Points at which `R(P1, N)` is evaluated on all frame pairs.
pub const R_TENSOR_POINTS: usize = 20;

struct Setup {
    fields: ComplexChartFields,
    n: OperatorField,
    k: BenentiOperators,
    def: Deformation,
    sample: Sample<C64>,
}

fn setup(ctx: &Context) -> anyhow::Result<Setup> {
    let fields = ComplexChartFields::new(&ctx.params)?;
    let n = nijenhuis_operator(&ctx.params, NReading::Corrected)?;
    let k = benenti_operators(&n, &fields)?;
    let def = deformation(&fields)?;
    let sample = ctx.spec().draw(&fields.chart, &fields.singular())?;
    Ok(Setup { fields, n, k, def, sample })
}

fn abs<E: std::error::Error + Send + Sync + 'static>(r: Result<Residual, E>) -> anyhow::Result<Measured> {
    Ok(Measured::absolute(r?))
}

fn lie_z_p1(s: &Setup, z: &VectorField) -> anyhow::Result<Measured> {
    abs(sampled(&s.sample, |p| Ok(max_modulus(lie_derivative_bivector(z, &s.fields.p1, p)?.iter()))))
}

fn lie_z_p0(s: &Setup, z: &VectorField) -> anyhow::Result<Measured> {
    let rhs = BivectorField::wedge(&lie_bracket(z, &s.fields.x1)?, &s.def.z2)?;
    abs(sampled(&s.sample, |p| {
        let lhs = lie_derivative_bivector(z, &s.fields.p0, p)?;
        Ok(max_modulus((lhs - rhs.eval(p)?).iter()))
    }))
}

fn q_transversal(s: &Setup) -> anyhow::Result<Measured> {
    abs(sampled(&s.sample, |p| {
        let q = s.def.q.eval(p)?;
        let mut worst = 0.0_f64;
        for i in 0..6 {
            for t in [F1, F4] {
                worst = worst.max(q[(i, t)].modulus()).max(q[(t, i)].modulus());
            }
        }
        Ok(worst)
    }))
}

fn z_frames(s: &Setup) -> anyhow::Result<Measured> {
    let f = &s.fields;
    let half_f4 = f.f4.scale(0.5);
    let mut worst = Residual::zero(s.sample.len());
    for (z, h, want) in [(&s.def.z1, &f.f1, 1.0), (&s.def.z2, &half_f4, 1.0), (&s.def.z1, &half_f4, 0.0), (&s.def.z2, &f.f1, 0.0)] {
        let zh = differential(h).pair(z)?;
        worst = worst.combine(sampled(&s.sample, |p| Ok((zh.eval(p)? - want).modulus()))?);
    }
    Ok(Measured::absolute(worst))
}

fn printed_n_reading(ctx: &Context, s: &Setup) -> anyhow::Result<Measured> {
    let printed = nijenhuis_operator(&ctx.params, NReading::Printed)?;
    let k = benenti_operators(&printed, &s.fields)?;
    let torsion = is_nijenhuis(&printed, &s.sample, ctx.tol.deriv)?;
    let grad = oneform_gap(&k.k2.apply_transpose(&differential(&s.fields.f3.neg()))?, &differential(&s.fields.f2), &s.sample)?;
    let gap = operator_gap(&printed, &s.n, &s.sample)?;
    let note = if gap.max == 0.0 {
        format!("printed and corrected lower entries coincide at c = {}", ctx.params.c)
    } else {
        format!(
            "printed lower entry gives relative |T_N| = {:.3e} and |K2^T d(-F3) - dF2| = {:.3e}; the corrected entry is used",
            torsion.residual.relative, grad.max
        )
    };
    Ok(Measured::value(torsion.residual.relative.max(grad.max), s.sample.len(), true).with_note(note))
}

fn minimal_polynomial_identity(s: &Setup) -> anyhow::Result<Measured> {
    let id = OperatorField::identity(&s.fields.chart);
    let poly = s.n.pow(2).add(&s.n.scale(&s.k.a1)?)?.add(&id.scale(&s.k.a2)?)?;
    abs(operator_norm(&poly, &s.sample))
}

fn compatibility(s: &Setup) -> anyhow::Result<Measured> {
    let mut worst = Residual::zero(s.sample.len());
    for k in s.k.all() {
        worst = worst.combine(check_compatibility(k, &s.fields.p1, &s.sample)?);
    }
    Ok(Measured::absolute(worst))
}

fn skew_compositions(s: &Setup) -> anyhow::Result<Measured> {
    let f = ScalarField::coordinate(&s.fields.chart, X1)?;
    let sk = check_skew_compositions(&s.n, &s.k.k2, &s.fields.p1, &f, 3, &s.sample)?;
    Ok(Measured::value(sk.max(), s.sample.len(), false))
}

fn benenti_coefficients(s: &Setup) -> anyhow::Result<Measured> {
    let r = sampled(&s.sample, |p: &Point| {
        let (x1, x2) = (p.coords()[X1], p.coords()[X2]);
        let (a1, a2) = (x1 / x2, -x2.inv());
        let r1 = (s.k.a1.eval(p)? - a1).modulus() / (1.0 + a1.modulus());
        let r2 = (s.k.a2.eval(p)? - a2).modulus() / (1.0 + a2.modulus());
        Ok(r1.max(r2))
    })?;
    Ok(Measured::value(r.max, r.points, true))
}

fn r_tensor_on_frames(s: &Setup, tol: f64) -> anyhow::Result<Measured> {
    let chart = &s.fields.chart;
    let points = &s.sample.points()[..R_TENSOR_POINTS.min(s.sample.len())];
    let mut worst = 0.0_f64;
    let mut nonzero_at_first = 0;
    for (k, p) in points.iter().enumerate() {
        for a in 0..6 {
            for b in 0..6 {
                let r = r_tensor(&s.fields.p1, &s.n, &OneFormField::basis(chart, a)?, &VectorField::basis(chart, b)?, p)?;
                let m = max_modulus(r.iter());
                worst = worst.max(m);
                if k == 0 && m > tol {
                    nonzero_at_first += 1;
                }
            }
        }
    }
    Ok(Measured::value(worst, points.len(), false)
        .with_note(format!("R(P1,N)(dx^a, d/dx^b) is nonzero on {nonzero_at_first} of 36 frame pairs at the first point")))
}

struct LeafSetup {
    leaf: Leaf,
    lf: LeafFields,
    sample: Sample<C64>,
}

fn leaf_setup(ctx: &Context, s: &Setup) -> anyhow::Result<LeafSetup> {
    let leaf = Leaf::new(&ctx.params, LEAF.0, LEAF.1)?;
    let sample = ctx.spec().draw(&leaf.chart, &leaf.singular().union(&SeparationChart::singular()))?;
    let lf = LeafFields::new(&leaf, &s.fields, &s.n, &s.k, &sample, ctx.tol.exact)?;
    Ok(LeafSetup { leaf, lf, sample })
}

fn relative_gap(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    max_modulus((a - b).iter()) / (1.0 + max_modulus(a.iter()).max(max_modulus(b.iter())))
}

fn leaf_blocks(l: &LeafSetup) -> anyhow::Result<Measured> {
    let n = operator_gap(&l.lf.n, &l.leaf.printed_n()?, &l.sample)?;
    let k2 = operator_gap(&l.lf.k2, &l.leaf.printed_k2()?, &l.sample)?;
    Ok(Measured::absolute(n.combine(k2)))
}

fn h1_chain(l: &LeafSetup, tol: f64) -> anyhow::Result<Measured> {
    let chain = restricted_hamiltonian_chain(&l.lf, &l.sample, tol)?;
    let best = chain.readings.iter().min_by(|a, b| a.1.max.total_cmp(&b.1.max)).expect("two readings");
    let others: Vec<String> =
        chain.readings.iter().map(|(s, r)| format!("{}: {:.3e}", s.label(), r.max)).collect();
    Ok(Measured::absolute(best.1).with_note(format!("holding reading {}; {}", best.0.label(), others.join("; "))))
}

fn round_trip(l: &LeafSetup, reading: MomentumReading) -> anyhow::Result<Measured> {
    let sc = separation_chart(&l.leaf, reading)?;
    let r = sampled(&l.sample, |p| {
        let back = sc.map.apply_inverse(&sc.map.apply(p)?)?;
        Ok(back.coords().iter().zip(p.coords()).map(|(a, b)| (a - b).norm() / (1.0 + b.norm())).fold(0.0, f64::max))
    })?;
    Ok(Measured::value(r.max, r.points, true))
}

fn canonical() -> DMatrix<C64> {
    let (z, i) = (C64::new(0.0, 0.0), C64::i());
    DMatrix::from_row_slice(4, 4, &[z, z, i, z, z, z, z, i, -i, z, z, z, z, -i, z, z])
}

fn pushed_p1(l: &LeafSetup) -> anyhow::Result<Measured> {
    let sc = separation_chart(&l.leaf, MomentumReading::Corrected)?;
    let p1 = sc.map.push_bivector(&l.lf.p1)?;
    let target = canonical();
    let r = sampled(&l.sample, |p| Ok(relative_gap(&p1.eval(&sc.map.apply(p)?)?, &target)))?;
    Ok(Measured::value(r.max, r.points, true))
}

fn pushed_k2(l: &LeafSetup) -> anyhow::Result<Measured> {
    let sc = separation_chart(&l.leaf, MomentumReading::Corrected)?;
    let k2 = sc.map.push_operator(&l.lf.k2)?;
    let r = sampled(&l.sample, |p| {
        let q = sc.map.apply(p)?;
        let (l1, l2) = (q.coords()[0], q.coords()[1]);
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![l2, l1, l2, l1]));
        Ok(relative_gap(&k2.eval(&q)?, &diag))
    })?;
    Ok(Measured::value(r.max, r.points, true))
}

/// `λ1λ2 + 1/x2` and `λ1 + λ2 − x1/x2`, relative to `1 + |λ|²`.
fn symmetric_functions(l: &LeafSetup) -> anyhow::Result<Measured> {
    let sc = separation_chart(&l.leaf, MomentumReading::Corrected)?;
    let r = sampled(&l.sample, |p| {
        let x = p.coords();
        let q = sc.map.apply(p)?;
        let (l1, l2) = (q.coords()[0], q.coords()[1]);
        let scale = 1.0 + l1.norm().max(l2.norm()).powi(2);
        Ok((l1 * l2 + x[X2].inv()).norm().max((l1 + l2 - x[X1] / x[X2]).norm()) / scale)
    })?;
    Ok(Measured::value(r.max, r.points, true))
}

/// `tr Ǩ2 = 2x1/x2` and `det = −1/x2` on each 2×2 block.
fn trace_and_determinants(l: &LeafSetup) -> anyhow::Result<Measured> {
    let r = sampled_scaled(&l.sample, |p: &Point| {
        let k = l.lf.k2.eval(p)?;
        let (x1, x2) = (p.coords()[X1], p.coords()[X2]);
        let tr = (k.trace() - x1 / x2 * 2.0).norm();
        let det = |i: usize| k[(i, i)] * k[(i + 1, i + 1)] - k[(i, i + 1)] * k[(i + 1, i)];
        let d = (det(0) + x2.inv()).norm().max((det(2) + x2.inv()).norm());
        Ok((tr.max(d), max_modulus(k.iter()).powi(2)))
    })?;
    Ok(Measured::relative(r))
}

/// `det(Ǩ2 − λI)` at the closed-form `λ`, relative to `(1 + |Ǩ2|)⁴`.
fn eigenvalue_reading(l: &LeafSetup) -> anyhow::Result<Measured> {
    let sc = separation_chart(&l.leaf, MomentumReading::Corrected)?;
    let r = sampled(&l.sample, |p| {
        let k = l.lf.k2.eval(p)?;
        let q = sc.map.apply(p)?;
        let scale = (1.0 + max_modulus(k.iter())).powi(4);
        Ok(q.coords()[..2]
            .iter()
            .map(|lam| (&k - DMatrix::identity(4, 4) * *lam).determinant().norm() / scale)
            .fold(0.0, f64::max))
    })?;
    Ok(Measured::value(r.max, r.points, true)
        .with_note("l = (x1 -/+ sqrt(x1^2 + 4 x2)) / (2 x2) are eigenvalues of K2 = (x1/x2) I + N, not of N"))
}

fn pairing(l: &LeafSetup, reading: MomentumReading) -> anyhow::Result<Measured> {
    let sc = separation_chart(&l.leaf, reading)?;
    let r = eigenform_pairing(&l.lf.k2, &sc, &l.leaf, &l.sample)?;
    Ok(Measured::value(r.max(), l.sample.len(), false).with_note(r.reading()))
}

fn printed_momenta(l: &LeafSetup) -> anyhow::Result<Measured> {
    let sc = separation_chart(&l.leaf, MomentumReading::Printed)?;
    let r = eigenform_pairing(&l.lf.k2, &sc, &l.leaf, &l.sample)?;
    let worst = r.best(2).max.max(r.best(3).max);
    let parts: Vec<String> = (2..4)
        .map(|f| format!("{}: {:.3e} / {:.3e}", SEPARATION_COORDS[f], r.residuals[f][0].max, r.residuals[f][1].max))
        .collect();
    Ok(Measured::value(worst, l.sample.len(), false).with_note(format!(
        "printed momenta are eigenforms of neither eigenvalue (residual against l1 / l2 per momentum: {})",
        parts.join(", ")
    )))
}

pub fn run(ctx: &Context, rec: &mut Recorder) {
    let (e, d) = (ctx.tol.exact, ctx.tol.deriv);
    let s = match setup(ctx) {
        Ok(s) => s,
        Err(err) => return rec.identity("reduced.setup", "Complex chart, N and Benenti operators", "", d, Err(err)),
    };
    let f = &s.fields;
    rec.identity(
        "reduced.p1-block",
        "P1 pushed to the complex chart against its block form",
        "P1 = -i [[0,0,1,0],[0,0,0,x2],[-1,0,0,0],[0,-x2,0,0]] (+) 0",
        e,
        (|| abs(bivector_gap(&f.p1, &f.printed_p1()?, &s.sample)))(),
    );
    rec.identity(
        "reduced.p0-block",
        "P0 pushed to the complex chart against its block form",
        "P0 = P0_leaf + X1 ^ Z2",
        d,
        (|| abs(bivector_gap(&f.p0, &f.printed_p0()?, &s.sample)))(),
    );
    rec.identity(
        "reduced.deformation",
        "N deforms P1 into Q",
        "N P1 = P0 - X1 ^ Z2",
        d,
        (|| abs(matrix_gap(&s.n.mul_bivector(&f.p1)?, s.def.q.as_matrix(), &s.sample)))(),
    );
    for (k, z) in [(1, &s.def.z1), (2, &s.def.z2)] {
        rec.identity(
            &format!("reduced.lie-z{k}-p1"),
            &format!("Z{k} preserves P1"),
            &format!("L_Z{k} P1 = 0"),
            d,
            lie_z_p1(&s, z),
        );
        rec.identity(
            &format!("reduced.lie-z{k}-p0"),
            &format!("Lie derivative of P0 along Z{k}"),
            &format!("L_Z{k} P0 = [Z{k}, X1] ^ Z2"),
            d,
            lie_z_p0(&s, z),
        );
    }
    rec.identity("reduced.q-transversal", "Transversal rows and columns of Q", "Q^{i F1} = Q^{i F4} = 0", e, q_transversal(&s));
    rec.identity("reduced.z-frames", "Z1, Z2 dual to dF1, d(F4/2)", "Z1(F1) = Z2(F4/2) = 1, Z1(F4) = Z2(F1) = 0", e, z_frames(&s));
    rec.identity(
        "reduced.n-torsion",
        "Nijenhuis torsion of N",
        "T_N = 0",
        d,
        is_nijenhuis(&s.n, &s.sample, d).map(|c| Measured::relative(c.residual)).map_err(Into::into),
    );
    rec.flagged(
        "reduced.n-printed-reading",
        "Lower-right entry of N as printed, tested against T_N = 0 and the gradient chain",
        "T_N = 0, K2^T d(-F3) = dF2",
        d,
        printed_n_reading(ctx, &s),
    );
    rec.identity(
        "reduced.minimal-polynomial",
        "N satisfies its quadratic minimal polynomial",
        "N^2 + (x1/x2) N - (1/x2) I = 0",
        IDENTITY_TOL,
        minimal_polynomial_identity(&s),
    );
    rec.identity("reduced.k3-zero", "The third Benenti operator vanishes", "K3 = 0", IDENTITY_TOL, abs(operator_norm(&s.k.k3, &s.sample)));
    rec.identity(
        "reduced.benenti-coefficients",
        "Coefficients of N against closed forms",
        "Z2(-F3) = x1/x2, Z2(F2) = -1/x2",
        e,
        benenti_coefficients(&s),
    );
    rec.identity("reduced.compatibility", "K_i compatible with P1", "K_i P1 = P1 K_i^T", e, compatibility(&s));
    rec.identity(
        "reduced.skew-compositions",
        "Skew-symmetry of compositions with P1",
        "K P1, K P1 K^T, (N - f I)^k P1 skew",
        e,
        skew_compositions(&s),
    );
    rec.identity("reduced.chain.k2-x1", "Vector chain, second element", "K2 X1 = X2", d, (|| abs(vector_gap(&s.k.k2.apply(&f.x1)?, &f.x2, &s.sample)))());
    rec.identity("reduced.chain.k3-x1", "Vector chain, third element", "K3 X1 = 0", d, (|| abs(vector_norm(&s.k.k3.apply(&f.x1)?, &s.sample)))());
    rec.identity("reduced.chain.commute", "Chain fields commute", "[X1, X2] = 0", d, (|| abs(vector_norm(&lie_bracket(&f.x1, &f.x2)?, &s.sample)))());
    let d_f3 = differential(&f.f3.neg());
    rec.identity(
        "reduced.chain.grad-k2",
        "One-form chain, second element",
        "K2^T d(-F3) = dF2",
        d,
        (|| abs(oneform_gap(&s.k.k2.apply_transpose(&d_f3)?, &differential(&f.f2), &s.sample)))(),
    );
    rec.identity(
        "reduced.chain.grad-k3",
        "One-form chain, third element",
        "K3^T d(-F3) = 0",
        d,
        (|| abs(oneform_gap(&s.k.k3.apply_transpose(&d_f3)?, &OneFormField::zero(&f.chart), &s.sample)))(),
    );
    rec.identity(
        "reduced.sysk.x1",
        "N on the first chain field",
        "N X1 = X2 - Z2(-F3) X1",
        d,
        (|| abs(vector_gap(&s.n.apply(&f.x1)?, &f.x2.sub(&f.x1.scale(&s.k.a1)?)?, &s.sample)))(),
    );
    rec.identity(
        "reduced.sysk.x2",
        "N on the second chain field",
        "N X2 = -Z2(F2) X1",
        d,
        (|| abs(vector_gap(&s.n.apply(&f.x2)?, &f.x1.scale(&s.k.a2)?.scale_const(-1.0), &s.sample)))(),
    );
    rec.flagged("reduced.r-tensor", "R(P1, N) on coordinate frames", "R(P1, N) = 0", d, r_tensor_on_frames(&s, d));

    let l = match leaf_setup(ctx, &s) {
        Ok(l) => l,
        Err(err) => return rec.identity("reduced.leaf.setup", "Restriction to the leaf F1 = 1, F4 = 2", "", e, Err(err)),
    };
    rec.identity("reduced.leaf.blocks", "Leaf blocks of N and K2 against their printed forms", "N|S = N_leaf, K2|S = (x1/x2) I + N_leaf", e, leaf_blocks(&l));
    rec.identity("reduced.leaf.chain-f3-f2", "Restricted one-form chain", "K2^T d(-F3)|S = dF2|S", d, abs(l.lf.chain_residual(&l.sample)));
    rec.flagged("reduced.leaf.h1-chain", "Restricted chain for h1, both sign readings", "dh1|S = (-I + (c-1) C1 K2^T) dF3|S", d, h1_chain(&l, d));
    rec.identity(
        "reduced.leaf.involution",
        "F2, F3 in involution on the leaf, scale-adjusted",
        "{F2, F3}_P1 = 0",
        INVOLUTION_TOL,
        l.lf.involution(&l.sample).map(Measured::relative).map_err(Into::into),
    );
    rec.identity("reduced.separation.round-trip", "Separation chart followed by its inverse", "phi^-1(phi(x)) = x", ROUND_TRIP_TOL, round_trip(&l, MomentumReading::Corrected));
    rec.identity("reduced.separation.canonical-p1", "P1 in separation coordinates", "P1 = i (d/dl_k ^ d/dm_k)", d, pushed_p1(&l));
    rec.identity("reduced.separation.diagonal-k2", "K2 in separation coordinates", "K2 = diag(l2, l1, l2, l1)", d, pushed_k2(&l));
    rec.identity("reduced.separation.symmetric-functions", "Symmetric functions of the eigenvalues", "l1 l2 = -1/x2, l1 + l2 = x1/x2", e, symmetric_functions(&l));
    rec.identity("reduced.separation.trace-det", "Trace and block determinants of K2", "tr K2 = 2 x1/x2, det K2_block = -1/x2", e, trace_and_determinants(&l));
    rec.flagged("reduced.separation.eigenvalue-reading", "Closed-form eigenvalues against det(K2 - l I)", "det(K2 - l_k I) = 0", e, eigenvalue_reading(&l));
    rec.flagged("reduced.separation.eigenform-pairing", "Separation coordinates as eigenforms of K2^T", "K2^T dl1 = l2 dl1, K2^T dl2 = l1 dl2", d, pairing(&l, MomentumReading::Corrected));
    rec.flagged("reduced.separation.printed-momenta", "Momenta as printed, tested as eigenforms of K2^T", "K2^T dm_k = l_j dm_k", d, printed_momenta(&l));
}

