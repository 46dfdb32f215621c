//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use haantjes::{
    haantjes_torsion, is_haantjes, nijenhuis_torsion, random_polynomial, Chart, Expr, Field, OperatorField, Sample,
    SampleSpec, ScalarField, SingularSet, Tolerances, C64,
};
use haantjes_cli::{run, Context, Suite, VerificationReport};
use haantjes_lagrange::{nijenhuis_operator, ComplexChartFields, EulerPoissonFields, NReading, TopParams};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const POINTS: usize = 100;
const SEED: u64 = 42;

/// Worst value and a label for the line printed per criterion.
struct Outcome {
    worst: String,
}

fn report(suite: Suite) -> VerificationReport {
    run(suite, &Context::new(SEED, POINTS, Tolerances::default(), TopParams::default()))
}

/// Asserts every check whose id starts with `prefix` is at most `tol` and
/// returns the largest residual.
fn bounded(r: &VerificationReport, prefix: &str, tol: f64) -> f64 {
    let matching: Vec<_> = r.checks.iter().filter(|c| c.id.starts_with(prefix)).collect();
    assert!(!matching.is_empty(), "no check {prefix}");
    let mut worst = 0.0_f64;
    for c in matching {
        let v = c.max_residual.unwrap_or_else(|| panic!("{} did not evaluate: {:?}", c.id, c.note));
        assert!(v <= tol, "{}: {v:e} > {tol:e}", c.id);
        assert!(c.points_sampled > 0, "{}", c.id);
        worst = worst.max(v);
    }
    worst
}

fn diagonal_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0_f64;
    for k in 0..10 {
        let n = 2 + k % 3;
        let chart = Chart::numbered("diag", n);
        let l = OperatorField::diagonal(&chart, (0..n).map(|_| random_polynomial(&mut rng, n, 2)).collect()).unwrap();
        let s: Sample<C64> = SampleSpec::new(POINTS, SEED + k as u64).draw(&chart, &SingularSet::new()).unwrap();
        let chk = is_haantjes(&l, &s, 1e-9).unwrap();
        assert_eq!(chk.residual.points, POINTS);
        assert!(chk.residual.max <= 1e-9, "field {k}: {:e}", chk.residual.max);
        worst = worst.max(chk.residual.max);
    }
    Outcome { worst: format!("max |H| = {worst:.2e} over 10 fields x {POINTS} points") }
}

fn polynomial_closure() -> Outcome {
    let params = TopParams::default();
    let fields = ComplexChartFields::new(&params).unwrap();
    let n = nijenhuis_operator(&params, NReading::Corrected).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let coeffs: Vec<ScalarField> =
        (0..3).map(|_| ScalarField::new(&fields.chart, random_polynomial(&mut rng, 6, 2)).unwrap()).collect();
    let l = n.polynomial(&coeffs).unwrap();
    let s: Sample<C64> = SampleSpec::new(POINTS, SEED).draw(&fields.chart, &fields.singular()).unwrap();
    let chk = is_haantjes(&l, &s, 1e-9).unwrap();
    assert!(chk.vanishes && chk.residual.relative <= 1e-9, "{:?}", chk.residual);
    Outcome {
        worst: format!(
            "max |H|/(1+|L|^3|dL|) = {:.2e} (absolute {:.2e} at term size {:.1e})",
            chk.residual.relative, chk.residual.max, chk.residual.scale
        ),
    }
}

fn poisson_trio(ep: &VerificationReport) -> Outcome {
    let skew = bounded(ep, "euler-poisson.skew.", 1e-12);
    let jacobi = bounded(ep, "euler-poisson.jacobi.", 1e-9);
    let tri = bounded(ep, "euler-poisson.tri-hamiltonian.", 1e-9);
    Outcome { worst: format!("skew {skew:.2e}, Jacobi {jacobi:.2e}, P_i dh_i = X_L {tri:.2e}") }
}

fn gz_chain(ep: &VerificationReport) -> Outcome {
    let chain = bounded(ep, "euler-poisson.gz.", 1e-9);
    let split = bounded(ep, "euler-poisson.gz.x-l-", 1e-12);
    let count = ep.checks.iter().filter(|c| c.id.starts_with("euler-poisson.gz.")).count();
    assert_eq!(count, 7);
    Outcome { worst: format!("7 chain residuals <= {chain:.2e}, X_L split {split:.2e}") }
}

fn deformation(red: &VerificationReport) -> Outcome {
    let np1 = bounded(red, "reduced.deformation", 1e-9);
    let lie = bounded(red, "reduced.lie-z", 1e-9);
    let q = bounded(red, "reduced.q-transversal", 1e-12);
    Outcome { worst: format!("N P1 = Q {np1:.2e}, Lie derivatives {lie:.2e}, Q transversal {q:.2e}") }
}

fn operator_identities(red: &VerificationReport) -> Outcome {
    let mp = bounded(red, "reduced.minimal-polynomial", 1e-10);
    let k3 = bounded(red, "reduced.k3-zero", 1e-10);
    let compat = bounded(red, "reduced.compatibility", 1e-12);
    let skew = bounded(red, "reduced.skew-compositions", 1e-12);
    Outcome { worst: format!("minimal polynomial {mp:.2e}, K3 {k3:.2e}, compatibility {compat:.2e}, skew {skew:.2e}") }
}

fn chains(red: &VerificationReport, ep: &VerificationReport) -> Outcome {
    let vector = bounded(red, "reduced.chain.k", 1e-9).max(bounded(red, "reduced.chain.commute", 1e-9));
    let grad = bounded(red, "reduced.chain.grad-", 1e-9);
    let inv = bounded(ep, "euler-poisson.involution.", 1e-10);
    assert!(ep.checks.iter().filter(|c| c.id.starts_with("euler-poisson.involution.")).all(|c| c.scale_aware));
    Outcome { worst: format!("vector chain {vector:.2e}, one-form chain {grad:.2e}, involution {inv:.2e} (scaled)") }
}

fn separation(red: &VerificationReport) -> Outcome {
    let p1 = bounded(red, "reduced.separation.canonical-p1", 1e-9);
    let k2 = bounded(red, "reduced.separation.diagonal-k2", 1e-9);
    let sym = bounded(red, "reduced.separation.symmetric-functions", 1e-12);
    let chain = bounded(red, "reduced.leaf.chain-f3-f2", 1e-9);
    let h1 = bounded(red, "reduced.leaf.h1-chain", 1e-9);
    for id in ["reduced.separation.canonical-p1", "reduced.separation.diagonal-k2"] {
        let c = red.checks.iter().find(|c| c.id == id).unwrap();
        assert_eq!(c.points_sampled, POINTS);
    }
    Outcome {
        worst: format!("P1 {p1:.2e}, K2 {k2:.2e}, symmetric functions {sym:.2e}, leaf chains {:.2e}", chain.max(h1)),
    }
}

fn dynamics() -> Outcome {
    let f = EulerPoissonFields::new(&TopParams::default()).unwrap();
    let start = [2.4, -3.3, 4.5, 0.6, -0.3, 0.74];
    let worst = |dt: f64| f.integrate(&start, dt, 10.0).unwrap().max_drift().into_iter().fold(0.0, f64::max);
    let coarse = worst(1e-3);
    let fine = worst(5e-4);
    assert!(coarse <= 1e-8, "{coarse:e}");
    assert!(coarse / fine >= 8.0, "{coarse:e} / {fine:e}");
    Outcome { worst: format!("drift {coarse:.2e} at dt = 1e-3, ratio {:.1} on halving", coarse / fine) }
}

mod oracle {
    use super::*;

    const H: f64 = 1e-6;

    fn central(e: &Expr, x: &[C64], k: usize, h: f64) -> C64 {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        (e.eval(&xp).unwrap() - e.eval(&xm).unwrap()) / (2.0 * h)
    }

    /// Central difference with one Richardson level.
    pub fn partial(e: &Expr, x: &[C64], k: usize) -> C64 {
        (central(e, x, k, H / 2.0) * 4.0 - central(e, x, k, H)) / 3.0
    }

    /// `(L, [∂_a L])` with the partials by differences.
    fn jet(l: &OperatorField, x: &[C64]) -> (DMatrix<C64>, Vec<DMatrix<C64>>) {
        let n = l.dim();
        let v = DMatrix::from_fn(n, n, |i, j| l.entry(i, j).eval(x).unwrap());
        let d = (0..n).map(|a| DMatrix::from_fn(n, n, |i, j| partial(l.entry(i, j), x, a))).collect();
        (v, d)
    }

    /// `T(∂_j, ∂_k)` from `[LX, LY] − L[LX, Y] − L[X, LY] + L²[X, Y]` on frames.
    pub fn nijenhuis(l: &OperatorField, x: &[C64]) -> Vec<Vec<DVector<C64>>> {
        let n = l.dim();
        let (v, d) = jet(l, x);
        let col = |m: &DMatrix<C64>, j: usize| m.column(j).into_owned();
        // [L∂_j, L∂_k]^i = (L∂_j)(L^i_k) − (L∂_k)(L^i_j)
        let dir = |j: usize, k: usize| -> DVector<C64> {
            (0..n).fold(DVector::zeros(n), |acc, a| acc + col(&d[a], k) * v[(a, j)] - col(&d[a], j) * v[(a, k)])
        };
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        // [L∂_j, ∂_k] = −∂_k(L∂_j), [∂_j, L∂_k] = ∂_j(L∂_k)
                        let mixed = col(&d[j], k) - col(&d[k], j);
                        dir(j, k) - &v * mixed
                    })
                    .collect()
            })
            .collect()
    }

    /// `L²T(X,Y) + T(LX,LY) − L(T(X,LY) + T(LX,Y))`, with `T` extended bilinearly.
    pub fn haantjes(l: &OperatorField, x: &[C64]) -> Vec<Vec<DVector<C64>>> {
        let n = l.dim();
        let t = nijenhuis(l, x);
        let v = DMatrix::from_fn(n, n, |i, j| l.entry(i, j).eval(x).unwrap());
        let apply = |a: &DVector<C64>, b: &DVector<C64>| -> DVector<C64> {
            let mut out = DVector::zeros(n);
            for j in 0..n {
                for k in 0..n {
                    out += &t[j][k] * (a[j] * b[k]);
                }
            }
            out
        };
        let e = |j: usize| DVector::from_fn(n, |i, _| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let (ej, ek) = (e(j), e(k));
                        let (lj, lk) = (&v * &ej, &v * &ek);
                        &v * &v * apply(&ej, &ek) + apply(&lj, &lk) - &v * (apply(&ej, &lk) + apply(&lj, &ek))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Largest `|AD − FD|` over both torsions, and the same divided by `1 + |FD|`.
fn oracle_gaps(degree: u32, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut abs, mut rel) = (0.0_f64, 0.0_f64);
    for f in 0..10 {
        let n = 2 + f % 3;
        let chart = Chart::numbered("dense", n);
        let entries = (0..n * n).map(|_| random_polynomial(&mut rng, n, degree)).collect();
        let l = OperatorField::new(&chart, entries).unwrap();
        let s: Sample<C64> = SampleSpec::new(10, SEED + f as u64).draw(&chart, &SingularSet::new()).unwrap();
        for p in s.points() {
            let (t, h) = (nijenhuis_torsion(&l, p).unwrap(), haantjes_torsion(&l, p).unwrap());
            let (to, ho) = (oracle::nijenhuis(&l, p.coords()), oracle::haantjes(&l, p.coords()));
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for (ad, fd) in [(t.get(i, j, k), to[j][k][i]), (h.get(i, j, k), ho[j][k][i])] {
                            let gap = (ad - fd).norm();
                            abs = abs.max(gap);
                            rel = rel.max(gap / (1.0 + fd.norm()));
                        }
                    }
                }
            }
        }
    }
    (abs, rel)
}

fn cross_oracle() -> Outcome {
    let (affine, _) = oracle_gaps(1, 10);
    assert!(affine <= 1e-6, "affine fields: {affine:e}");
    let (quad_abs, quad_rel) = oracle_gaps(2, 11);
    assert!(quad_rel <= 1e-6, "quadratic fields: {quad_rel:e}");
    Outcome {
        worst: format!(
            "max |AD - FD| = {affine:.2e} on 10 affine fields; quadratic fields {quad_rel:.2e} relative ({quad_abs:.2e} absolute)"
        ),
    }
}

fn findings() -> Outcome {
    let mut readings = Vec::new();
    for (suite, id) in [("euler", "euler.chain.k3"), ("reduced", "reduced.separation.eigenform-pairing")] {
        let out = Command::new(env!("CARGO_BIN_EXE_haantjes"))
            .args(["verify", "--suite", suite])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        let c = v["checks"].as_array().unwrap().iter().find(|c| c["id"] == id).unwrap_or_else(|| panic!("{id}"));
        let r = c["max_residual"].as_f64().unwrap_or_else(|| panic!("{id} has no residual"));
        assert!(r.is_finite());
        assert!(c["note"].as_str().is_some_and(|s| !s.is_empty()), "{id} has no reading");
        let status = c["status"].as_str().unwrap();
        assert!(status == "pass" || status == "finding", "{id}: {status}");
        readings.push(format!("{id} {status} ({r:.2e})"));
    }
    Outcome { worst: readings.join(", ") }
}

fn main() {
    let ep = report(Suite::EulerPoisson);
    let red = report(Suite::Reduced);
    let criteria: Vec<Criterion> = vec![
        ("diagonal operators are Haantjes", Box::new(diagonal_theorem)),
        ("polynomials in N are Haantjes", Box::new(polynomial_closure)),
        ("Poisson trio and tri-Hamiltonian flow", Box::new(|| poisson_trio(&ep))),
        ("two-Casimir chain", Box::new(|| gz_chain(&ep))),
        ("deformation of P1 by N", Box::new(|| deformation(&red))),
        ("operator identities", Box::new(|| operator_identities(&red))),
        ("Magri-Haantjes chains and involution", Box::new(|| chains(&red, &ep))),
        ("separation chart and leaf chains", Box::new(|| separation(&red))),
        ("RK4 conservation and order", Box::new(dynamics)),
        ("AD torsion against finite differences", Box::new(cross_oracle)),
        ("open readings terminate with a residual", Box::new(findings)),
    ];
    let mut err = std::io::stderr().lock();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f));
        let line = match result {
            Ok(o) => format!("criterion {:>2} PASS  {name}: {}", k + 1, o.worst),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                format!("criterion {:>2} FAIL  {name}: {msg}", k + 1)
            }
        };
        let _ = writeln!(err, "{line}");
    }
    let _ = writeln!(err, "acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
