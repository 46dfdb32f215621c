//! The separation chart on a leaf, checked against direct linear algebra.

use haantjes::linalg::max_modulus;
use haantjes::{Field, Sample, SampleSpec, C64, EPS_DERIV, EPS_EXACT};
use haantjes_lagrange::separation::SeparationChart;
use haantjes_lagrange::{
    benenti_operators, nijenhuis_operator, separation_chart, ComplexChartFields, Leaf, LeafFields, MomentumReading,
    NReading, TopParams,
};
use nalgebra::DMatrix;

struct Setup {
    leaf: Leaf,
    lf: LeafFields,
    sample: Sample<C64>,
}

fn setup() -> Setup {
    let params = TopParams::default();
    let fields = ComplexChartFields::new(&params).unwrap();
    let n = nijenhuis_operator(&params, NReading::Corrected).unwrap();
    let k = benenti_operators(&n, &fields).unwrap();
    let leaf = Leaf::new(&params, 1.0, 2.0).unwrap();
    let sample = SampleSpec::new(40, 21).draw(&leaf.chart, &leaf.singular().union(&SeparationChart::singular())).unwrap();
    let lf = LeafFields::new(&leaf, &fields, &n, &k, &sample, EPS_DERIV).unwrap();
    Setup { leaf, lf, sample }
}

fn scaled_gap(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    max_modulus((a - b).iter()) / (1.0 + max_modulus(a.iter()).max(max_modulus(b.iter())))
}

#[test]
fn eigenvalues_are_roots_of_the_characteristic_polynomial() {
    let s = setup();
    let sc = separation_chart(&s.leaf, MomentumReading::Corrected).unwrap();
    for p in s.sample.points() {
        let q = sc.map.apply(p).unwrap();
        let k2 = s.lf.k2.eval(p).unwrap();
        let scale = 1.0 + max_modulus(k2.iter());
        for lam in &q.coords()[..2] {
            let shifted = &k2 - DMatrix::identity(4, 4) * *lam;
            let det = shifted.determinant();
            assert!(det.norm() <= 1e-9 * scale.powi(4), "{det}");
        }
    }
}

#[test]
fn symmetric_functions_of_the_eigenvalues() {
    let s = setup();
    let sc = separation_chart(&s.leaf, MomentumReading::Corrected).unwrap();
    for p in s.sample.points() {
        let x = p.coords();
        let q = sc.map.apply(p).unwrap();
        let (l1, l2) = (q.coords()[0], q.coords()[1]);
        let prod = l1 * l2 + x[1].inv();
        let sum = l1 + l2 - x[0] / x[1];
        let scale = 1.0 + l1.norm().max(l2.norm()).powi(2);
        assert!(prod.norm() <= EPS_EXACT * scale && sum.norm() <= EPS_EXACT * scale, "{prod} {sum}");
    }
}

#[test]
fn pushed_forward_structures_are_canonical_and_diagonal() {
    let s = setup();
    let sc = separation_chart(&s.leaf, MomentumReading::Corrected).unwrap();
    let p1 = sc.map.push_bivector(&s.lf.p1).unwrap();
    let k2 = sc.map.push_operator(&s.lf.k2).unwrap();
    let i = C64::i();
    let z = C64::new(0.0, 0.0);
    let canonical = DMatrix::from_row_slice(4, 4, &[z, z, i, z, z, z, z, i, -i, z, z, z, z, -i, z, z]);
    for p in s.sample.points() {
        let q = sc.map.apply(p).unwrap();
        let (l1, l2) = (q.coords()[0], q.coords()[1]);
        let gp = scaled_gap(&p1.eval(&q).unwrap(), &canonical);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![l2, l1, l2, l1]));
        let gk = scaled_gap(&k2.eval(&q).unwrap(), &diag);
        assert!(gp <= EPS_DERIV && gk <= EPS_DERIV, "{gp:e} {gk:e}");
    }
}

#[test]
fn printed_momenta_are_not_canonical() {
    let s = setup();
    let sc = separation_chart(&s.leaf, MomentumReading::Printed).unwrap();
    let p1 = sc.map.push_bivector(&s.lf.p1).unwrap();
    let worst = s
        .sample
        .points()
        .iter()
        .map(|p| {
            let v = p1.eval(&sc.map.apply(p).unwrap()).unwrap();
            (v[(0, 2)] - C64::i()).norm().max(v[(2, 3)].norm())
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst}");
}
