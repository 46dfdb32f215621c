//! Angular velocity `ω` and vertical direction `γ` in the body frame.

use haantjes::{
    differential, BivectorField, ChainCheck, Chart, Expr, OneFormField, Residual, Sample, Scalar, ScalarField, VectorField,
};

use crate::error::Result;
use crate::params::TopParams;
use crate::util::{vector_gap, vector_norm};
use crate::EULER_POISSON_COORDS;

fn w(i: usize) -> Expr {
    Expr::var(i)
}

fn g(i: usize) -> Expr {
    Expr::var(3 + i)
}

fn zero() -> Expr {
    Expr::zero()
}

/// Assembles a 6×6 matrix from four 3×3 blocks.
fn blocks(ul: [[Expr; 3]; 3], ur: [[Expr; 3]; 3], ll: [[Expr; 3]; 3], lr: [[Expr; 3]; 3]) -> Vec<Vec<Expr>> {
    let mut rows = Vec::with_capacity(6);
    for (left, right) in [(ul, ur), (ll, lr)] {
        for (l, r) in left.into_iter().zip(right) {
            rows.push(l.into_iter().chain(r).collect());
        }
    }
    rows
}

fn zeros3() -> [[Expr; 3]; 3] {
    std::array::from_fn(|_| std::array::from_fn(|_| zero()))
}

fn negate(m: [[Expr; 3]; 3]) -> [[Expr; 3]; 3] {
    m.map(|row| row.map(|e| -e))
}

fn transpose(m: &[[Expr; 3]; 3]) -> [[Expr; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()))
}

/// The Lagrange top on the real chart `(ω, γ)`.
#[derive(Clone, Debug)]
pub struct EulerPoissonFields {
    pub chart: Chart,
    pub params: TopParams,
    /// The equations of motion.
    pub x_l: VectorField,
    pub p0: BivectorField,
    pub p1: BivectorField,
    pub p2: BivectorField,
    pub h0: ScalarField,
    pub h1: ScalarField,
    pub h2: ScalarField,
    /// `ω3`.
    pub f1: ScalarField,
    /// Kinetic energy minus `γ3`.
    pub f2: ScalarField,
    /// `⟨Iω, γ⟩` with `I = diag(1, 1, c)`.
    pub f3: ScalarField,
    /// `|γ|²`.
    pub f4: ScalarField,
    /// `P0 d(F4/2) = P1 d(−F3)`.
    pub x1: VectorField,
    /// `P0 d(−F3) = P1 dF2`.
    pub x2: VectorField,
}

impl EulerPoissonFields {
    pub fn new(params: &TopParams) -> Result<Self> {
        let params = params.validated()?;
        let c = params.c;
        let chart = Chart::new("euler-poisson", &EULER_POISSON_COORDS);
        let one = Expr::one;
        let x_l = VectorField::new(
            &chart,
            vec![
                (1.0 - c) * w(1) * w(2) - g(1),
                -((1.0 - c) * w(2) * w(0)) + g(0),
                zero(),
                g(1) * w(2) - g(2) * w(1),
                g(2) * w(0) - g(0) * w(2),
                g(0) * w(1) - g(1) * w(0),
            ],
        )?;

        let b = [[zero(), -one(), zero()], [one(), zero(), zero()], [zero(), zero(), zero()]];
        let cm = [
            [zero(), c * w(2), -w(1)],
            [-(c * w(2)), zero(), w(0)],
            [w(1), -w(0), zero()],
        ];
        let gamma = [[zero(), g(2), -g(1)], [-g(2), zero(), g(0)], [g(1), -g(0), zero()]];
        let r = [
            [zero(), -g(2), g(1)],
            [g(2), zero(), -g(0)],
            [-(g(1) / c), g(0) / c, zero()],
        ];
        let t = [
            [zero(), -(c * w(2)), w(1) / c],
            [c * w(2), zero(), -(w(0) / c)],
            [-(w(1) / c), w(0) / c, zero()],
        ];
        let p0 = BivectorField::from_rows(&chart, blocks(zeros3(), b.clone(), b.clone(), cm))?;
        let p1 = BivectorField::from_rows(&chart, blocks(negate(b), zeros3(), zeros3(), gamma))?;
        let rt = negate(transpose(&r));
        let p2 = BivectorField::from_rows(&chart, blocks(t, r, rt, zeros3()))?;

        let f1 = ScalarField::new(&chart, w(2))?;
        let f2 = ScalarField::new(&chart, (w(0).powi(2) + w(1).powi(2) + c * w(2).powi(2)) * 0.5 - g(2))?;
        let f3 = ScalarField::new(&chart, w(0) * g(0) + w(1) * g(1) + c * w(2) * g(2))?;
        let f4 = ScalarField::new(&chart, g(0).powi(2) + g(1).powi(2) + g(2).powi(2))?;
        let c1 = params.c1();
        let h0 = ScalarField::new(&chart, f4.expr() * 0.5 + c1 * f1.expr() * f3.expr())?;
        let h1 = ScalarField::new(&chart, -f3.expr() - c1 * f1.expr() * f2.expr())?;
        let h2 = f2.clone();
        let x1 = p0.apply(&differential(&f4.scale(0.5)))?;
        let x2 = p0.apply(&differential(&f3.neg()))?;
        Ok(EulerPoissonFields { chart, params, x_l, p0, p1, p2, h0, h1, h2, f1, f2, f3, f4, x1, x2 })
    }

    pub fn integrals(&self) -> [&ScalarField; 4] {
        [&self.f1, &self.f2, &self.f3, &self.f4]
    }

    pub fn hamiltonians(&self) -> [&ScalarField; 3] {
        [&self.h0, &self.h1, &self.h2]
    }

    pub fn bivectors(&self) -> [&BivectorField; 3] {
        [&self.p0, &self.p1, &self.p2]
    }

    /// `X1 − (c−1)F1 X2`.
    pub fn x_l_from_chain(&self) -> Result<VectorField> {
        Ok(self.x1.sub(&self.x2.scale(&self.f1.scale(self.params.c1()))?)?)
    }

    /// Residuals of `P_i dh_i − X_L` for `i = 0, 1, 2`.
    pub fn tri_hamiltonian_residuals<S: Scalar>(&self, sample: &Sample<S>) -> Result<[Residual; 3]> {
        let mut out = [Residual::zero(sample.len()); 3];
        for (k, (p, h)) in self.bivectors().into_iter().zip(self.hamiltonians()).enumerate() {
            out[k] = vector_gap(&p.apply(&differential(h))?, &self.x_l, sample)?;
        }
        Ok(out)
    }
}

/// The three bivectors, Hamiltonians, integrals and chain fields.
pub fn euler_poisson_fields(params: &TopParams) -> Result<EulerPoissonFields> {
    EulerPoissonFields::new(params)
}

/// Sampled residuals of the bi-Hamiltonian chain of the pencil `P0 − λP1`.
#[derive(Clone, Debug)]
pub struct GzChainReport {
    /// The seven chain identities, in a fixed order.
    pub checks: Vec<ChainCheck>,
    /// `(P0 − λP1) dH(λ)` for `H(λ) = (F4/2)λ² − F3 λ + F2`.
    pub pencil: Vec<(f64, Residual)>,
}

impl GzChainReport {
    pub fn max(&self) -> f64 {
        self.checks.iter().map(|c| c.residual.max).chain(self.pencil.iter().map(|(_, r)| r.max)).fold(0.0, f64::max)
    }
}

fn d(f: &ScalarField) -> OneFormField {
    differential(f)
}

pub const PENCIL_LAMBDAS: [f64; 3] = [0.0, 1.0, 2.0];

/// Evaluates every identity of the two-Casimir chain on `sample`.
pub fn gz_chain_check<S: Scalar>(fields: &EulerPoissonFields, sample: &Sample<S>) -> Result<GzChainReport> {
    let EulerPoissonFields { p0, p1, f1, f2, f3, f4, x_l, .. } = fields;
    let half_f4 = f4.scale(0.5);
    let minus_f3 = f3.neg();
    let zero_gap = |label: &str, v: VectorField| -> Result<ChainCheck> {
        Ok(ChainCheck { label: label.to_string(), residual: vector_norm(&v, sample)? })
    };
    let pair_gap = |label: &str, a: VectorField, b: VectorField| -> Result<ChainCheck> {
        Ok(ChainCheck { label: label.to_string(), residual: vector_gap(&a, &b, sample)? })
    };
    let checks = vec![
        zero_gap("P1 dF1 = 0", p1.apply(&d(f1))?)?,
        zero_gap("P0 dF1 = 0", p0.apply(&d(f1))?)?,
        zero_gap("P1 d(F4/2) = 0", p1.apply(&d(&half_f4))?)?,
        pair_gap("P0 d(F4/2) = P1 d(-F3)", p0.apply(&d(&half_f4))?, p1.apply(&d(&minus_f3))?)?,
        pair_gap("P0 d(-F3) = P1 dF2", p0.apply(&d(&minus_f3))?, p1.apply(&d(f2))?)?,
        zero_gap("P0 dF2 = 0", p0.apply(&d(f2))?)?,
        pair_gap("X_L = X1 - (c-1) F1 X2", x_l.clone(), fields.x_l_from_chain()?)?,
    ];
    let pencil = PENCIL_LAMBDAS
        .iter()
        .map(|&lambda| {
            let h = half_f4.scale(lambda * lambda).add(&f3.scale(-lambda))?.add(f2)?;
            let pencil = p0.sub(&p1.scale_const(lambda))?;
            Ok((lambda, vector_norm(&pencil.apply(&d(&h))?, sample)?))
        })
        .collect::<Result<_>>()?;
    Ok(GzChainReport { checks, pencil })
}

#[cfg(test)]
mod tests {
    use super::*;
    use haantjes::{Field, PoissonStructure, SampleSpec, SingularSet, Tolerances, EPS_DERIV, EPS_EXACT};

    fn fields() -> EulerPoissonFields {
        EulerPoissonFields::new(&TopParams::default()).unwrap()
    }

    #[test]
    fn spec_values() {
        let f = fields();
        let up = f.chart.point(vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(f.x_l.eval(&up).unwrap().iter().all(|v: &f64| *v == 0.0));
        let p = f.chart.point(vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(f.f2.eval(&p).unwrap(), -0.5);
    }

    #[test]
    fn three_poisson_structures() {
        let f = fields();
        let s: Sample<f64> = SampleSpec::new(30, 3).draw(&f.chart, &SingularSet::new()).unwrap();
        for p in f.bivectors() {
            assert!(PoissonStructure::verify(p, &s, Tolerances::default()).unwrap().is_poisson());
        }
        for r in f.tri_hamiltonian_residuals(&s).unwrap() {
            assert!(r.within(EPS_DERIV));
        }
    }

    #[test]
    fn chain_identities() {
        let f = fields();
        let s: Sample<f64> = SampleSpec::new(30, 4).draw(&f.chart, &SingularSet::new()).unwrap();
        let report = gz_chain_check(&f, &s).unwrap();
        assert_eq!(report.checks.len(), 7);
        assert!(report.max() <= EPS_DERIV);
        assert!(report.checks[6].residual.within(EPS_EXACT));
    }

    #[test]
    fn symmetric_case_decouples_x_l() {
        let f = EulerPoissonFields::new(&TopParams::with_c(1.0).unwrap()).unwrap();
        let s: Sample<f64> = SampleSpec::new(10, 5).draw(&f.chart, &SingularSet::new()).unwrap();
        assert_eq!(vector_gap(&f.x_l, &f.x1, &s).unwrap().max, 0.0);
    }
}
