//! Euler angles `(φ, θ, ψ)` and conjugate momenta.

use haantjes::{
    build_chain_oneforms, differential, Chart, ChartPoint, Expr, Field, HaantjesAlgebra, MagriChain, OperatorField, Residual,
    Sample, Scalar, ScalarField, SingularSet,
};

use crate::error::Result;
use crate::params::TopParams;
use crate::EULER_COORDS;

const THETA: usize = 1;
const P_PHI: usize = 3;
const P_THETA: usize = 4;
const P_PSI: usize = 5;

fn v(i: usize) -> Expr {
    Expr::var(i)
}

/// `p_φ − p_ψ cos θ`.
fn twist() -> Expr {
    v(P_PHI) - v(P_PSI) * v(THETA).cos()
}

/// The Euler chart with the Hamiltonian and the two momenta it commutes with.
#[derive(Clone, Debug)]
pub struct EulerChart {
    pub chart: Chart,
    pub params: TopParams,
    /// `H`, singular where `sin θ = 0`.
    pub h: ScalarField,
    /// `H_2 = p_φ`.
    pub h2: ScalarField,
    /// `H_3 = p_ψ`.
    pub h3: ScalarField,
}

impl EulerChart {
    pub fn new(params: &TopParams) -> Result<Self> {
        let params = params.validated()?;
        let chart = Chart::new("euler", &EULER_COORDS);
        let sin = v(THETA).sin();
        let kinetic = v(P_THETA).powi(2) + twist().powi(2) / sin.powi(2) + v(P_PSI).powi(2) / params.c;
        let h = kinetic / (2.0 * params.a) + params.mu_ga() * v(THETA).cos();
        Ok(EulerChart {
            h: ScalarField::new(&chart, h)?.with_singular(sin),
            h2: ScalarField::coordinate(&chart, P_PHI)?,
            h3: ScalarField::coordinate(&chart, P_PSI)?,
            chart,
            params,
        })
    }

    /// Where the Hamiltonian or the chain operators are undefined.
    pub fn singular(&self) -> SingularSet {
        SingularSet::zero_of(v(THETA).sin()).with(twist()).with(v(THETA).cos())
    }
}

/// `H` at a point of the Euler chart.
pub fn euler_hamiltonian<S: Scalar>(state: &ChartPoint<S>, params: &TopParams) -> Result<S> {
    let chart = EulerChart::new(params)?;
    Ok(chart.h.eval(&chart.chart.point(state.coords().to_vec())?)?)
}

/// `K1 = I` and the diagonal operators `K2`, `K3`.
#[derive(Clone, Debug)]
pub struct EulerChain {
    pub k1: OperatorField,
    pub k2: OperatorField,
    pub k3: OperatorField,
}

/// The diagonal Haantjes family of the Euler chart.
pub fn euler_chain_operators(params: &TopParams) -> Result<EulerChain> {
    let ec = EulerChart::new(params)?;
    let chart = &ec.chart;
    let sin2 = v(THETA).sin().powi(2);
    let f2 = params.a * &sin2 / twist();
    let f3 = -(params.a * &sin2 / (v(THETA).cos() * twist()));
    let diag = |k: [usize; 2], f: Expr| -> Result<OperatorField> {
        let d = (0..6).map(|i| if k.contains(&i) { f.clone() } else { Expr::zero() }).collect();
        Ok(OperatorField::diagonal(chart, d)?)
    };
    Ok(EulerChain {
        k1: OperatorField::identity(chart),
        k2: diag([0, P_PHI], f2)?.with_singular(twist()),
        k3: diag([THETA, P_THETA], f3)?.with_singular(twist()).with_singular(v(THETA).cos()),
    })
}

impl EulerChain {
    pub fn algebra(&self) -> Result<HaantjesAlgebra> {
        Ok(HaantjesAlgebra::new(vec![self.k1.clone(), self.k2.clone(), self.k3.clone()])?)
    }

    /// The one-form chain `K_iᵀ dH` with closedness residuals.
    pub fn chain<S: Scalar>(&self, ec: &EulerChart, sample: &Sample<S>, tol: f64) -> Result<MagriChain> {
        Ok(build_chain_oneforms(&self.algebra()?, &ec.h, sample, tol)?)
    }

    /// Residuals of `K_iᵀ dH − dH_i` for `(H, p_φ, p_ψ)`.
    pub fn potential_residuals<S: Scalar>(&self, ec: &EulerChart, sample: &Sample<S>, tol: f64) -> Result<Vec<Residual>> {
        let chain = self.chain(ec, sample, tol)?;
        Ok(chain.potential_residuals(&[ec.h.clone(), ec.h2.clone(), ec.h3.clone()], sample)?)
    }

    /// `K3ᵀ dH` and `dp_ψ` side by side at `p`.
    pub fn k3_sides<S: Scalar>(&self, ec: &EulerChart, p: &ChartPoint<S>) -> Result<(Vec<S>, Vec<S>)> {
        let lhs = self.k3.apply_transpose(&differential(&ec.h))?.eval(p)?;
        let rhs = differential(&ec.h3).eval(p)?;
        Ok((lhs.iter().copied().collect(), rhs.iter().copied().collect()))
    }
}
