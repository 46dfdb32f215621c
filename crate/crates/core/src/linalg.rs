//! Pointwise dense linear algebra: norms, skew residuals, numerical rank and
//! minimal polynomials of operator values.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::scalar::Scalar;

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Condition number above which a power sequence is rejected.
pub const MAX_CONDITION: f64 = 1e12;

pub fn max_modulus<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> f64 {
    values.into_iter().map(|v| v.modulus()).fold(0.0, f64::max)
}

/// Largest `|M_ij + M_ji|`.
pub fn skew_residual<S: Scalar>(m: &DMatrix<S>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] + m[(j, i)]).modulus());
        }
    }
    worst
}

/// Largest modulus of `a − b`.
pub fn max_difference<S: Scalar>(a: &DMatrix<S>, b: &DMatrix<S>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (*x - *y).modulus()).fold(0.0, f64::max)
}

pub fn max_difference_vec<S: Scalar>(a: &DVector<S>, b: &DVector<S>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (*x - *y).modulus()).fold(0.0, f64::max)
}

pub fn to_complex_matrix<S: Scalar>(m: &DMatrix<S>) -> DMatrix<Complex64> {
    m.map(|v| v.to_complex())
}

/// Numerical rank of a family of matrices seen as vectors.
pub fn numerical_rank<T>(family: &[DMatrix<T>], rel_tol: f64) -> usize
where
    T: ComplexField<RealField = f64>,
{
    if family.is_empty() {
        return 0;
    }
    let rows = family[0].len();
    let a = DMatrix::from_fn(rows, family.len(), |r, c| family[c].as_slice()[r].clone());
    let sv = a.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * top).count()
}

/// Monic minimal polynomial `λ^d + Σ_{k<d} c_k λ^k` of a matrix value.
#[derive(Clone, Debug)]
pub struct MinimalPolynomial<T> {
    /// `c_0 … c_{d−1}`.
    pub coefficients: Vec<T>,
    /// Frobenius norm of `L^d + Σ c_k L^k`.
    pub residual: f64,
    /// Condition number of the power basis `I, L, …, L^{d−1}`.
    pub condition: f64,
}

impl<T> MinimalPolynomial<T> {
    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }
}

/// Least-squares search for the smallest `d` with
/// `‖L^d + Σ c_k L^k‖ ≤ tol·max(1, ‖L‖)^d`.
pub fn minimal_polynomial<T>(l: &DMatrix<T>, tol: f64) -> Result<MinimalPolynomial<T>>
where
    T: ComplexField<RealField = f64>,
{
    let n = l.nrows();
    if n == 0 || l.ncols() != n {
        return Err(GeomError::DimensionMismatch { expected: n, found: l.ncols() });
    }
    let scale = l.norm().max(1.0);
    let mut powers = vec![DMatrix::<T>::identity(n, n)];
    for d in 1..=n {
        let next = &powers[d - 1] * l;
        let a = DMatrix::from_fn(n * n, d, |r, c| powers[c].as_slice()[r].clone());
        let b = DVector::from_iterator(n * n, next.iter().map(|v| -v.clone()));
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        let c = svd.solve(&b, 0.0).map_err(|_| GeomError::IllConditioned { condition })?;
        let residual = (&a * &c - &b).norm();
        if residual <= tol * scale.powi(d as i32) {
            if condition > MAX_CONDITION {
                return Err(GeomError::IllConditioned { condition });
            }
            return Ok(MinimalPolynomial { coefficients: c.iter().cloned().collect(), residual, condition });
        }
        powers.push(next);
    }
    // Cayley–Hamilton guarantees termination in exact arithmetic.
    Err(GeomError::IllConditioned { condition: f64::INFINITY })
}
