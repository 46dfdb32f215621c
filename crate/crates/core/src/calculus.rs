//! Differential operations on fields and smooth coordinate changes.

use nalgebra::DMatrix;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::field::{BivectorField, Field, MatrixField, OneFormField, OperatorField, ScalarField, SingularSet, VectorField};
use crate::scalar::Scalar;

/// `∂(components)/∂x^k` at `p`, shaped like the field value.
pub fn partial_derivative<F: Field, S: Scalar>(f: &F, p: &ChartPoint<S>, k: usize) -> Result<F::Value<S>> {
    f.partial(p, k)
}

/// `[X,Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.chart().ensure_same(y.chart())?;
    let n = x.chart().dim();
    let comps = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| x.component(j) * y.component(i).diff(j) - y.component(j) * x.component(i).diff(j))
                .sum()
        })
        .collect();
    Ok(VectorField::from_parts(x.chart(), comps, x.singular().union(y.singular())))
}

/// `(df)_i = ∂_i f`.
pub fn differential(f: &ScalarField) -> OneFormField {
    let n = f.chart().dim();
    OneFormField::from_parts(f.chart(), (0..n).map(|i| f.expr().diff(i)).collect(), f.singular().clone())
}

/// `(dα)_{ij} = ∂_i α_j − ∂_j α_i` at `p`.
pub fn exterior_derivative<S: Scalar>(alpha: &OneFormField, p: &ChartPoint<S>) -> Result<DMatrix<S>> {
    let jet = alpha.jet(p)?;
    let n = alpha.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| jet.partials[i][j] - jet.partials[j][i]))
}

/// A coordinate change `y = φ(x)` between two charts of equal dimension,
/// given together with its inverse `x = φ⁻¹(y)`.
#[derive(Clone, Debug)]
pub struct CoordinateMap {
    source: Chart,
    target: Chart,
    forward: Vec<Expr>,
    inverse: Vec<Expr>,
    /// `∂y^a/∂x^i` in source coordinates, row-major.
    jacobian: Vec<Expr>,
    /// `∂x^i/∂y^a` in target coordinates, row-major.
    inverse_jacobian: Vec<Expr>,
    source_singular: SingularSet,
    target_singular: SingularSet,
}

impl CoordinateMap {
    pub fn new(source: &Chart, target: &Chart, forward: Vec<Expr>, inverse: Vec<Expr>) -> Result<Self> {
        let n = source.dim();
        if target.dim() != n {
            return Err(GeomError::DimensionMismatch { expected: n, found: target.dim() });
        }
        for (exprs, chart) in [(&forward, source), (&inverse, target)] {
            if exprs.len() != n {
                return Err(GeomError::DimensionMismatch { expected: n, found: exprs.len() });
            }
            if let Some(i) = exprs.iter().filter_map(Expr::max_var).max() {
                if i >= chart.dim() {
                    return Err(GeomError::IndexOutOfRange { index: i, dim: chart.dim() });
                }
            }
        }
        let jacobian = (0..n * n).map(|k| forward[k / n].diff(k % n)).collect();
        let inverse_jacobian = (0..n * n).map(|k| inverse[k / n].diff(k % n)).collect();
        Ok(CoordinateMap {
            source: source.clone(),
            target: target.clone(),
            forward,
            inverse,
            jacobian,
            inverse_jacobian,
            source_singular: SingularSet::new(),
            target_singular: SingularSet::new(),
        })
    }

    /// Declares where the forward map (in source coordinates) is undefined.
    pub fn with_source_singular(mut self, set: SingularSet) -> Self {
        self.source_singular = set;
        self
    }

    /// Declares where the inverse map (in target coordinates) is undefined.
    pub fn with_target_singular(mut self, set: SingularSet) -> Self {
        self.target_singular = set;
        self
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn forward_exprs(&self) -> &[Expr] {
        &self.forward
    }

    pub fn inverse_exprs(&self) -> &[Expr] {
        &self.inverse
    }

    pub fn target_singular(&self) -> &SingularSet {
        &self.target_singular
    }

    pub fn apply<S: Scalar>(&self, p: &ChartPoint<S>) -> Result<ChartPoint<S>> {
        self.source.ensure_same(p.chart())?;
        if self.source_singular.contains(p.coords()) {
            return Err(GeomError::Singular);
        }
        let y = self.forward.iter().map(|e| e.eval(p.coords())).collect::<Result<Vec<_>>>()?;
        self.target.point(y)
    }

    pub fn apply_inverse<S: Scalar>(&self, q: &ChartPoint<S>) -> Result<ChartPoint<S>> {
        self.target.ensure_same(q.chart())?;
        if self.target_singular.contains(q.coords()) {
            return Err(GeomError::Singular);
        }
        let x = self.inverse.iter().map(|e| e.eval(q.coords())).collect::<Result<Vec<_>>>()?;
        self.source.point(x)
    }

    /// The same change of coordinates read from target to source.
    pub fn inverted(&self) -> CoordinateMap {
        CoordinateMap {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            jacobian: self.inverse_jacobian.clone(),
            inverse_jacobian: self.jacobian.clone(),
            source_singular: self.target_singular.clone(),
            target_singular: self.source_singular.clone(),
        }
    }

    /// Jacobian `∂y/∂x` evaluated at a source point.
    pub fn jacobian_at<S: Scalar>(&self, p: &ChartPoint<S>) -> Result<DMatrix<S>> {
        self.source.ensure_same(p.chart())?;
        let n = self.source.dim();
        let v = self.jacobian.iter().map(|e| e.eval(p.coords())).collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(n, n, &v))
    }

    fn to_target(&self, e: &Expr) -> Expr {
        e.substitute(&self.inverse)
    }

    fn pushed_singular(&self, set: &SingularSet) -> SingularSet {
        set.substitute(&self.inverse).union(&self.target_singular)
    }

    fn jac(&self, a: usize, i: usize) -> &Expr {
        &self.jacobian[a * self.source.dim() + i]
    }

    fn inv_jac(&self, i: usize, a: usize) -> &Expr {
        &self.inverse_jacobian[i * self.source.dim() + a]
    }

    /// `f ∘ φ⁻¹`.
    pub fn push_scalar(&self, f: &ScalarField) -> Result<ScalarField> {
        self.source.ensure_same(f.chart())?;
        Ok(ScalarField::new(&self.target, self.to_target(f.expr()))?.with_singular_set(&self.pushed_singular(f.singular())))
    }

    /// `(φ_*X)^a = ∂y^a/∂x^i X^i`.
    pub fn push_vector(&self, x: &VectorField) -> Result<VectorField> {
        self.source.ensure_same(x.chart())?;
        let n = self.source.dim();
        let comps = (0..n).map(|a| self.to_target(&(0..n).map(|i| self.jac(a, i) * x.component(i)).sum())).collect();
        Ok(VectorField::new(&self.target, comps)?.with_singular_set(&self.pushed_singular(x.singular())))
    }

    /// `(φ_*α)_a = α_i ∂x^i/∂y^a`, the form expressed in target coordinates.
    pub fn push_oneform(&self, alpha: &OneFormField) -> Result<OneFormField> {
        self.source.ensure_same(alpha.chart())?;
        let n = self.source.dim();
        let comps = (0..n)
            .map(|a| (0..n).map(|i| self.to_target(alpha.component(i)) * self.inv_jac(i, a)).sum())
            .collect();
        Ok(OneFormField::new(&self.target, comps)?.with_singular_set(&self.pushed_singular(alpha.singular())))
    }

    /// `J P Jᵀ`.
    pub fn push_bivector(&self, p: &BivectorField) -> Result<BivectorField> {
        self.source.ensure_same(p.chart())?;
        let n = self.source.dim();
        let comps = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                let mut terms = Vec::new();
                for i in 0..n {
                    if self.jac(a, i).is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        if !p.entry(i, j).is_zero() && !self.jac(b, j).is_zero() {
                            terms.push(self.jac(a, i) * p.entry(i, j) * self.jac(b, j));
                        }
                    }
                }
                self.to_target(&terms.into_iter().sum())
            })
            .collect();
        Ok(BivectorField::new(&self.target, comps)?.with_singular_set(&self.pushed_singular(p.singular())))
    }

    /// `J N J⁻¹`.
    pub fn push_operator(&self, l: &OperatorField) -> Result<OperatorField> {
        self.source.ensure_same(l.chart())?;
        let n = self.source.dim();
        // J N in target coordinates, then multiply by ∂x/∂y.
        let jn: Vec<Expr> = (0..n * n)
            .map(|k| {
                let (a, j) = (k / n, k % n);
                self.to_target(&(0..n).map(|i| self.jac(a, i) * l.entry(i, j)).sum())
            })
            .collect();
        let comps = (0..n * n)
            .map(|k| {
                let (a, b) = (k / n, k % n);
                (0..n).map(|j| &jn[a * n + j] * self.inv_jac(j, b)).sum()
            })
            .collect();
        Ok(OperatorField::new(&self.target, comps)?.with_singular_set(&self.pushed_singular(l.singular())))
    }

    /// Re-expresses a matrix-shaped field by substitution only (no tensor factors).
    pub fn substitute_matrix(&self, m: &MatrixField) -> Result<MatrixField> {
        self.source.ensure_same(m.chart())?;
        Ok(m.map_exprs(&self.target, |e| self.to_target(e)).with_singular_set(&self.pushed_singular(m.singular())))
    }
}
