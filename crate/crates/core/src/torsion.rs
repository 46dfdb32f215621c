//! Nijenhuis and Haantjes torsions of operator fields.

use nalgebra::{DMatrix, DVector};

use crate::calculus::lie_bracket;
use crate::chart::ChartPoint;
use crate::check::{sampled_scaled, Residual};
use crate::error::Result;
use crate::field::{Field, OperatorField, VectorField};
use crate::linalg::max_modulus;
use crate::sample::Sample;
use crate::scalar::Scalar;

/// A (1,2)-tensor `T^i_{jk}` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionValue<S> {
    point: ChartPoint<S>,
    n: usize,
    components: Vec<S>,
    scale: f64,
}

impl<S: Scalar> TorsionValue<S> {
    fn from_fn(point: &ChartPoint<S>, scale: f64, f: impl Fn(usize, usize, usize) -> S) -> Self {
        let n = point.dim();
        let mut components = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    components.push(f(i, j, k));
                }
            }
        }
        TorsionValue { point: point.clone(), n, components, scale }
    }

    pub fn point(&self) -> &ChartPoint<S> {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `T^i_{jk}`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> S {
        self.components[(i * self.n + j) * self.n + k]
    }

    /// Components ordered by `(i, j, k)`.
    pub fn components(&self) -> &[S] {
        &self.components
    }

    /// The vector `T(∂_j, ∂_k)`.
    pub fn on_frames(&self, j: usize, k: usize) -> DVector<S> {
        DVector::from_fn(self.n, |i, _| self.get(i, j, k))
    }

    /// Size of the individual terms, `|L|·|∂L|` for the Nijenhuis torsion
    /// and `|L|³·|∂L|` for the Haantjes torsion (max-modulus norms).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn max_norm(&self) -> f64 {
        self.components.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// Largest `|T^i_{jk} + T^i_{kj}|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    worst = worst.max((self.get(i, j, k) + self.get(i, k, j)).modulus());
                }
            }
        }
        worst
    }

    pub fn max_difference(&self, other: &TorsionValue<S>) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| (*a - *b).modulus()).fold(0.0, f64::max)
    }
}

/// Nijenhuis torsion from `L` and its partials `dl[a] = ∂_a L` at a point.
pub fn nijenhuis_components<S: Scalar>(l: &DMatrix<S>, dl: &[DMatrix<S>]) -> Vec<S> {
    let n = l.nrows();
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut t = S::zero();
                for a in 0..n {
                    t += dl[a][(i, k)] * l[(a, j)] - dl[a][(i, j)] * l[(a, k)]
                        + (dl[k][(a, j)] - dl[j][(a, k)]) * l[(i, a)];
                }
                out.push(t);
            }
        }
    }
    out
}

/// Haantjes torsion from `L` and its Nijenhuis torsion (indexed as in
/// [`TorsionValue::components`]).
pub fn haantjes_components<S: Scalar>(l: &DMatrix<S>, t: &[S]) -> Vec<S> {
    let n = l.nrows();
    let tt = |i: usize, j: usize, k: usize| t[(i * n + j) * n + k];
    let l2 = l * l;
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut h = S::zero();
                for a in 0..n {
                    h += l2[(i, a)] * tt(a, j, k);
                    let mut inner = S::zero();
                    for b in 0..n {
                        h += tt(i, a, b) * l[(a, j)] * l[(b, k)];
                        inner += tt(a, b, k) * l[(b, j)] + tt(a, j, b) * l[(b, k)];
                    }
                    h -= l[(i, a)] * inner;
                }
                out.push(h);
            }
        }
    }
    out
}

fn value_and_partials<S: Scalar>(l: &OperatorField, p: &ChartPoint<S>) -> Result<(DMatrix<S>, Vec<DMatrix<S>>)> {
    let n = l.dim();
    let jet = l.jet(p)?;
    let dl = (0..n).map(|a| jet.partial_matrix(n, a)).collect();
    Ok((jet.value_matrix(n), dl))
}

fn term_scale<S: Scalar>(v: &DMatrix<S>, dl: &[DMatrix<S>], power: i32) -> f64 {
    let lv = max_modulus(v.iter());
    let dv = dl.iter().map(|m| max_modulus(m.iter())).fold(0.0, f64::max);
    lv.powi(power) * dv
}

/// `(𝒯_L)^i_{jk}` at `p` from the local coordinate formula.
pub fn nijenhuis_torsion<S: Scalar>(l: &OperatorField, p: &ChartPoint<S>) -> Result<TorsionValue<S>> {
    let (v, dl) = value_and_partials(l, p)?;
    let t = nijenhuis_components(&v, &dl);
    Ok(TorsionValue { point: p.clone(), n: v.nrows(), components: t, scale: term_scale(&v, &dl, 1) })
}

/// `(ℋ_L)^i_{jk}` at `p`; needs only first derivatives of `L`.
pub fn haantjes_torsion<S: Scalar>(l: &OperatorField, p: &ChartPoint<S>) -> Result<TorsionValue<S>> {
    let (v, dl) = value_and_partials(l, p)?;
    let t = nijenhuis_components(&v, &dl);
    let h = haantjes_components(&v, &t);
    Ok(TorsionValue { point: p.clone(), n: v.nrows(), components: h, scale: term_scale(&v, &dl, 3) })
}

/// `𝒯_L(X,Y) = [LX,LY] − L([LX,Y] + [X,LY]) + L²[X,Y]` as a field.
pub fn nijenhuis_on(l: &OperatorField, x: &VectorField, y: &VectorField) -> Result<VectorField> {
    let lx = l.apply(x)?;
    let ly = l.apply(y)?;
    let mixed = lie_bracket(&lx, y)?.add(&lie_bracket(x, &ly)?)?;
    lie_bracket(&lx, &ly)?.sub(&l.apply(&mixed)?)?.add(&l.apply(&l.apply(&lie_bracket(x, y)?)?)?)
}

/// `ℋ_L(X,Y) = L²𝒯(X,Y) + 𝒯(LX,LY) − L(𝒯(X,LY) + 𝒯(LX,Y))` as a field.
pub fn haantjes_on(l: &OperatorField, x: &VectorField, y: &VectorField) -> Result<VectorField> {
    let lx = l.apply(x)?;
    let ly = l.apply(y)?;
    let t = nijenhuis_on(l, x, y)?;
    let cross = nijenhuis_on(l, x, &ly)?.add(&nijenhuis_on(l, &lx, y)?)?;
    l.apply(&l.apply(&t)?)?.add(&nijenhuis_on(l, &lx, &ly)?)?.sub(&l.apply(&cross)?)
}

/// A torsion assembled from Lie brackets of coordinate frames, built once
/// as `n²` vector fields `T(∂_j, ∂_k)` and evaluated pointwise.
#[derive(Clone, Debug)]
pub struct BracketTorsion {
    n: usize,
    fields: Vec<VectorField>,
    operator: OperatorField,
    power: i32,
}

impl BracketTorsion {
    fn build(
        l: &OperatorField,
        power: i32,
        f: impl Fn(&OperatorField, &VectorField, &VectorField) -> Result<VectorField>,
    ) -> Result<Self> {
        let n = l.dim();
        let mut fields = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                fields.push(f(l, &VectorField::frame(l.chart(), j)?, &VectorField::frame(l.chart(), k)?)?);
            }
        }
        Ok(BracketTorsion { n, fields, operator: l.clone(), power })
    }

    pub fn nijenhuis(l: &OperatorField) -> Result<Self> {
        BracketTorsion::build(l, 1, nijenhuis_on)
    }

    pub fn haantjes(l: &OperatorField) -> Result<Self> {
        BracketTorsion::build(l, 3, haantjes_on)
    }

    pub fn eval<S: Scalar>(&self, p: &ChartPoint<S>) -> Result<TorsionValue<S>> {
        let n = self.n;
        let cols = self.fields.iter().map(|f| f.eval(p)).collect::<Result<Vec<_>>>()?;
        let (v, dl) = value_and_partials(&self.operator, p)?;
        Ok(TorsionValue::from_fn(p, term_scale(&v, &dl, self.power), |i, j, k| cols[j * n + k][i]))
    }
}

/// Nijenhuis torsion through Lie brackets of coordinate frames.
pub fn nijenhuis_torsion_by_brackets<S: Scalar>(l: &OperatorField, p: &ChartPoint<S>) -> Result<TorsionValue<S>> {
    BracketTorsion::nijenhuis(l)?.eval(p)
}

/// Haantjes torsion through Lie brackets of coordinate frames.
pub fn haantjes_torsion_by_brackets<S: Scalar>(l: &OperatorField, p: &ChartPoint<S>) -> Result<TorsionValue<S>> {
    BracketTorsion::haantjes(l)?.eval(p)
}

/// Outcome of a sampled vanishing test. The torsion vanishes when
/// `|T(p)| ≤ tol·(1 + s(p))` at every point, `s` being
/// [`TorsionValue::scale`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionCheck {
    pub vanishes: bool,
    pub residual: Residual,
    pub tolerance: f64,
}

fn check<S: Scalar>(
    sample: &Sample<S>,
    tol: f64,
    f: impl Fn(&ChartPoint<S>) -> Result<TorsionValue<S>> + Sync + Send,
) -> Result<TorsionCheck> {
    let residual = sampled_scaled(sample, |p| {
        let t = f(p)?;
        Ok((t.max_norm(), t.scale()))
    })?;
    Ok(TorsionCheck { vanishes: residual.within_scaled(tol), residual, tolerance: tol })
}

/// Max-norm Nijenhuis torsion over the sample against `tol`.
pub fn is_nijenhuis<S: Scalar>(l: &OperatorField, sample: &Sample<S>, tol: f64) -> Result<TorsionCheck> {
    check(sample, tol, |p| nijenhuis_torsion(l, p))
}

/// Max-norm Haantjes torsion over the sample against `tol`.
pub fn is_haantjes<S: Scalar>(l: &OperatorField, sample: &Sample<S>, tol: f64) -> Result<TorsionCheck> {
    check(sample, tol, |p| haantjes_torsion(l, p))
}
