//! Sampled residuals and tolerances.

use rayon::prelude::*;

use crate::chart::ChartPoint;
use crate::error::{GeomError, Result};
use crate::sample::Sample;
use crate::scalar::Scalar;

pub const EPS_EXACT: f64 = 1e-12;
pub const EPS_DERIV: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Derivative-free algebraic identities.
    pub exact: f64,
    /// Identities involving first derivatives.
    pub deriv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { exact: EPS_EXACT, deriv: EPS_DERIV }
    }
}

/// The worst pointwise residual of an identity over a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub max: f64,
    pub points: usize,
    /// Index of the point attaining `max`.
    pub worst: usize,
    /// Largest input magnitude seen, for scale-aware comparisons.
    pub scale: f64,
    /// Largest pointwise `r / (1 + s)` with `s` the magnitude at that point.
    pub relative: f64,
}

impl Residual {
    pub fn zero(points: usize) -> Self {
        Residual { max: 0.0, points, worst: 0, scale: 0.0, relative: 0.0 }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max <= tol
    }

    /// `r ≤ tol·(1 + s)` at every point.
    pub fn within_scaled(&self, tol: f64) -> bool {
        self.relative <= tol
    }

    pub fn scaled_tolerance(&self, tol: f64) -> f64 {
        tol * (1.0 + self.scale)
    }

    /// Pointwise maximum of two residuals over the same sample.
    pub fn combine(self, other: Residual) -> Residual {
        let (max, worst) = if other.max > self.max { (other.max, other.worst) } else { (self.max, self.worst) };
        Residual {
            max,
            worst,
            points: self.points.max(other.points),
            scale: self.scale.max(other.scale),
            relative: self.relative.max(other.relative),
        }
    }
}

/// Evaluates `f` at every sample point in parallel and reduces in sample
/// order, so the result does not depend on scheduling. A NaN residual is
/// reported as non-finite.
pub fn sampled<S, F>(sample: &Sample<S>, f: F) -> Result<Residual>
where
    S: Scalar,
    F: Fn(&ChartPoint<S>) -> Result<f64> + Sync + Send,
{
    sampled_scaled(sample, |p| Ok((f(p)?, 0.0)))
}

/// As [`sampled`], with `f` also returning a per-point magnitude.
pub fn sampled_scaled<S, F>(sample: &Sample<S>, f: F) -> Result<Residual>
where
    S: Scalar,
    F: Fn(&ChartPoint<S>) -> Result<(f64, f64)> + Sync + Send,
{
    if sample.is_empty() {
        return Err(GeomError::EmptySample);
    }
    let values: Vec<(f64, f64)> = sample.points().par_iter().map(&f).collect::<Result<_>>()?;
    let mut out = Residual::zero(values.len());
    for (k, (r, s)) in values.into_iter().enumerate() {
        if r.is_nan() {
            return Err(GeomError::NonFinite);
        }
        if r > out.max {
            out.max = r;
            out.worst = k;
        }
        out.scale = out.scale.max(s);
        out.relative = out.relative.max(r / (1.0 + s));
    }
    Ok(out)
}

/// Evaluates `f` at every point, in order, in parallel.
pub fn map_points<S, T, F>(sample: &Sample<S>, f: F) -> Result<Vec<T>>
where
    S: Scalar,
    T: Send,
    F: Fn(&ChartPoint<S>) -> Result<T> + Sync + Send,
{
    sample.points().par_iter().map(f).collect()
}
