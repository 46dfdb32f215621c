//! Separation variables `(λ1, λ2, μ1, μ2)` on a leaf.

use haantjes::check::sampled;
use haantjes::linalg::max_difference_vec;
use haantjes::{differential, Chart, CoordinateMap, Expr, Field, OperatorField, Residual, Sample, ScalarField, SingularSet, C64};

use crate::complex::{X1, X2};
use crate::error::Result;
use crate::leaf::Leaf;
use crate::SEPARATION_COORDS;

/// Samples closer than this to the branch cut `x1² + 4x2 = 0` are rejected.
pub const BRANCH_MARGIN: f64 = 1e-6;

const Y1: usize = 2;
const Y2: usize = 3;

fn v(i: usize) -> Expr {
    Expr::var(i)
}

/// Which closed form defines the momenta.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MomentumReading {
    /// `μ_k = (λ_k y2 − y1)/λ_k²`, conjugate to `λ_k` under `P̌1`.
    #[default]
    Corrected,
    /// `μ1 = (λ2 y1 + y2)/λ1`, `μ2 = (λ1 y1 + y2)/λ2`.
    Printed,
}

impl MomentumReading {
    pub fn label(&self) -> &'static str {
        match self {
            MomentumReading::Corrected => "corrected",
            MomentumReading::Printed => "printed",
        }
    }
}

/// `(λ1, λ2)` in leaf coordinates; `λ1` takes the minus branch of the
/// principal square root.
pub fn eigenvalue_exprs() -> [Expr; 2] {
    let root = (v(X1).powi(2) + 4.0 * v(X2)).sqrt();
    let den = 2.0 * v(X2);
    [(v(X1) - &root) / &den, (v(X1) + root) / den]
}

/// The chart change from a leaf to `(λ1, λ2, μ1, μ2)`.
#[derive(Clone, Debug)]
pub struct SeparationChart {
    pub map: CoordinateMap,
    pub reading: MomentumReading,
}

impl SeparationChart {
    pub fn chart(&self) -> &Chart {
        self.map.target()
    }

    /// `x2 = 0` and a thin band around the branch cut.
    pub fn singular() -> SingularSet {
        SingularSet::zero_of(v(X2)).with_margin(v(X1).powi(2) + 4.0 * v(X2), BRANCH_MARGIN)
    }

    /// `λ1, λ2, μ1, μ2` as scalar fields on the leaf.
    pub fn coordinates(&self, leaf: &Leaf) -> Result<Vec<ScalarField>> {
        self.map
            .forward_exprs()
            .iter()
            .map(|e| Ok(ScalarField::new(&leaf.chart, e.clone())?.with_singular_set(&Self::singular())))
            .collect()
    }
}

/// Builds the separation chart on `leaf` with the given momenta.
pub fn separation_chart(leaf: &Leaf, reading: MomentumReading) -> Result<SeparationChart> {
    let [l1, l2] = eigenvalue_exprs();
    let (y1, y2) = (v(Y1), v(Y2));
    let (m1, m2) = match reading {
        MomentumReading::Corrected => ((&l1 * &y2 - &y1) / l1.powi(2), (&l2 * &y2 - &y1) / l2.powi(2)),
        MomentumReading::Printed => ((&l2 * &y1 + &y2) / &l1, (&l1 * &y1 + &y2) / &l2),
    };
    let (a, b, p, q) = (v(0), v(1), v(2), v(3));
    let x2 = -(&a * &b).recip();
    let x1 = (&a + &b) * &x2;
    let (iy1, iy2) = match reading {
        MomentumReading::Corrected => {
            let y2 = (&p * a.powi(2) - &q * b.powi(2)) / (&a - &b);
            (&a * &y2 - &p * a.powi(2), y2)
        }
        MomentumReading::Printed => {
            let y1 = (&p * &a - &q * &b) / (&b - &a);
            (y1.clone(), &p * &a - &b * y1)
        }
    };
    let target = Chart::new(format!("separation-{}", reading.label()), &SEPARATION_COORDS);
    let map = CoordinateMap::new(&leaf.chart, &target, vec![l1, l2, m1, m2], vec![x1, x2, iy1, iy2])?
        .with_source_singular(SeparationChart::singular())
        .with_target_singular(SingularSet::zero_of(v(0)).with(v(1)).with(v(0) - v(1)));
    Ok(SeparationChart { map, reading })
}

/// Residuals of `Ǩ2ᵀ df − λ_j df` for each separation coordinate `f` and
/// each eigenvalue `λ_j`.
#[derive(Clone, Debug)]
pub struct PairingReport {
    /// `residuals[f][j]` for `f ∈ (λ1, λ2, μ1, μ2)`, `j ∈ (1, 2)`.
    pub residuals: [[Residual; 2]; 4],
}

impl PairingReport {
    /// Index `j` of the eigenvalue paired with coordinate `f`, by smaller residual.
    pub fn paired(&self, f: usize) -> usize {
        if self.residuals[f][0].max <= self.residuals[f][1].max {
            0
        } else {
            1
        }
    }

    /// Residual of the best pairing for coordinate `f`.
    pub fn best(&self, f: usize) -> Residual {
        self.residuals[f][self.paired(f)]
    }

    /// Worst best-pairing residual over all four coordinates.
    pub fn max(&self) -> f64 {
        (0..4).map(|f| self.best(f).max).fold(0.0, f64::max)
    }

    /// Human-readable pairing, e.g. `K2^T dl1 = l2 dl1`.
    pub fn reading(&self) -> String {
        (0..4)
            .map(|f| format!("K2^T d{} = l{} d{}", SEPARATION_COORDS[f], self.paired(f) + 1, SEPARATION_COORDS[f]))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Which eigenvalue each separation coordinate's gradient is an eigenform for.
pub fn eigenform_pairing(k2: &OperatorField, chart: &SeparationChart, leaf: &Leaf, sample: &Sample<C64>) -> Result<PairingReport> {
    let coords = chart.coordinates(leaf)?;
    let lambdas = [coords[0].clone(), coords[1].clone()];
    let mut residuals = [[Residual::zero(sample.len()); 2]; 4];
    for (f, field) in coords.iter().enumerate() {
        let df = differential(field);
        let lhs = k2.apply_transpose(&df)?;
        for (j, lam) in lambdas.iter().enumerate() {
            residuals[f][j] = sampled(sample, |p| {
                let l = lam.eval(p)?;
                Ok(max_difference_vec(&lhs.eval(p)?, &(df.eval(p)? * l)))
            })?;
        }
    }
    Ok(PairingReport { residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::TopParams;
    use haantjes::{SampleSpec, EPS_DERIV};

    fn leaf() -> Leaf {
        Leaf::new(&TopParams::default(), 1.0, 2.0).unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn eigenvalues_at_unit_x2() {
        let l = leaf();
        let sc = separation_chart(&l, MomentumReading::Corrected).unwrap();
        let p = l.chart.point(vec![c(0.0), c(1.0), c(0.5), c(-0.5)]).unwrap();
        let q = sc.map.apply(&p).unwrap();
        assert_eq!(q.coords()[0], c(-1.0));
        assert_eq!(q.coords()[1], c(1.0));
    }

    #[test]
    fn round_trip_both_readings() {
        let l = leaf();
        let spec = SampleSpec::new(40, 12);
        let s: Sample<C64> = spec.draw(&l.chart, &l.singular().union(&SeparationChart::singular())).unwrap();
        for reading in [MomentumReading::Corrected, MomentumReading::Printed] {
            let sc = separation_chart(&l, reading).unwrap();
            for p in s.points() {
                let back = sc.map.apply_inverse(&sc.map.apply(p).unwrap()).unwrap();
                for (a, b) in back.coords().iter().zip(p.coords()) {
                    assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "{reading:?}");
                }
            }
        }
    }

    #[test]
    fn pairing_follows_the_diagonal_form() {
        let l = leaf();
        let s: Sample<C64> = SampleSpec::new(30, 13).draw(&l.chart, &l.singular().union(&SeparationChart::singular())).unwrap();
        let k2 = l.printed_k2().unwrap();
        let sc = separation_chart(&l, MomentumReading::Corrected).unwrap();
        let r = eigenform_pairing(&k2, &sc, &l, &s).unwrap();
        assert_eq!([r.paired(0), r.paired(1), r.paired(2), r.paired(3)], [1, 0, 1, 0]);
        assert!(r.max() <= EPS_DERIV, "{}", r.max());
        let printed = eigenform_pairing(&k2, &separation_chart(&l, MomentumReading::Printed).unwrap(), &l, &s).unwrap();
        assert!(printed.best(2).max > 1e-3);
    }
}
