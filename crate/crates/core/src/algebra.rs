//! Haantjes algebras: module, ring and commutativity checks, numerical
//! rank and cyclic generation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chart::ChartPoint;
use crate::check::{map_points, sampled, sampled_scaled, Residual, Tolerances};
use crate::error::{GeomError, Result};
use crate::field::{Field, OperatorField, ScalarField};
use crate::linalg::{self, max_difference, numerical_rank, to_complex_matrix, MinimalPolynomial, RANK_TOLERANCE};
use crate::sample::Sample;
use crate::scalar::Scalar;
use crate::torsion::{haantjes_torsion, is_haantjes, TorsionCheck};

/// Max-norm Haantjes torsion of `f·K_i + g·K_j` over the sample, with its
/// term scale.
pub fn check_module_condition<S: Scalar>(
    ki: &OperatorField,
    kj: &OperatorField,
    f: &ScalarField,
    g: &ScalarField,
    sample: &Sample<S>,
) -> Result<Residual> {
    let combo = ki.scale(f)?.add(&kj.scale(g)?)?;
    sampled_scaled(sample, |p| {
        let h = haantjes_torsion(&combo, p)?;
        Ok((h.max_norm(), h.scale()))
    })
}

/// Max-norm Haantjes torsion of `K_i K_j` and `K_j K_i` over the sample,
/// with the larger term scale of the two.
pub fn check_ring_condition<S: Scalar>(ki: &OperatorField, kj: &OperatorField, sample: &Sample<S>) -> Result<Residual> {
    let a = ki.compose(kj)?;
    let b = kj.compose(ki)?;
    sampled_scaled(sample, |p| {
        let (ha, hb) = (haantjes_torsion(&a, p)?, haantjes_torsion(&b, p)?);
        Ok((ha.max_norm().max(hb.max_norm()), ha.scale().max(hb.scale())))
    })
}

/// Max-norm of `K_i K_j − K_j K_i` over the sample.
pub fn check_abelian<S: Scalar>(ki: &OperatorField, kj: &OperatorField, sample: &Sample<S>) -> Result<Residual> {
    ki.chart().ensure_same(kj.chart())?;
    sampled(sample, |p| {
        let a = ki.eval(p)?;
        let b = kj.eval(p)?;
        Ok(max_difference(&(&a * &b), &(&b * &a)))
    })
}

/// Monic minimal polynomial of `L(p)`, computed over the complex numbers.
pub fn minimal_polynomial<S: Scalar>(l: &OperatorField, p: &ChartPoint<S>) -> Result<MinimalPolynomial<Complex64>> {
    let v = to_complex_matrix(&l.eval(p)?);
    linalg::minimal_polynomial(&v, RANK_TOLERANCE)
}

/// Numerical rank of the generator values at each sample point.
#[derive(Clone, Debug, PartialEq)]
pub struct RankReport {
    pub per_point: Vec<usize>,
    /// Rank at the first point.
    pub rank: usize,
    /// Every point has the same rank.
    pub consistent: bool,
}

/// Results of checking the algebra axioms on a sample.
#[derive(Clone, Debug)]
pub struct AlgebraVerification {
    pub generators: Vec<TorsionCheck>,
    pub module: Residual,
    pub ring: Residual,
    pub abelian: Residual,
    pub rank: RankReport,
    pub tolerances: Tolerances,
}

impl AlgebraVerification {
    pub fn is_module(&self) -> bool {
        self.module.within_scaled(self.tolerances.deriv)
    }

    pub fn is_ring(&self) -> bool {
        self.ring.within_scaled(self.tolerances.deriv)
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian.within(self.tolerances.exact)
    }

    pub fn generators_haantjes(&self) -> bool {
        self.generators.iter().all(|c| c.vanishes)
    }

    /// All axioms hold and the rank is constant.
    pub fn holds(&self) -> bool {
        self.generators_haantjes() && self.is_module() && self.is_ring() && self.is_abelian() && self.rank.consistent
    }
}

/// A finite family of operator fields on one chart.
#[derive(Clone, Debug)]
pub struct HaantjesAlgebra {
    generators: Vec<OperatorField>,
}

impl HaantjesAlgebra {
    pub fn new(generators: Vec<OperatorField>) -> Result<Self> {
        let first = generators.first().ok_or(GeomError::DimensionMismatch { expected: 1, found: 0 })?;
        for g in &generators[1..] {
            first.chart().ensure_same(g.chart())?;
        }
        Ok(HaantjesAlgebra { generators })
    }

    pub fn generators(&self) -> &[OperatorField] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn rank<S: Scalar>(&self, sample: &Sample<S>) -> Result<RankReport> {
        let per_point = map_points(sample, |p| {
            let values: Vec<DMatrix<Complex64>> =
                self.generators.iter().map(|g| g.eval(p).map(|m| to_complex_matrix(&m))).collect::<Result<_>>()?;
            Ok(numerical_rank(&values, RANK_TOLERANCE))
        })?;
        let rank = per_point[0];
        let consistent = per_point.iter().all(|r| *r == rank);
        Ok(RankReport { per_point, rank, consistent })
    }

    /// Checks every generator, and the module, ring and commutativity
    /// conditions on all pairs, with `f`, `g` as module coefficients.
    pub fn verify<S: Scalar>(
        &self,
        sample: &Sample<S>,
        tolerances: Tolerances,
        f: &ScalarField,
        g: &ScalarField,
    ) -> Result<AlgebraVerification> {
        let generators =
            self.generators.iter().map(|k| is_haantjes(k, sample, tolerances.deriv)).collect::<Result<Vec<_>>>()?;
        let m = self.generators.len();
        let mut module = Residual::zero(sample.len());
        let mut ring = Residual::zero(sample.len());
        let mut abelian = Residual::zero(sample.len());
        for i in 0..m {
            for j in i..m {
                let (ki, kj) = (&self.generators[i], &self.generators[j]);
                module = module.combine(check_module_condition(ki, kj, f, g, sample)?);
                ring = ring.combine(check_ring_condition(ki, kj, sample)?);
                if i != j {
                    abelian = abelian.combine(check_abelian(ki, kj, sample)?);
                }
            }
        }
        let rank = self.rank(sample)?;
        Ok(AlgebraVerification { generators, module, ring, abelian, rank, tolerances })
    }
}

/// The algebra `{I, L, …, L^{m−1}}`. Without `m`, the degree of the minimal
/// polynomial at the first sample point is used.
pub fn cyclic_algebra<S: Scalar>(l: &OperatorField, m: Option<usize>, sample: &Sample<S>) -> Result<HaantjesAlgebra> {
    let m = match m {
        Some(m) => m,
        None => {
            let p = sample.points().first().ok_or(GeomError::EmptySample)?;
            minimal_polynomial(l, p)?.degree()
        }
    };
    let mut generators = vec![OperatorField::identity(l.chart()).with_singular_set(l.singular())];
    for k in 1..m {
        generators.push(generators[k - 1].compose(l)?);
    }
    HaantjesAlgebra::new(generators)
}
