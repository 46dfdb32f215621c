//! Restriction to the symplectic leaves `S1 = {F1 = C1, F4 = C4}` of `P1`.

use haantjes::check::sampled;
use haantjes::{
    differential, BivectorField, Chart, Expr, GeomError, MagriChain, OperatorField, Residual, Sample, SampleSpec,
    Scalar, ScalarField, SingularSet, C64,
};

use crate::complex::{self, BenentiOperators, ComplexChartFields, F1, F4, X1, X2};
use crate::error::Result;
use crate::params::TopParams;
use crate::util::oneform_gap;
use crate::LEAF_COORDS;

fn v(i: usize) -> Expr {
    Expr::var(i)
}

/// A leaf of `P1`, charted by `(x1, x2, y1, y2)`.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub chart: Chart,
    pub params: TopParams,
    pub c1: C64,
    pub c4: C64,
}

impl Leaf {
    pub fn new(params: &TopParams, c1: impl Into<C64>, c4: impl Into<C64>) -> Result<Self> {
        Ok(Leaf { chart: Chart::new("leaf", &LEAF_COORDS), params: params.validated()?, c1: c1.into(), c4: c4.into() })
    }

    /// Complex-chart coordinates as expressions on the leaf.
    fn subs(&self) -> Vec<Expr> {
        let mut s: Vec<Expr> = (0..4).map(v).collect();
        s.push(Expr::constant(self.c1));
        s.push(Expr::constant(self.c4));
        s
    }

    /// `x2 = 0` and `Δ|S1 = 0`.
    pub fn singular(&self) -> SingularSet {
        complex::complex_singular(&self.params).substitute(&self.subs())
    }

    pub fn sample(&self, spec: &SampleSpec) -> Result<Sample<C64>> {
        Ok(spec.draw(&self.chart, &self.singular())?)
    }

    pub fn restrict_scalar(&self, f: &ScalarField) -> Result<ScalarField> {
        let subs = self.subs();
        Ok(ScalarField::new(&self.chart, f.expr().substitute(&subs))?.with_singular_set(&f.singular().substitute(&subs)))
    }

    fn restrict_block<S: Scalar>(
        &self,
        entry: impl Fn(usize, usize) -> Expr,
        singular: &SingularSet,
        sample: &Sample<S>,
        tol: f64,
    ) -> Result<(Vec<Expr>, SingularSet)> {
        let subs = self.subs();
        let mut off = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                if (i < 4) != (j < 4) {
                    let e = entry(i, j).substitute(&subs);
                    if !e.is_zero() {
                        off.push(e);
                    }
                }
            }
        }
        let coupling = sampled(sample, |p| {
            off.iter().try_fold(0.0_f64, |m, e| Ok::<_, GeomError>(m.max(e.eval(p.coords())?.modulus())))
        })?;
        if !coupling.within(tol) {
            return Err(GeomError::OffBlockCoupling { residual: coupling.max, tolerance: tol }.into());
        }
        let block = (0..16).map(|k| entry(k / 4, k % 4).substitute(&subs)).collect();
        Ok((block, singular.substitute(&subs)))
    }

    /// The leaf block of an operator, after checking on `sample` that it
    /// does not couple leaf and transversal directions.
    pub fn restrict_operator<S: Scalar>(&self, op: &OperatorField, sample: &Sample<S>, tol: f64) -> Result<OperatorField> {
        let (block, sing) = self.restrict_block(|i, j| op.entry(i, j).clone(), op.singular(), sample, tol)?;
        Ok(OperatorField::new(&self.chart, block)?.with_singular_set(&sing))
    }

    pub fn restrict_bivector<S: Scalar>(&self, p: &BivectorField, sample: &Sample<S>, tol: f64) -> Result<BivectorField> {
        let (block, sing) = self.restrict_block(|i, j| p.entry(i, j).clone(), p.singular(), sample, tol)?;
        Ok(BivectorField::new(&self.chart, block)?.with_singular_set(&sing))
    }

    /// `Ň` as printed.
    pub fn printed_n(&self) -> Result<OperatorField> {
        let (z, o) = (Expr::zero, Expr::one);
        let inv = v(X2).recip();
        let m = -(v(X1) / v(X2));
        let rows = vec![
            vec![z(), inv.clone(), z(), z()],
            vec![o(), m.clone(), z(), z()],
            vec![z(), z(), z(), inv],
            vec![z(), z(), o(), m],
        ];
        Ok(OperatorField::from_rows(&self.chart, rows)?.with_singular(v(X2)))
    }

    /// `(x1/x2) I + Ň`.
    pub fn printed_k2(&self) -> Result<OperatorField> {
        let id = OperatorField::identity(&self.chart);
        Ok(id.scale(&ScalarField::new(&self.chart, v(X1) / v(X2))?)?.add(&self.printed_n()?)?)
    }
}

/// Leaf restrictions of the operators and integrals entering the reduced chain.
#[derive(Clone, Debug)]
pub struct LeafFields {
    pub leaf: Leaf,
    pub n: OperatorField,
    pub k1: OperatorField,
    pub k2: OperatorField,
    pub p0: BivectorField,
    pub p1: BivectorField,
    pub f2: ScalarField,
    pub f3: ScalarField,
    pub h1: ScalarField,
}

impl LeafFields {
    /// Restricts `N`, the Benenti operators, `P0`, `P1` and the integrals,
    /// checking block structure on `sample` at `tol`.
    pub fn new(
        leaf: &Leaf,
        fields: &ComplexChartFields,
        n: &OperatorField,
        benenti: &BenentiOperators,
        sample: &Sample<C64>,
        tol: f64,
    ) -> Result<Self> {
        let q = complex::deformation(fields)?.q;
        Ok(LeafFields {
            leaf: leaf.clone(),
            n: leaf.restrict_operator(n, sample, tol)?,
            k1: leaf.restrict_operator(&benenti.k1, sample, tol)?,
            k2: leaf.restrict_operator(&benenti.k2, sample, tol)?,
            p0: leaf.restrict_bivector(&q, sample, tol)?,
            p1: leaf.restrict_bivector(&fields.p1, sample, tol)?,
            f2: leaf.restrict_scalar(&fields.f2)?,
            f3: leaf.restrict_scalar(&fields.f3)?,
            h1: leaf.restrict_scalar(&fields.h1)?,
        })
    }

    /// `Ǩ2ᵀ d(−F3) − dF2` on the leaf.
    pub fn chain_residual(&self, sample: &Sample<C64>) -> Result<Residual> {
        let lhs = self.k2.apply_transpose(&differential(&self.f3.neg()))?;
        oneform_gap(&lhs, &differential(&self.f2), sample)
    }

    /// `|{F2, F3}|` under the leaf bivector `P̌1`, scale-adjusted.
    pub fn involution(&self, sample: &Sample<C64>) -> Result<Residual> {
        Ok(MagriChain::involution(&self.p1, &[self.f2.clone(), self.f3.clone()], sample)?)
    }
}

/// Sign in front of the `(c−1)C1 Ǩ2ᵀ` term of the `h1` chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainSign {
    /// `dh1 = (−I + (c−1)C1 Ǩ2ᵀ) dF3`.
    AsPrinted,
    /// `dh1 = (−I − (c−1)C1 Ǩ2ᵀ) dF3`.
    Flipped,
}

impl ChainSign {
    pub fn label(&self) -> &'static str {
        match self {
            ChainSign::AsPrinted => "dh1 = (-I + (c-1) C1 K2^T) dF3",
            ChainSign::Flipped => "dh1 = (-I - (c-1) C1 K2^T) dF3",
        }
    }
}

/// Both sign readings of the restricted `h1` chain with their residuals.
#[derive(Clone, Debug)]
pub struct RestrictedChain {
    pub readings: Vec<(ChainSign, Residual)>,
    /// The reading with the smaller residual, if it is within tolerance.
    pub passing: Option<ChainSign>,
}

impl RestrictedChain {
    pub fn residual(&self, sign: ChainSign) -> Residual {
        self.readings.iter().find(|(s, _)| *s == sign).map(|(_, r)| *r).expect("both readings are evaluated")
    }
}

/// Evaluates `dh1|S1 = (−I ± (c−1)C1 Ǩ2ᵀ) dF3|S1` on `sample`.
pub fn restricted_hamiltonian_chain(lf: &LeafFields, sample: &Sample<C64>, tol: f64) -> Result<RestrictedChain> {
    let c1 = lf.leaf.params.c1();
    let df3 = differential(&lf.f3);
    let dh1 = differential(&lf.h1);
    let k2t = lf.k2.apply_transpose(&df3)?;
    let readings = [ChainSign::AsPrinted, ChainSign::Flipped]
        .into_iter()
        .map(|sign| {
            let s = if sign == ChainSign::AsPrinted { 1.0 } else { -1.0 };
            let rhs = df3.scale_const(-1.0).add(&k2t.scale_const(lf.leaf.c1 * (s * c1)))?;
            Ok((sign, oneform_gap(&dh1, &rhs, sample)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = readings.iter().min_by(|a, b| a.1.max.total_cmp(&b.1.max)).expect("two readings");
    let passing = best.1.within(tol).then_some(best.0);
    Ok(RestrictedChain { readings, passing })
}

/// `F1 = C1`, `F4 = C4` entries of a complex-chart point.
pub fn leaf_constants(point: &[C64]) -> (C64, C64) {
    (point[F1], point[F4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{benenti_operators, nijenhuis_operator, NReading};
    use crate::util::operator_gap;
    use haantjes::{Field, EPS_DERIV, EPS_EXACT};

    fn setup(c: f64) -> (LeafFields, Sample<C64>) {
        let params = TopParams::with_c(c).unwrap();
        let fields = ComplexChartFields::new(&params).unwrap();
        let n = nijenhuis_operator(&params, NReading::Corrected).unwrap();
        let b = benenti_operators(&n, &fields).unwrap();
        let leaf = Leaf::new(&params, 1.0, 2.0).unwrap();
        let s = leaf.sample(&SampleSpec::new(30, 8)).unwrap();
        (LeafFields::new(&leaf, &fields, &n, &b, &s, EPS_EXACT).unwrap(), s)
    }

    #[test]
    fn printed_n_at_a_point() {
        let leaf = Leaf::new(&TopParams::default(), 1.0, 1.0).unwrap();
        let z = C64::new(0.0, 0.0);
        let p = leaf.chart.point(vec![z, C64::new(1.0, 0.0), z, z]).unwrap();
        let n = leaf.printed_n().unwrap().eval(&p).unwrap();
        let want = [[0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(n[(i, j)], C64::new(want[i][j], 0.0));
            }
        }
    }

    #[test]
    fn restriction_recovers_printed_blocks() {
        let (lf, s) = setup(2.0);
        assert!(operator_gap(&lf.n, &lf.leaf.printed_n().unwrap(), &s).unwrap().within(EPS_EXACT));
        assert!(operator_gap(&lf.k2, &lf.leaf.printed_k2().unwrap(), &s).unwrap().within(EPS_EXACT));
        assert_eq!(operator_gap(&lf.k1, &OperatorField::identity(&lf.leaf.chart), &s).unwrap().max, 0.0);
    }

    #[test]
    fn chains_on_the_leaf() {
        let (lf, s) = setup(2.0);
        assert!(lf.chain_residual(&s).unwrap().within(EPS_DERIV));
        let r = restricted_hamiltonian_chain(&lf, &s, EPS_DERIV).unwrap();
        assert_eq!(r.passing, Some(ChainSign::AsPrinted));
        assert!(r.residual(ChainSign::Flipped).max > 1e-3);
        assert!(lf.involution(&s).unwrap().within_scaled(EPS_EXACT));
    }

    #[test]
    fn symmetric_case_chain_is_minus_df3() {
        let (lf, s) = setup(1.0);
        let r = restricted_hamiltonian_chain(&lf, &s, EPS_DERIV).unwrap();
        assert!(r.readings.iter().all(|(_, res)| res.within(EPS_DERIV)));
    }

    #[test]
    fn coupled_operator_is_rejected() {
        let params = TopParams::default();
        let leaf = Leaf::new(&params, 1.0, 2.0).unwrap();
        let s = leaf.sample(&SampleSpec::new(5, 1)).unwrap();
        let chart = complex::complex_chart();
        let mut comps = vec![Expr::zero(); 36];
        comps[4] = Expr::var(0) + 3.0;
        let op = OperatorField::new(&chart, comps).unwrap();
        let err = leaf.restrict_operator(&op, &s, EPS_EXACT).unwrap_err();
        assert!(matches!(err, crate::TopError::Geom(GeomError::OffBlockCoupling { .. })));
    }
}
