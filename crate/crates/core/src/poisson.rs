//! Poisson bivectors, brackets, Lie derivatives, Poisson–Haantjes
//! compatibility and Magri–Haantjes chains.

use nalgebra::{DMatrix, DVector};

use crate::algebra::HaantjesAlgebra;
use crate::calculus::{differential, exterior_derivative, lie_bracket};
use crate::chart::ChartPoint;
use crate::check::{sampled, sampled_scaled, Residual, Tolerances};
use crate::error::{GeomError, Result};
use crate::field::{BivectorField, Field, OneFormField, OperatorField, ScalarField, VectorField};
use crate::linalg::{max_difference, max_modulus, skew_residual};
use crate::sample::Sample;
use crate::scalar::Scalar;

/// `max_{ijk} |Σ_l (P^{il}∂_l P^{jk} + P^{jl}∂_l P^{ki} + P^{kl}∂_l P^{ij})|` at `p`.
pub fn jacobi_residual<S: Scalar>(bivector: &BivectorField, p: &ChartPoint<S>) -> Result<f64> {
    let n = bivector.dim();
    let jet = bivector.jet(p)?;
    let v = jet.value_matrix(n);
    let dp: Vec<DMatrix<S>> = (0..n).map(|l| jet.partial_matrix(n, l)).collect();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = S::zero();
                for (l, d) in dp.iter().enumerate() {
                    s += v[(i, l)] * d[(j, k)] + v[(j, l)] * d[(k, i)] + v[(k, l)] * d[(i, j)];
                }
                worst = worst.max(s.modulus());
            }
        }
    }
    Ok(worst)
}

/// A bivector together with its sampled skew and Jacobi residuals.
#[derive(Clone, Debug)]
pub struct PoissonStructure {
    bivector: BivectorField,
    pub skew: Residual,
    pub jacobi: Residual,
    pub tolerances: Tolerances,
}

impl PoissonStructure {
    pub fn verify<S: Scalar>(bivector: &BivectorField, sample: &Sample<S>, tolerances: Tolerances) -> Result<Self> {
        let skew = sampled(sample, |p| bivector.skew_residual(p))?;
        let jacobi = sampled(sample, |p| jacobi_residual(bivector, p))?;
        Ok(PoissonStructure { bivector: bivector.clone(), skew, jacobi, tolerances })
    }

    pub fn bivector(&self) -> &BivectorField {
        &self.bivector
    }

    pub fn is_skew(&self) -> bool {
        self.skew.within(self.tolerances.exact)
    }

    pub fn satisfies_jacobi(&self) -> bool {
        self.jacobi.within(self.tolerances.deriv)
    }

    pub fn is_poisson(&self) -> bool {
        self.is_skew() && self.satisfies_jacobi()
    }
}

/// `(∂_1 f, …, ∂_n f)` at `p`.
pub fn gradient<S: Scalar>(f: &ScalarField, p: &ChartPoint<S>) -> Result<DVector<S>> {
    let jet = f.jet(p)?;
    Ok(DVector::from_fn(f.dim(), |k, _| jet.partials[k][0]))
}

/// `{f, g} = ⟨df, P dg⟩` at `p`.
pub fn poisson_bracket<S: Scalar>(bivector: &BivectorField, f: &ScalarField, g: &ScalarField, p: &ChartPoint<S>) -> Result<S> {
    bivector.chart().ensure_same(f.chart())?;
    bivector.chart().ensure_same(g.chart())?;
    let pv = bivector.eval(p)?;
    let df = gradient(f, p)?;
    let dg = gradient(g, p)?;
    Ok(df.dot(&(pv * dg)))
}

/// `X_f = P df`.
pub fn hamiltonian_field(bivector: &BivectorField, f: &ScalarField) -> Result<VectorField> {
    bivector.apply(&differential(f))
}

/// Max-norm of `KP − PKᵀ` over the sample.
pub fn check_compatibility<S: Scalar>(k: &OperatorField, bivector: &BivectorField, sample: &Sample<S>) -> Result<Residual> {
    k.chart().ensure_same(bivector.chart())?;
    sampled(sample, |p| {
        let kv = k.eval(p)?;
        let pv = bivector.eval(p)?;
        Ok(max_difference(&(&kv * &pv), &(&pv * kv.transpose())))
    })
}

/// Skew residuals of `K_i P`, `K_i P K_jᵀ` and `(K_i − f·I)^r P`.
#[derive(Clone, Debug)]
pub struct SkewCompositions {
    pub kp: Residual,
    pub kpk: Residual,
    /// Entry `r − 1` holds the residual for power `r`.
    pub shifted: Vec<Residual>,
}

impl SkewCompositions {
    pub fn max(&self) -> f64 {
        self.shifted.iter().fold(self.kp.max.max(self.kpk.max), |m, r| m.max(r.max))
    }
}

pub fn check_skew_compositions<S: Scalar>(
    ki: &OperatorField,
    kj: &OperatorField,
    bivector: &BivectorField,
    f: &ScalarField,
    r_max: u32,
    sample: &Sample<S>,
) -> Result<SkewCompositions> {
    ki.chart().ensure_same(kj.chart())?;
    ki.chart().ensure_same(bivector.chart())?;
    ki.chart().ensure_same(f.chart())?;
    let kp = sampled(sample, |p| Ok(skew_residual(&(ki.eval(p)? * bivector.eval(p)?))))?;
    let kpk = sampled(sample, |p| Ok(skew_residual(&(ki.eval(p)? * bivector.eval(p)? * kj.eval(p)?.transpose()))))?;
    let shifted = (1..=r_max)
        .map(|r| {
            sampled(sample, |p| {
                let n = ki.dim();
                let shift = ki.eval(p)? - DMatrix::identity(n, n) * f.eval(p)?;
                let mut m = bivector.eval(p)?;
                for _ in 0..r {
                    m = &shift * m;
                }
                Ok(skew_residual(&m))
            })
        })
        .collect::<Result<_>>()?;
    Ok(SkewCompositions { kp, kpk, shifted })
}

/// `(ℒ_Z N)^i_j = Z^k∂_kN^i_j − N^k_j∂_kZ^i + N^i_k∂_jZ^k` at `p`.
pub fn lie_derivative_operator<S: Scalar>(z: &VectorField, op: &OperatorField, p: &ChartPoint<S>) -> Result<DMatrix<S>> {
    z.chart().ensure_same(op.chart())?;
    let n = z.dim();
    let zj = z.jet(p)?;
    let nj = op.jet(p)?;
    let nv = nj.value_matrix(n);
    // dz[(i, k)] = ∂_k Z^i
    let dz = DMatrix::from_fn(n, n, |i, k| zj.partials[k][i]);
    let mut out = -(&dz * &nv) + &nv * &dz;
    for k in 0..n {
        out += nj.partial_matrix(n, k) * zj.value[k];
    }
    Ok(out)
}

/// `(ℒ_Y β)_j = Y^k∂_kβ_j + β_k∂_jY^k` at `p`.
pub fn lie_derivative_oneform<S: Scalar>(y: &VectorField, beta: &OneFormField, p: &ChartPoint<S>) -> Result<DVector<S>> {
    y.chart().ensure_same(beta.chart())?;
    let n = y.dim();
    let yj = y.jet(p)?;
    let bj = beta.jet(p)?;
    Ok(DVector::from_fn(n, |j, _| {
        let mut s = S::zero();
        for k in 0..n {
            s += yj.value[k] * bj.partials[k][j] + bj.value[k] * yj.partials[j][k];
        }
        s
    }))
}

/// `(ℒ_Z P)^{ij} = Z^k∂_kP^{ij} − P^{kj}∂_kZ^i − P^{ik}∂_kZ^j` at `p`.
pub fn lie_derivative_bivector<S: Scalar>(z: &VectorField, bivector: &BivectorField, p: &ChartPoint<S>) -> Result<DMatrix<S>> {
    z.chart().ensure_same(bivector.chart())?;
    let n = z.dim();
    let zj = z.jet(p)?;
    let pj = bivector.jet(p)?;
    let pv = pj.value_matrix(n);
    let dz = DMatrix::from_fn(n, n, |i, k| zj.partials[k][i]);
    let mut out = -(&dz * &pv) - &pv * dz.transpose();
    for k in 0..n {
        out += pj.partial_matrix(n, k) * zj.value[k];
    }
    Ok(out)
}

/// `R(P,N)(α,Y) = (ℒ_{Pα}N)Y − P(ℒ_Y(Nᵀα) − ℒ_{NY}α)` at `p`.
pub fn r_tensor<S: Scalar>(
    bivector: &BivectorField,
    op: &OperatorField,
    alpha: &OneFormField,
    y: &VectorField,
    p: &ChartPoint<S>,
) -> Result<DVector<S>> {
    let p_alpha = bivector.apply(alpha)?;
    let first = lie_derivative_operator(&p_alpha, op, p)? * y.eval(p)?;
    let inner = lie_derivative_oneform(y, &op.apply_transpose(alpha)?, p)? - lie_derivative_oneform(&op.apply(y)?, alpha, p)?;
    Ok(first - bivector.eval(p)? * inner)
}

/// A named sampled residual belonging to a chain.
#[derive(Clone, Debug)]
pub struct ChainCheck {
    pub label: String,
    pub residual: Residual,
}

#[derive(Clone, Debug)]
pub enum ChainElements {
    OneForms(Vec<OneFormField>),
    VectorFields(Vec<VectorField>),
}

/// The family `K_iᵀ dH` or `K_i Y` with its sampled integrability residuals.
/// A failing chain is data, not an error.
#[derive(Clone, Debug)]
pub struct MagriChain {
    operators: Vec<OperatorField>,
    base: Option<ScalarField>,
    elements: ChainElements,
    pub checks: Vec<ChainCheck>,
    pub tolerance: f64,
}

/// Elements `K_iᵀ dH`, each checked for closedness.
pub fn build_chain_oneforms<S: Scalar>(
    algebra: &HaantjesAlgebra,
    h: &ScalarField,
    sample: &Sample<S>,
    tolerance: f64,
) -> Result<MagriChain> {
    let dh = differential(h);
    let elements = algebra.generators().iter().map(|k| k.apply_transpose(&dh)).collect::<Result<Vec<_>>>()?;
    let checks = elements
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let residual = sampled(sample, |p| Ok(max_modulus(exterior_derivative(e, p)?.iter())))?;
            Ok(ChainCheck { label: format!("d(K{}^T dH) = 0", i + 1), residual })
        })
        .collect::<Result<_>>()?;
    Ok(MagriChain {
        operators: algebra.generators().to_vec(),
        base: Some(h.clone()),
        elements: ChainElements::OneForms(elements),
        checks,
        tolerance,
    })
}

/// Elements `K_i Y`, each pair checked for commutation.
pub fn build_chain_vectorfields<S: Scalar>(
    algebra: &HaantjesAlgebra,
    y: &VectorField,
    sample: &Sample<S>,
    tolerance: f64,
) -> Result<MagriChain> {
    let elements = algebra.generators().iter().map(|k| k.apply(y)).collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            let b = lie_bracket(&elements[i], &elements[j])?;
            let residual = sampled(sample, |p| Ok(max_modulus(b.eval(p)?.iter())))?;
            checks.push(ChainCheck { label: format!("[K{} Y, K{} Y] = 0", i + 1, j + 1), residual });
        }
    }
    Ok(MagriChain { operators: algebra.generators().to_vec(), base: None, elements: ChainElements::VectorFields(elements), checks, tolerance })
}

impl MagriChain {
    pub fn elements(&self) -> &ChainElements {
        &self.elements
    }

    pub fn operators(&self) -> &[OperatorField] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.residual.within(self.tolerance))
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual.max).fold(0.0, f64::max)
    }

    fn oneforms(&self) -> Result<&[OneFormField]> {
        match &self.elements {
            ChainElements::OneForms(e) => Ok(e),
            ChainElements::VectorFields(_) => Err(GeomError::DimensionMismatch { expected: 1, found: 0 }),
        }
    }

    /// Residuals of `K_iᵀ dH − dH_i` for supplied closed-form `H_i`.
    pub fn potential_residuals<S: Scalar>(&self, potentials: &[ScalarField], sample: &Sample<S>) -> Result<Vec<Residual>> {
        let elements = self.oneforms()?;
        if potentials.len() != elements.len() {
            return Err(GeomError::DimensionMismatch { expected: elements.len(), found: potentials.len() });
        }
        elements
            .iter()
            .zip(potentials)
            .map(|(e, h)| {
                let dh = differential(h);
                sampled(sample, |p| Ok(crate::linalg::max_difference_vec(&e.eval(p)?, &dh.eval(p)?)))
            })
            .collect()
    }

    /// Largest `|{H_i, H_j}|` over all pairs, with `scale` the largest
    /// `|∇H_i|²·|P|` seen.
    pub fn involution<S: Scalar>(bivector: &BivectorField, potentials: &[ScalarField], sample: &Sample<S>) -> Result<Residual> {
        sampled_scaled(sample, |p| {
            let pv = bivector.eval(p)?;
            let grads = potentials.iter().map(|h| gradient(h, p)).collect::<Result<Vec<_>>>()?;
            let mut worst = 0.0_f64;
            let mut scale = 0.0_f64;
            for i in 0..grads.len() {
                for j in i + 1..grads.len() {
                    let b = grads[i].dot(&(&pv * &grads[j]));
                    worst = worst.max(b.modulus());
                    scale = scale.max(max_modulus(grads[i].iter()) * max_modulus(grads[j].iter()) * max_modulus(pv.iter()));
                }
            }
            Ok((worst, scale))
        })
    }

    /// Residuals of `P(K_iᵀ dH) − K_i(P dH)` for each element.
    pub fn hamiltonian_residuals<S: Scalar>(&self, bivector: &BivectorField, sample: &Sample<S>) -> Result<Vec<Residual>> {
        let elements = self.oneforms()?;
        let h = self.base.as_ref().ok_or(GeomError::DimensionMismatch { expected: 1, found: 0 })?;
        let xh = hamiltonian_field(bivector, h)?;
        self.operators
            .iter()
            .zip(elements)
            .map(|(k, e)| {
                let lhs = bivector.apply(e)?;
                let rhs = k.apply(&xh)?;
                sampled(sample, |p| Ok(crate::linalg::max_difference_vec(&lhs.eval(p)?, &rhs.eval(p)?)))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::check::EPS_DERIV;
    use crate::expr::Expr;
    use crate::field::SingularSet;
    use crate::sample::SampleSpec;
    use num_complex::Complex64;

    fn x(i: usize) -> Expr {
        Expr::var(i)
    }

    fn canonical(c: &Chart) -> BivectorField {
        let n = c.dim();
        let h = n / 2;
        let comps = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if j == i + h {
                    Expr::one()
                } else if i == j + h {
                    Expr::real(-1.0)
                } else {
                    Expr::zero()
                }
            })
            .collect();
        BivectorField::new(c, comps).unwrap()
    }

    #[test]
    fn canonical_bracket() {
        let c = Chart::new("qp", &["q", "p"]);
        let pb = canonical(&c);
        let q = ScalarField::coordinate(&c, 0).unwrap();
        let mom = ScalarField::coordinate(&c, 1).unwrap();
        let pt = c.point(vec![0.3_f64, -0.7]).unwrap();
        assert_eq!(poisson_bracket(&pb, &q, &mom, &pt).unwrap(), 1.0);
        assert_eq!(poisson_bracket(&pb, &q, &q, &pt).unwrap(), 0.0);
        assert_eq!(jacobi_residual(&pb, &pt).unwrap(), 0.0);
    }

    #[test]
    fn scaled_canonical_fails_jacobi_in_four_dimensions() {
        // x1 times the canonical structure on R^4 is not Poisson.
        let c = Chart::numbered("c", 4);
        let pb = BivectorField::from_matrix(canonical(&c).as_matrix().scale(&ScalarField::coordinate(&c, 0).unwrap()).unwrap());
        let s: Sample<f64> = SampleSpec::new(10, 2).draw(&c, &SingularSet::new()).unwrap();
        let ps = PoissonStructure::verify(&pb, &s, Tolerances::default()).unwrap();
        assert!(ps.is_skew());
        assert!(!ps.satisfies_jacobi());
    }

    #[test]
    fn identity_compatibility_and_r_tensor() {
        let c = Chart::numbered("c", 4);
        let pb = canonical(&c);
        let id = OperatorField::identity(&c);
        let s: Sample<Complex64> = SampleSpec::new(10, 3).draw(&c, &SingularSet::new()).unwrap();
        assert_eq!(check_compatibility(&id, &pb, &s).unwrap().max, 0.0);
        let alpha = OneFormField::new(&c, vec![x(1) * x(2), x(0), Expr::one(), x(3) * x(3)]).unwrap();
        let y = VectorField::new(&c, vec![x(2), x(0) * x(1), Expr::zero(), x(1)]).unwrap();
        for p in s.points() {
            let r = r_tensor(&pb, &id, &alpha, &y, p).unwrap();
            assert!(max_modulus(r.iter()) <= 1e-14);
        }
    }

    #[test]
    fn operator_lie_derivative_matches_bracket_form() {
        // (ℒ_Z N)X = [Z, NX] − N[Z, X] on frames
        let c = Chart::numbered("c", 3);
        let z = VectorField::new(&c, vec![x(1) * x(2), x(0), x(0) * x(0)]).unwrap();
        let op = OperatorField::from_rows(
            &c,
            vec![vec![x(0), x(1) * x(2), Expr::one()], vec![Expr::zero(), x(2), x(0)], vec![x(1), Expr::zero(), x(0) * x(1)]],
        )
        .unwrap();
        let p = c.point(vec![0.4_f64, -1.3, 0.8]).unwrap();
        let l = lie_derivative_operator(&z, &op, &p).unwrap();
        for j in 0..3 {
            let e = VectorField::frame(&c, j).unwrap();
            let lhs = lie_bracket(&z, &op.apply(&e).unwrap()).unwrap().sub(&op.apply(&lie_bracket(&z, &e).unwrap()).unwrap()).unwrap();
            let col = lhs.eval(&p).unwrap();
            for i in 0..3 {
                assert!((col[i] - l[(i, j)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn bivector_lie_derivative_of_wedge() {
        // ℒ_Z(X∧Y) = [Z,X]∧Y + X∧[Z,Y]
        let c = Chart::numbered("c", 3);
        let z = VectorField::new(&c, vec![x(1), x(2) * x(0), Expr::one()]).unwrap();
        let xf = VectorField::new(&c, vec![x(0) * x(0), Expr::zero(), x(1)]).unwrap();
        let yf = VectorField::new(&c, vec![Expr::one(), x(2), x(0) * x(1)]).unwrap();
        let w = BivectorField::wedge(&xf, &yf).unwrap();
        let rhs = BivectorField::wedge(&lie_bracket(&z, &xf).unwrap(), &yf)
            .unwrap()
            .add(&BivectorField::wedge(&xf, &lie_bracket(&z, &yf).unwrap()).unwrap())
            .unwrap();
        let p = c.point(vec![0.7_f64, 0.2, -0.5]).unwrap();
        let lhs = lie_derivative_bivector(&z, &w, &p).unwrap();
        assert!(max_difference(&lhs, &rhs.eval(&p).unwrap()) < 1e-13);
    }

    #[test]
    fn oneform_lie_derivative_cartan() {
        // ℒ_Y df = d(Y f)
        let c = Chart::numbered("c", 2);
        let f = ScalarField::new(&c, x(0) * x(0) * x(1)).unwrap();
        let y = VectorField::new(&c, vec![x(1), x(0) * x(1)]).unwrap();
        let yf = differential(&f).pair(&y).unwrap();
        let p = c.point(vec![1.1_f64, -0.4]).unwrap();
        let lhs = lie_derivative_oneform(&y, &differential(&f), &p).unwrap();
        let rhs = differential(&yf).eval(&p).unwrap();
        assert!(crate::linalg::max_difference_vec(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn trivial_chain() {
        let c = Chart::numbered("c", 2);
        let alg = HaantjesAlgebra::new(vec![OperatorField::identity(&c)]).unwrap();
        let h = ScalarField::new(&c, x(0) * x(1) + x(1).sin()).unwrap();
        let s: Sample<f64> = SampleSpec::new(10, 1).draw(&c, &SingularSet::new()).unwrap();
        let chain = build_chain_oneforms(&alg, &h, &s, EPS_DERIV).unwrap();
        assert!(chain.holds());
        assert_eq!(chain.len(), 1);
        let pot = chain.potential_residuals(std::slice::from_ref(&h), &s).unwrap();
        assert_eq!(pot[0].max, 0.0);
    }

    #[test]
    fn incompatible_symmetric_operator_is_reported() {
        let c = Chart::new("qp", &["q", "p"]);
        let k = OperatorField::new(&c, vec![Expr::real(2.0), Expr::real(1.0), Expr::real(1.0), Expr::real(3.0)]).unwrap();
        let s: Sample<f64> = SampleSpec::new(5, 1).draw(&c, &SingularSet::new()).unwrap();
        assert!(check_compatibility(&k, &canonical(&c), &s).unwrap().max > 0.5);
        let f = ScalarField::constant(&c, 0.0);
        let skew = check_skew_compositions(&k, &k, &canonical(&c), &f, 3, &s).unwrap();
        assert!(skew.kp.max > 0.5);
    }
}
