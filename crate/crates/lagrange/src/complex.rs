//! The complex chart `(x1, x2, y1, y2, F1, F4)` adapted to the symplectic
//! leaves of `P1`, the deformation vector fields and the operator `N`.

use haantjes::{
    differential, BivectorField, Chart, ChartPoint, CoordinateMap, Expr, OperatorField, Scalar, ScalarField, SingularSet,
    VectorField, C64,
};

use crate::error::Result;
use crate::euler_poisson::EulerPoissonFields;
use crate::params::TopParams;
use crate::COMPLEX_COORDS;

pub const X1: usize = 0;
pub const X2: usize = 1;
pub const Y1: usize = 2;
pub const Y2: usize = 3;
pub const F1: usize = 4;
pub const F4: usize = 5;

fn v(i: usize) -> Expr {
    Expr::var(i)
}

fn i() -> Expr {
    Expr::i()
}

pub fn complex_chart() -> Chart {
    Chart::new("complex", &COMPLEX_COORDS)
}

/// `Δ = x1² + (c−1)F1 x1 + x2`.
pub fn delta(params: &TopParams) -> Expr {
    v(X1).powi(2) + params.c1() * v(F1) * v(X1) + v(X2)
}

/// Where `N` and the inverse chart map are undefined: `x2 = 0` and `Δ = 0`.
pub fn complex_singular(params: &TopParams) -> SingularSet {
    SingularSet::zero_of(v(X2)).with(delta(params))
}

/// The change of coordinates from `(ω, γ)` to the complex chart.
pub fn complex_map(params: &TopParams) -> Result<CoordinateMap> {
    let params = params.validated()?;
    let c = params.c;
    let source = Chart::new("euler-poisson", &crate::EULER_POISSON_COORDS);
    let (w1, w2, w3, g1, g2, g3) = (v(0), v(1), v(2), v(3), v(4), v(5));
    let forward = vec![
        -(c * &w3) + i() * &w2,
        &g3 - i() * &g2,
        w1,
        -g1.clone(),
        w3,
        g1.powi(2) + g2.powi(2) + g3.powi(2),
    ];
    let s = (v(F4) - v(Y2).powi(2)) / v(X2);
    let inverse = vec![
        v(Y1),
        -(i() * (v(X1) + c * v(F1))),
        v(F1),
        -v(Y2),
        (&s - v(X2)) / (2.0 * i()),
        (v(X2) + &s) * 0.5,
    ];
    Ok(CoordinateMap::new(&source, &complex_chart(), forward, inverse)?.with_target_singular(SingularSet::zero_of(v(X2))))
}

/// Image of a state `(ω, γ)` in the complex chart.
pub fn to_complex_chart<S: Scalar>(state: &ChartPoint<S>, params: &TopParams) -> Result<ChartPoint<C64>> {
    let map = complex_map(params)?;
    let z = state.coords().iter().map(|x| x.to_complex()).collect::<Vec<_>>();
    Ok(map.apply(&map.source().point(z)?)?)
}

/// The Euler–Poisson fields pushed to the complex chart.
#[derive(Clone, Debug)]
pub struct ComplexChartFields {
    pub chart: Chart,
    pub map: CoordinateMap,
    pub params: TopParams,
    pub p0: BivectorField,
    pub p1: BivectorField,
    pub x_l: VectorField,
    pub x1: VectorField,
    pub x2: VectorField,
    pub f1: ScalarField,
    pub f2: ScalarField,
    pub f3: ScalarField,
    pub f4: ScalarField,
    pub h0: ScalarField,
    pub h1: ScalarField,
    pub h2: ScalarField,
}

impl ComplexChartFields {
    pub fn new(params: &TopParams) -> Result<Self> {
        let ep = EulerPoissonFields::new(params)?;
        Self::from_fields(&ep)
    }

    pub fn from_fields(ep: &EulerPoissonFields) -> Result<Self> {
        let map = complex_map(&ep.params)?;
        let s = |f: &ScalarField| map.push_scalar(f);
        let vf = |x: &VectorField| map.push_vector(x);
        Ok(ComplexChartFields {
            chart: map.target().clone(),
            params: ep.params,
            p0: map.push_bivector(&ep.p0)?,
            p1: map.push_bivector(&ep.p1)?,
            x_l: vf(&ep.x_l)?,
            x1: vf(&ep.x1)?,
            x2: vf(&ep.x2)?,
            f1: s(&ep.f1)?,
            f2: s(&ep.f2)?,
            f3: s(&ep.f3)?,
            f4: s(&ep.f4)?,
            h0: s(&ep.h0)?,
            h1: s(&ep.h1)?,
            h2: s(&ep.h2)?,
            map,
        })
    }

    pub fn singular(&self) -> SingularSet {
        complex_singular(&self.params)
    }

    /// The leaf block `P̌1` as printed, padded with zero transversal rows.
    pub fn printed_p1(&self) -> Result<BivectorField> {
        let z = Expr::zero;
        let x2 = v(X2);
        let rows = vec![
            vec![z(), z(), -i(), z(), z(), z()],
            vec![z(), z(), z(), -(i() * &x2), z(), z()],
            vec![i(), z(), z(), z(), z(), z()],
            vec![z(), i() * &x2, z(), z(), z(), z()],
            vec![z(); 6],
            vec![z(); 6],
        ];
        Ok(BivectorField::from_rows(&self.chart, rows)?)
    }

    /// `P̌0` as printed, padded with zero transversal rows.
    pub fn printed_p0_block(&self) -> Result<BivectorField> {
        let z = Expr::zero;
        let x1 = v(X1);
        let mi = -i();
        let rows = vec![
            vec![z(), z(), z(), mi.clone(), z(), z()],
            vec![z(), z(), mi.clone(), i() * &x1, z(), z()],
            vec![z(), i(), z(), z(), z(), z()],
            vec![i(), -(i() * &x1), z(), z(), z(), z()],
            vec![z(); 6],
            vec![z(); 6],
        ];
        Ok(BivectorField::from_rows(&self.chart, rows)?)
    }

    /// `P0` as printed: `P̌0` plus the `±2X1` column and row along `F4`.
    pub fn printed_p0(&self) -> Result<BivectorField> {
        let z2 = VectorField::basis(&self.chart, F4)?.scale_const(2.0);
        Ok(self.printed_p0_block()?.add(&BivectorField::wedge(&self.x1, &z2)?)?)
    }
}

/// The transversal frames `Z1 = ∂/∂F1`, `Z2 = 2∂/∂F4` and `Q = P0 − X1∧Z2`.
#[derive(Clone, Debug)]
pub struct Deformation {
    pub z1: VectorField,
    pub z2: VectorField,
    pub q: BivectorField,
}

pub fn deformation(fields: &ComplexChartFields) -> Result<Deformation> {
    let z1 = VectorField::basis(&fields.chart, F1)?;
    let z2 = VectorField::basis(&fields.chart, F4)?.scale_const(2.0);
    let q = fields.p0.sub(&BivectorField::wedge(&fields.x1, &z2)?)?;
    Ok(Deformation { z1, z2, q })
}

/// Which closed form to use for the entry `N^6_5`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NReading {
    /// `−2c x2((c−1)²F1² + (c−1)F1 x1 − x2)/Δ`, fixed by `𝒯_N = 0` and the
    /// gradient chain. `N P1 = P0 − X1∧Z2` does not see this entry, since
    /// `P1` has no `F1` row.
    #[default]
    Corrected,
    /// `−2c x2((c−1)(F1² + F1 x1) − x2)/Δ`; agrees with the corrected form
    /// only for `c ∈ {1, 2}`.
    Printed,
}

impl NReading {
    pub fn label(&self) -> &'static str {
        match self {
            NReading::Corrected => "corrected",
            NReading::Printed => "printed",
        }
    }
}

/// The Nijenhuis operator `N` on the complex chart.
pub fn nijenhuis_operator(params: &TopParams, reading: NReading) -> Result<OperatorField> {
    let params = params.validated()?;
    let (c, c1) = (params.c, params.c1());
    let chart = complex_chart();
    let (x1, x2, f1) = (v(X1), v(X2), v(F1));
    let dl = delta(&params);
    let z = Expr::zero;
    let inv_x2 = x2.recip();
    let m = -(&x1 / &x2);
    let n55 = (c1 * &f1 + &x1) / &dl;
    let n56 = (2.0 * c * &x2 * &dl).recip();
    let bracket = match reading {
        NReading::Corrected => c1 * c1 * f1.powi(2) + c1 * &f1 * &x1 - &x2,
        NReading::Printed => c1 * (f1.powi(2) + &f1 * &x1) - &x2,
    };
    let n65 = -(2.0 * c * &x2 * bracket / &dl);
    let n66 = -((x1.powi(3) + c1 * &f1 * x1.powi(2) + 2.0 * &x1 * &x2 + c1 * &f1 * &x2) / (&x2 * &dl));
    let rows = vec![
        vec![z(), inv_x2.clone(), z(), z(), z(), z()],
        vec![Expr::one(), m.clone(), z(), z(), z(), z()],
        vec![z(), z(), z(), inv_x2, z(), z()],
        vec![z(), z(), Expr::one(), m, z(), z()],
        vec![z(), z(), z(), z(), n55, n56],
        vec![z(), z(), z(), z(), n65, n66],
    ];
    Ok(OperatorField::from_rows(&chart, rows)?.with_singular_set(&complex_singular(&params)))
}

/// `K1 = I`, `K2 = Z2(−F3) I + N`, `K3 = Z2(F2) I + Z2(−F3) N + N²`.
#[derive(Clone, Debug)]
pub struct BenentiOperators {
    pub k1: OperatorField,
    pub k2: OperatorField,
    pub k3: OperatorField,
    /// `Z2(−F3)`.
    pub a1: ScalarField,
    /// `Z2(F2)`.
    pub a2: ScalarField,
}

impl BenentiOperators {
    pub fn all(&self) -> [&OperatorField; 3] {
        [&self.k1, &self.k2, &self.k3]
    }
}

/// The Benenti family generated by `n`, with coefficients obtained by
/// differentiating the integrals along `Z2`.
pub fn benenti_operators(n: &OperatorField, fields: &ComplexChartFields) -> Result<BenentiOperators> {
    let dz = deformation(fields)?;
    let a1 = differential(&fields.f3.neg()).pair(&dz.z2)?;
    let a2 = differential(&fields.f2).pair(&dz.z2)?;
    let id = OperatorField::identity(n.chart()).with_singular_set(n.singular());
    let k2 = id.scale(&a1)?.add(n)?;
    let k3 = id.scale(&a2)?.add(&n.scale(&a1)?)?.add(&n.pow(2))?;
    Ok(BenentiOperators { k1: id, k2, k3, a1, a2 })
}
