//! Differentiable field types over a chart.
//!
//! Every field is a list of component expressions tagged with its chart and
//! the singular set it declares. Pointwise values come from evaluating the
//! components; first partial derivatives come from evaluating them over
//! [`Dual`] numbers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::scalar::{Dual, Scalar};

/// One component of a singular locus: the zero set of `expr`.
#[derive(Clone, Debug)]
pub struct SingularComponent {
    pub expr: Expr,
    /// Sampling margin overriding the sampler default.
    pub margin: Option<f64>,
}

/// Union of zero sets on which a field is not defined.
#[derive(Clone, Debug, Default)]
pub struct SingularSet {
    components: Vec<SingularComponent>,
}

impl SingularSet {
    pub fn new() -> Self {
        SingularSet::default()
    }

    pub fn zero_of(expr: Expr) -> Self {
        SingularSet::new().with(expr)
    }

    pub fn with(mut self, expr: Expr) -> Self {
        self.components.push(SingularComponent { expr, margin: None });
        self
    }

    pub fn with_margin(mut self, expr: Expr, margin: f64) -> Self {
        self.components.push(SingularComponent { expr, margin: Some(margin) });
        self
    }

    pub fn components(&self) -> &[SingularComponent] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn union(&self, other: &SingularSet) -> SingularSet {
        let mut out = self.clone();
        for c in &other.components {
            let seen = out.components.iter().any(|o| o.margin == c.margin && o.expr.same_node(&c.expr));
            if !seen {
                out.components.push(c.clone());
            }
        }
        out
    }

    pub fn substitute(&self, subs: &[Expr]) -> SingularSet {
        SingularSet {
            components: self
                .components
                .iter()
                .map(|c| SingularComponent { expr: c.expr.substitute(subs), margin: c.margin })
                .collect(),
        }
    }

    /// True when some defining function vanishes exactly (or cannot be evaluated) at `x`.
    pub fn contains<S: Scalar>(&self, x: &[S]) -> bool {
        self.components.iter().any(|c| match c.expr.eval(x) {
            Ok(v) => v.modulus() == 0.0,
            Err(_) => true,
        })
    }

    /// True when every defining function has modulus at least its margin at `x`.
    pub fn is_clear<S: Scalar>(&self, x: &[S], default_margin: f64) -> bool {
        self.components.iter().all(|c| match c.expr.eval(x) {
            Ok(v) => v.is_finite() && v.modulus() >= c.margin.unwrap_or(default_margin),
            Err(_) => false,
        })
    }
}

/// Value and first partials of all components of a field at one point.
#[derive(Clone, Debug)]
pub struct Jet<S> {
    pub value: Vec<S>,
    /// `partials[k][c]` is the derivative of component `c` along coordinate `k`.
    pub partials: Vec<Vec<S>>,
}

impl<S: Scalar> Jet<S> {
    pub fn value_matrix(&self, n: usize) -> DMatrix<S> {
        DMatrix::from_row_slice(n, n, &self.value)
    }

    pub fn partial_matrix(&self, n: usize, k: usize) -> DMatrix<S> {
        DMatrix::from_row_slice(n, n, &self.partials[k])
    }

    pub fn value_vector(&self) -> DVector<S> {
        DVector::from_column_slice(&self.value)
    }

    pub fn partial_vector(&self, k: usize) -> DVector<S> {
        DVector::from_column_slice(&self.partials[k])
    }
}

fn validate(chart: &Chart, comps: &[Expr], expected: usize) -> Result<()> {
    if comps.len() != expected {
        return Err(GeomError::DimensionMismatch { expected, found: comps.len() });
    }
    for e in comps {
        if let Some(i) = e.max_var() {
            if i >= chart.dim() {
                return Err(GeomError::IndexOutOfRange { index: i, dim: chart.dim() });
            }
        }
    }
    Ok(())
}

fn eval_components<S: Scalar>(chart: &Chart, comps: &[Expr], singular: &SingularSet, p: &ChartPoint<S>) -> Result<Vec<S>> {
    chart.ensure_same(p.chart())?;
    let x = p.coords();
    if singular.contains(x) {
        return Err(GeomError::Singular);
    }
    comps
        .iter()
        .map(|e| {
            let v = e.eval(x)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(GeomError::NonFinite)
            }
        })
        .collect()
}

fn seeded<S: Scalar>(x: &[S], k: usize) -> Vec<Dual<S>> {
    x.iter()
        .enumerate()
        .map(|(j, &v)| if j == k { Dual::variable(v) } else { Dual::constant(v) })
        .collect()
}

/// Common behaviour of all field types.
pub trait Field: Clone + Send + Sync {
    /// Pointwise value of the field over scalar `S`.
    type Value<S: Scalar>;

    fn chart(&self) -> &Chart;

    /// Flat component list (row-major for matrix-shaped fields).
    fn components(&self) -> &[Expr];

    fn singular_set(&self) -> &SingularSet;

    fn shape<S: Scalar>(&self, flat: Vec<S>) -> Self::Value<S>;

    fn dim(&self) -> usize {
        self.chart().dim()
    }

    fn eval<S: Scalar>(&self, p: &ChartPoint<S>) -> Result<Self::Value<S>> {
        eval_components(self.chart(), self.components(), self.singular_set(), p).map(|v| self.shape(v))
    }

    /// Partial derivative of every component along coordinate `k`.
    fn partial<S: Scalar>(&self, p: &ChartPoint<S>, k: usize) -> Result<Self::Value<S>> {
        self.partial_flat(p, k).map(|v| self.shape(v))
    }

    #[doc(hidden)]
    fn partial_flat<S: Scalar>(&self, p: &ChartPoint<S>, k: usize) -> Result<Vec<S>> {
        let n = self.dim();
        if k >= n {
            return Err(GeomError::IndexOutOfRange { index: k, dim: n });
        }
        self.chart().ensure_same(p.chart())?;
        if self.singular_set().contains(p.coords()) {
            return Err(GeomError::Singular);
        }
        let x = seeded(p.coords(), k);
        self.components()
            .iter()
            .map(|e| {
                let v = e.eval(&x)?;
                if v.is_finite() {
                    Ok(v.eps)
                } else {
                    Err(GeomError::NonFinite)
                }
            })
            .collect()
    }

    /// Values and all first partials at `p`, one dual pass per coordinate.
    fn jet<S: Scalar>(&self, p: &ChartPoint<S>) -> Result<Jet<S>> {
        self.chart().ensure_same(p.chart())?;
        if self.singular_set().contains(p.coords()) {
            return Err(GeomError::Singular);
        }
        let n = self.dim();
        if n == 0 {
            let value = eval_components(self.chart(), self.components(), self.singular_set(), p)?;
            return Ok(Jet { value, partials: Vec::new() });
        }
        let mut value = Vec::new();
        let mut partials = Vec::with_capacity(n);
        for k in 0..n {
            let x = seeded(p.coords(), k);
            let mut dk = Vec::with_capacity(self.components().len());
            let mut vk = Vec::with_capacity(self.components().len());
            for e in self.components() {
                let v = e.eval(&x)?;
                if !v.is_finite() {
                    return Err(GeomError::NonFinite);
                }
                vk.push(v.re);
                dk.push(v.eps);
            }
            if k == 0 {
                value = vk;
            }
            partials.push(dk);
        }
        Ok(Jet { value, partials })
    }
}

macro_rules! field_common {
    ($name:ident) => {
        impl $name {
            pub fn chart(&self) -> &Chart {
                &self.chart
            }

            /// Adds a component to the declared singular set.
            pub fn with_singular(mut self, expr: Expr) -> Self {
                self.singular = self.singular.with(expr);
                self
            }

            pub fn with_singular_set(mut self, set: &SingularSet) -> Self {
                self.singular = self.singular.union(set);
                self
            }

            pub fn singular(&self) -> &SingularSet {
                &self.singular
            }
        }
    };
}

fn same_chart(a: &Chart, b: &Chart) -> Result<()> {
    a.ensure_same(b)
}

/// A scalar function on a chart.
#[derive(Clone, Debug)]
pub struct ScalarField {
    chart: Chart,
    expr: [Expr; 1],
    singular: SingularSet,
}

field_common!(ScalarField);

impl Field for ScalarField {
    type Value<S: Scalar> = S;
    fn chart(&self) -> &Chart {
        &self.chart
    }
    fn components(&self) -> &[Expr] {
        &self.expr
    }
    fn singular_set(&self) -> &SingularSet {
        &self.singular
    }
    fn shape<S: Scalar>(&self, flat: Vec<S>) -> S {
        flat[0]
    }
}

impl ScalarField {
    pub fn new(chart: &Chart, expr: Expr) -> Result<Self> {
        validate(chart, std::slice::from_ref(&expr), 1)?;
        Ok(ScalarField { chart: chart.clone(), expr: [expr], singular: SingularSet::new() })
    }

    pub fn constant(chart: &Chart, z: impl Into<Complex64>) -> Self {
        ScalarField { chart: chart.clone(), expr: [Expr::constant(z.into())], singular: SingularSet::new() }
    }

    pub fn coordinate(chart: &Chart, k: usize) -> Result<Self> {
        ScalarField::new(chart, Expr::var(k))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr[0]
    }

    fn combine(&self, other: &ScalarField, expr: Expr) -> Result<ScalarField> {
        same_chart(&self.chart, &other.chart)?;
        Ok(ScalarField { chart: self.chart.clone(), expr: [expr], singular: self.singular.union(&other.singular) })
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.combine(other, self.expr() + other.expr())
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.combine(other, self.expr() - other.expr())
    }

    pub fn mul(&self, other: &ScalarField) -> Result<ScalarField> {
        self.combine(other, self.expr() * other.expr())
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> ScalarField {
        ScalarField {
            chart: self.chart.clone(),
            expr: [self.expr() * Expr::constant(factor.into())],
            singular: self.singular.clone(),
        }
    }

    pub fn neg(&self) -> ScalarField {
        self.scale(-1.0)
    }

    /// Replaces the component expression, keeping chart and singular set.
    pub fn map_expr(&self, f: impl FnOnce(&Expr) -> Expr) -> ScalarField {
        ScalarField { chart: self.chart.clone(), expr: [f(self.expr())], singular: self.singular.clone() }
    }
}

macro_rules! vector_like {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, Debug)]
        pub struct $name {
            chart: Chart,
            comps: Vec<Expr>,
            singular: SingularSet,
        }

        field_common!($name);

        impl Field for $name {
            type Value<S: Scalar> = DVector<S>;
            fn chart(&self) -> &Chart {
                &self.chart
            }
            fn components(&self) -> &[Expr] {
                &self.comps
            }
            fn singular_set(&self) -> &SingularSet {
                &self.singular
            }
            fn shape<S: Scalar>(&self, flat: Vec<S>) -> DVector<S> {
                DVector::from_vec(flat)
            }
        }

        impl $name {
            pub fn new(chart: &Chart, comps: Vec<Expr>) -> Result<Self> {
                validate(chart, &comps, chart.dim())?;
                Ok($name { chart: chart.clone(), comps, singular: SingularSet::new() })
            }

            pub fn zero(chart: &Chart) -> Self {
                $name { chart: chart.clone(), comps: vec![Expr::zero(); chart.dim()], singular: SingularSet::new() }
            }

            /// The field whose only nonzero component is a 1 in slot `k`.
            pub fn basis(chart: &Chart, k: usize) -> Result<Self> {
                if k >= chart.dim() {
                    return Err(GeomError::IndexOutOfRange { index: k, dim: chart.dim() });
                }
                let mut comps = vec![Expr::zero(); chart.dim()];
                comps[k] = Expr::one();
                Ok($name { chart: chart.clone(), comps, singular: SingularSet::new() })
            }

            pub fn component(&self, i: usize) -> &Expr {
                &self.comps[i]
            }

            pub fn exprs(&self) -> &[Expr] {
                &self.comps
            }

            pub(crate) fn from_parts(chart: &Chart, comps: Vec<Expr>, singular: SingularSet) -> Self {
                $name { chart: chart.clone(), comps, singular }
            }

            fn zip(&self, other: &$name, f: impl Fn(&Expr, &Expr) -> Expr) -> Result<$name> {
                same_chart(&self.chart, &other.chart)?;
                let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect();
                Ok($name { chart: self.chart.clone(), comps, singular: self.singular.union(&other.singular) })
            }

            pub fn add(&self, other: &$name) -> Result<$name> {
                self.zip(other, |a, b| a + b)
            }

            pub fn sub(&self, other: &$name) -> Result<$name> {
                self.zip(other, |a, b| a - b)
            }

            /// Multiplies every component by the scalar field `f`.
            pub fn scale(&self, f: &ScalarField) -> Result<$name> {
                same_chart(&self.chart, f.chart())?;
                let comps = self.comps.iter().map(|a| f.expr() * a).collect();
                Ok($name { chart: self.chart.clone(), comps, singular: self.singular.union(f.singular()) })
            }

            pub fn scale_const(&self, factor: impl Into<Complex64>) -> $name {
                let k = Expr::constant(factor.into());
                $name {
                    chart: self.chart.clone(),
                    comps: self.comps.iter().map(|a| a * &k).collect(),
                    singular: self.singular.clone(),
                }
            }
        }
    };
}

vector_like!(VectorField, "A vector field, components `X^i` (upper index).");
vector_like!(OneFormField, "A 1-form, components `α_i` (lower index).");

impl VectorField {
    /// The coordinate frame field `∂/∂x^k`.
    pub fn frame(chart: &Chart, k: usize) -> Result<Self> {
        VectorField::basis(chart, k)
    }
}

impl OneFormField {
    /// The pairing `⟨α, X⟩` as a scalar field.
    pub fn pair(&self, x: &VectorField) -> Result<ScalarField> {
        same_chart(&self.chart, x.chart())?;
        let e: Expr = self.comps.iter().zip(x.exprs()).map(|(a, b)| a * b).sum();
        Ok(ScalarField { chart: self.chart.clone(), expr: [e], singular: self.singular.union(x.singular()) })
    }
}

/// An `n×n` array of component functions with no tensorial type attached.
///
/// Products such as `K·P` or `P·Kᵀ` land here; they are neither operators
/// nor (in general) skew bivectors.
#[derive(Clone, Debug)]
pub struct MatrixField {
    chart: Chart,
    comps: Vec<Expr>,
    singular: SingularSet,
}

field_common!(MatrixField);

impl Field for MatrixField {
    type Value<S: Scalar> = DMatrix<S>;
    fn chart(&self) -> &Chart {
        &self.chart
    }
    fn components(&self) -> &[Expr] {
        &self.comps
    }
    fn singular_set(&self) -> &SingularSet {
        &self.singular
    }
    fn shape<S: Scalar>(&self, flat: Vec<S>) -> DMatrix<S> {
        let n = self.chart.dim();
        DMatrix::from_row_slice(n, n, &flat)
    }
}

impl MatrixField {
    /// Builds from row-major components.
    pub fn new(chart: &Chart, comps: Vec<Expr>) -> Result<Self> {
        validate(chart, &comps, chart.dim() * chart.dim())?;
        Ok(MatrixField { chart: chart.clone(), comps, singular: SingularSet::new() })
    }

    pub fn from_rows(chart: &Chart, rows: Vec<Vec<Expr>>) -> Result<Self> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(GeomError::DimensionMismatch { expected: n * n, found: rows.iter().map(Vec::len).sum() });
        }
        MatrixField::new(chart, rows.into_iter().flatten().collect())
    }

    pub fn zeros(chart: &Chart) -> Self {
        MatrixField { chart: chart.clone(), comps: vec![Expr::zero(); chart.dim().pow(2)], singular: SingularSet::new() }
    }

    pub fn identity(chart: &Chart) -> Self {
        let n = chart.dim();
        let comps = (0..n * n).map(|k| if k / n == k % n { Expr::one() } else { Expr::zero() }).collect();
        MatrixField { chart: chart.clone(), comps, singular: SingularSet::new() }
    }

    pub fn diagonal(chart: &Chart, diag: Vec<Expr>) -> Result<Self> {
        let n = chart.dim();
        if diag.len() != n {
            return Err(GeomError::DimensionMismatch { expected: n, found: diag.len() });
        }
        let mut comps = vec![Expr::zero(); n * n];
        for (i, d) in diag.into_iter().enumerate() {
            comps[i * n + i] = d;
        }
        MatrixField::new(chart, comps)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.comps[i * self.chart.dim() + j]
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.comps
    }

    fn zip(&self, other: &MatrixField, f: impl Fn(&Expr, &Expr) -> Expr) -> Result<MatrixField> {
        same_chart(&self.chart, &other.chart)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| f(a, b)).collect();
        Ok(MatrixField { chart: self.chart.clone(), comps, singular: self.singular.union(&other.singular) })
    }

    pub fn add(&self, other: &MatrixField) -> Result<MatrixField> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &MatrixField) -> Result<MatrixField> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, f: &ScalarField) -> Result<MatrixField> {
        same_chart(&self.chart, f.chart())?;
        let comps = self.comps.iter().map(|a| f.expr() * a).collect();
        Ok(MatrixField { chart: self.chart.clone(), comps, singular: self.singular.union(f.singular()) })
    }

    pub fn scale_const(&self, factor: impl Into<Complex64>) -> MatrixField {
        let k = Expr::constant(factor.into());
        MatrixField { chart: self.chart.clone(), comps: self.comps.iter().map(|a| a * &k).collect(), singular: self.singular.clone() }
    }

    pub fn transpose(&self) -> MatrixField {
        let n = self.chart.dim();
        let comps = (0..n * n).map(|k| self.comps[(k % n) * n + k / n].clone()).collect();
        MatrixField { chart: self.chart.clone(), comps, singular: self.singular.clone() }
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &MatrixField) -> Result<MatrixField> {
        same_chart(&self.chart, &other.chart)?;
        let n = self.chart.dim();
        let comps = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                (0..n).map(|l| self.entry(i, l) * other.entry(l, j)).sum()
            })
            .collect();
        Ok(MatrixField { chart: self.chart.clone(), comps, singular: self.singular.union(&other.singular) })
    }

    /// `Σ_j M[i][j] v_j`.
    pub(crate) fn mul_exprs(&self, v: &[Expr]) -> Vec<Expr> {
        let n = self.chart.dim();
        (0..n).map(|i| (0..n).map(|j| self.entry(i, j) * &v[j]).sum()).collect()
    }

    /// `Σ_i M[i][j] v_i`.
    pub(crate) fn tmul_exprs(&self, v: &[Expr]) -> Vec<Expr> {
        let n = self.chart.dim();
        (0..n).map(|j| (0..n).map(|i| self.entry(i, j) * &v[i]).sum()).collect()
    }

    /// Replaces components and singular set through a coordinate substitution.
    pub fn map_exprs(&self, chart: &Chart, f: impl Fn(&Expr) -> Expr) -> MatrixField {
        MatrixField { chart: chart.clone(), comps: self.comps.iter().map(f).collect(), singular: SingularSet::new() }
    }
}

/// A field of linear operators `L^i_j` (row = upper index).
#[derive(Clone, Debug)]
pub struct OperatorField(MatrixField);

/// A bivector field `P^{ij}`; antisymmetry is checked pointwise, not enforced.
#[derive(Clone, Debug)]
pub struct BivectorField(MatrixField);

macro_rules! matrix_newtype {
    ($name:ident) => {
        impl Field for $name {
            type Value<S: Scalar> = DMatrix<S>;
            fn chart(&self) -> &Chart {
                self.0.chart()
            }
            fn components(&self) -> &[Expr] {
                self.0.components()
            }
            fn singular_set(&self) -> &SingularSet {
                self.0.singular()
            }
            fn shape<S: Scalar>(&self, flat: Vec<S>) -> DMatrix<S> {
                self.0.shape(flat)
            }
        }

        impl $name {
            pub fn new(chart: &Chart, comps: Vec<Expr>) -> Result<Self> {
                MatrixField::new(chart, comps).map($name)
            }

            pub fn from_rows(chart: &Chart, rows: Vec<Vec<Expr>>) -> Result<Self> {
                MatrixField::from_rows(chart, rows).map($name)
            }

            pub fn from_matrix(m: MatrixField) -> Self {
                $name(m)
            }

            pub fn zeros(chart: &Chart) -> Self {
                $name(MatrixField::zeros(chart))
            }

            pub fn as_matrix(&self) -> &MatrixField {
                &self.0
            }

            pub fn into_matrix(self) -> MatrixField {
                self.0
            }

            pub fn chart(&self) -> &Chart {
                self.0.chart()
            }

            pub fn entry(&self, i: usize, j: usize) -> &Expr {
                self.0.entry(i, j)
            }

            pub fn singular(&self) -> &SingularSet {
                self.0.singular()
            }

            pub fn with_singular(self, expr: Expr) -> Self {
                $name(self.0.with_singular(expr))
            }

            pub fn with_singular_set(self, set: &SingularSet) -> Self {
                $name(self.0.with_singular_set(set))
            }

            pub fn add(&self, other: &$name) -> Result<$name> {
                self.0.add(&other.0).map($name)
            }

            pub fn sub(&self, other: &$name) -> Result<$name> {
                self.0.sub(&other.0).map($name)
            }

            pub fn scale(&self, f: &ScalarField) -> Result<$name> {
                self.0.scale(f).map($name)
            }

            pub fn scale_const(&self, factor: impl Into<Complex64>) -> $name {
                $name(self.0.scale_const(factor))
            }
        }
    };
}

matrix_newtype!(OperatorField);
matrix_newtype!(BivectorField);

impl OperatorField {
    pub fn identity(chart: &Chart) -> Self {
        OperatorField(MatrixField::identity(chart))
    }

    /// `Σ_i l_i ∂/∂x_i ⊗ dx_i`.
    pub fn diagonal(chart: &Chart, diag: Vec<Expr>) -> Result<Self> {
        MatrixField::diagonal(chart, diag).map(OperatorField)
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &OperatorField) -> Result<OperatorField> {
        self.0.matmul(&other.0).map(OperatorField)
    }

    pub fn pow(&self, m: u32) -> OperatorField {
        let mut acc = OperatorField::identity(self.chart()).with_singular_set(self.singular());
        for _ in 0..m {
            acc = acc.compose(self).expect("same chart");
        }
        acc
    }

    /// `(LX)^i = L^i_j X^j`.
    pub fn apply(&self, x: &VectorField) -> Result<VectorField> {
        same_chart(self.chart(), x.chart())?;
        Ok(VectorField::from_parts(self.chart(), self.0.mul_exprs(x.exprs()), self.singular().union(x.singular())))
    }

    /// `(Lᵀα)_j = L^i_j α_i`.
    pub fn apply_transpose(&self, alpha: &OneFormField) -> Result<OneFormField> {
        same_chart(self.chart(), alpha.chart())?;
        Ok(OneFormField::from_parts(self.chart(), self.0.tmul_exprs(alpha.exprs()), self.singular().union(alpha.singular())))
    }

    /// `K·P`.
    pub fn mul_bivector(&self, p: &BivectorField) -> Result<MatrixField> {
        self.0.matmul(&p.0)
    }

    /// Polynomial `Σ_k a_k L^k` with scalar-field coefficients.
    pub fn polynomial(&self, coeffs: &[ScalarField]) -> Result<OperatorField> {
        let mut acc = OperatorField::zeros(self.chart());
        let mut power = OperatorField::identity(self.chart());
        for (k, a) in coeffs.iter().enumerate() {
            if k > 0 {
                power = power.compose(self)?;
            }
            acc = acc.add(&power.scale(a)?)?;
        }
        Ok(acc)
    }
}

impl BivectorField {
    /// `(X∧Z)^{ij} = X^i Z^j − X^j Z^i`.
    pub fn wedge(x: &VectorField, z: &VectorField) -> Result<BivectorField> {
        same_chart(x.chart(), z.chart())?;
        let n = x.chart().dim();
        let comps = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                x.component(i) * z.component(j) - x.component(j) * z.component(i)
            })
            .collect();
        let m = MatrixField::new(x.chart(), comps)?.with_singular_set(&x.singular().union(z.singular()));
        Ok(BivectorField(m))
    }

    /// `(Pα)^i = P^{ij} α_j`.
    pub fn apply(&self, alpha: &OneFormField) -> Result<VectorField> {
        same_chart(self.chart(), alpha.chart())?;
        Ok(VectorField::from_parts(self.chart(), self.0.mul_exprs(alpha.exprs()), self.singular().union(alpha.singular())))
    }

    /// `P·Kᵀ`.
    pub fn mul_transpose(&self, k: &OperatorField) -> Result<MatrixField> {
        self.0.matmul(&k.as_matrix().transpose())
    }

    /// Largest `|P^{ij} + P^{ji}|` at `p`.
    pub fn skew_residual<S: Scalar>(&self, p: &ChartPoint<S>) -> Result<f64> {
        let m = self.eval(p)?;
        Ok(crate::linalg::skew_residual(&m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> Chart {
        Chart::numbered("plane", 2)
    }

    #[test]
    fn partial_of_monomial_and_constant() {
        let c = plane();
        let f = ScalarField::new(&c, Expr::var(0) * Expr::var(1)).unwrap();
        let p = c.point(vec![3.0_f64, 5.0]).unwrap();
        assert_eq!(f.partial(&p, 0).unwrap(), 5.0);
        let k = ScalarField::constant(&c, 7.0);
        assert_eq!(k.partial(&p, 1).unwrap(), 0.0);
    }

    #[test]
    fn partial_index_out_of_range() {
        let c = plane();
        let f = ScalarField::coordinate(&c, 0).unwrap();
        let p = c.point(vec![1.0_f64, 1.0]).unwrap();
        assert_eq!(f.partial(&p, 2).unwrap_err(), GeomError::IndexOutOfRange { index: 2, dim: 2 });
    }

    #[test]
    fn declared_singular_point_is_rejected() {
        let c = plane();
        let f = ScalarField::new(&c, Expr::var(0).sin()).unwrap().with_singular(Expr::var(1));
        let p = c.point(vec![1.0_f64, 0.0]).unwrap();
        assert_eq!(f.eval(&p).unwrap_err(), GeomError::Singular);
        assert_eq!(f.partial(&p, 0).unwrap_err(), GeomError::Singular);
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = ScalarField::coordinate(&Chart::numbered("a", 2), 0).unwrap();
        let b = ScalarField::coordinate(&Chart::numbered("b", 2), 0).unwrap();
        assert!(matches!(a.add(&b), Err(GeomError::ChartMismatch { .. })));
        let p = Chart::numbered("b", 2).point(vec![0.0_f64, 0.0]).unwrap();
        assert!(matches!(a.eval(&p), Err(GeomError::ChartMismatch { .. })));
    }

    #[test]
    fn identity_and_diagonal_action() {
        let c = plane();
        let x = VectorField::new(&c, vec![Expr::one(), Expr::one()]).unwrap();
        let id = OperatorField::identity(&c);
        let p = c.point(vec![1.0_f64, 2.0]).unwrap();
        assert_eq!(id.apply(&x).unwrap().eval(&p).unwrap(), x.eval(&p).unwrap());
        let l = OperatorField::diagonal(&c, vec![Expr::var(1), Expr::var(0)]).unwrap();
        let lx = l.apply(&x).unwrap().eval(&p).unwrap();
        assert_eq!(lx.as_slice(), &[2.0, 1.0]);
    }

    #[test]
    fn wedge_with_itself_vanishes() {
        let c = plane();
        let x = VectorField::new(&c, vec![Expr::var(0) * Expr::var(1), Expr::var(1).sin()]).unwrap();
        let w = BivectorField::wedge(&x, &x).unwrap();
        let p = c.point(vec![0.3_f64, -1.1]).unwrap();
        assert!(w.eval(&p).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn transpose_and_powers() {
        let c = plane();
        let l = OperatorField::from_rows(&c, vec![vec![Expr::zero(), Expr::one()], vec![Expr::var(0), Expr::zero()]]).unwrap();
        let p = c.point(vec![2.0_f64, 3.0]).unwrap();
        let l2 = l.pow(2).eval(&p).unwrap();
        let v = l.eval(&p).unwrap();
        assert_eq!(l2, &v * &v);
        assert_eq!(l.as_matrix().transpose().eval(&p).unwrap(), v.transpose());
    }
}
