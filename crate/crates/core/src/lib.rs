//! Numerical verification of Nijenhuis and Haantjes geometry on coordinate
//! charts: torsions, Haantjes algebras, Poisson structures and
//! Magri–Haantjes chains.
//!
//! Fields are expression trees over chart coordinates. They are evaluated
//! over any [`Scalar`] (`f32`, `f64` and their complex counterparts), and
//! differentiated pointwise with forward-mode [`Dual`] numbers. Claims such as
//! "`L` is a Haantjes operator" are checked on seeded random samples and
//! reported with the worst residual found.
//!
//! ```
//! use haantjes::{is_haantjes, Chart, Expr, OperatorField, SampleSpec, SingularSet, C64};
//!
//! let chart = Chart::numbered("plane", 2);
//! let l = OperatorField::diagonal(&chart, vec![Expr::var(1), Expr::var(0)]).unwrap();
//! let sample = SampleSpec::new(50, 7).draw::<C64>(&chart, &SingularSet::new()).unwrap();
//! assert!(is_haantjes(&l, &sample, 1e-9).unwrap().vanishes);
//! ```

pub mod algebra;
pub mod calculus;
pub mod chart;
pub mod check;
pub mod error;
pub mod expr;
pub mod field;
pub mod linalg;
pub mod poisson;
pub mod sample;
pub mod scalar;
pub mod torsion;

pub use algebra::{
    check_abelian, check_module_condition, check_ring_condition, cyclic_algebra, minimal_polynomial, AlgebraVerification,
    HaantjesAlgebra, RankReport,
};
pub use calculus::{differential, exterior_derivative, lie_bracket, partial_derivative, CoordinateMap};
pub use chart::{Chart, ChartPoint};
pub use check::{Residual, Tolerances, EPS_DERIV, EPS_EXACT};
pub use error::{GeomError, Result};
pub use expr::Expr;
pub use field::{
    BivectorField, Field, Jet, MatrixField, OneFormField, OperatorField, ScalarField, SingularComponent, SingularSet,
    VectorField,
};
pub use linalg::MinimalPolynomial;
pub use poisson::{
    build_chain_oneforms, build_chain_vectorfields, check_compatibility, check_skew_compositions, gradient,
    hamiltonian_field, jacobi_residual, lie_derivative_bivector, lie_derivative_oneform, lie_derivative_operator,
    poisson_bracket, r_tensor, ChainCheck, ChainElements, MagriChain, PoissonStructure, SkewCompositions,
};
pub use sample::{random_polynomial, Sample, SampleSpec};
pub use scalar::{Dual, Scalar};
pub use torsion::{haantjes_torsion, is_haantjes, is_nijenhuis, nijenhuis_torsion, TorsionCheck, TorsionValue};

pub use num_complex::{Complex, Complex32, Complex64};

pub type C64 = Complex64;
pub type C32 = Complex32;

/// Points with complex double-precision coordinates, the default scalar.
pub type Point = ChartPoint<C64>;
pub type RealPoint = ChartPoint<f64>;
pub type Point32 = ChartPoint<C32>;
pub type RealPoint32 = ChartPoint<f32>;

pub type ComplexSample = Sample<C64>;
pub type RealSample = Sample<f64>;

pub type Torsion = TorsionValue<C64>;
pub type RealTorsion = TorsionValue<f64>;
