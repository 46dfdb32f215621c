//! The Lagrange top as a Poisson–Haantjes system.
//!
//! Presets for the Euler chart, the Euler–Poisson chart with its three
//! compatible bivectors, the complex chart adapted to the symplectic leaves
//! of `P1`, the Nijenhuis operator `N` with its Benenti family, the leaf
//! reduction and the separation variables. A fixed-step RK4 integrator
//! drives the equations of motion and tracks conserved quantities.
//!
//! ```
//! use haantjes_lagrange::{EulerPoissonFields, TopParams};
//! use haantjes::Field;
//!
//! let fields = EulerPoissonFields::new(&TopParams::default()).unwrap();
//! let p = fields.chart.point(vec![1.0_f64, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
//! assert_eq!(fields.f2.eval(&p).unwrap(), -0.5);
//! ```

pub mod complex;
pub mod error;
pub mod euler;
pub mod euler_poisson;
pub mod flow;
pub mod leaf;
pub mod params;
pub mod separation;
pub mod util;

pub use complex::{
    benenti_operators, complex_map, deformation, nijenhuis_operator, to_complex_chart, BenentiOperators, ComplexChartFields,
    Deformation, NReading,
};
pub use error::{Result, TopError};
pub use euler::{euler_chain_operators, euler_hamiltonian, EulerChain, EulerChart};
pub use euler_poisson::{euler_poisson_fields, gz_chain_check, EulerPoissonFields, GzChainReport};
pub use flow::{integrate_flow, Method, Trajectory, CSV_HEADER};
pub use leaf::{restricted_hamiltonian_chain, ChainSign, Leaf, LeafFields, RestrictedChain};
pub use params::TopParams;
pub use separation::{eigenform_pairing, separation_chart, MomentumReading, PairingReport, SeparationChart};

/// Coordinate names of the real Euler–Poisson chart.
pub const EULER_POISSON_COORDS: [&str; 6] = ["w1", "w2", "w3", "g1", "g2", "g3"];
/// Coordinate names of the complex chart.
pub const COMPLEX_COORDS: [&str; 6] = ["x1", "x2", "y1", "y2", "F1", "F4"];
/// Coordinate names of a symplectic leaf.
pub const LEAF_COORDS: [&str; 4] = ["x1", "x2", "y1", "y2"];
/// Coordinate names of the separation chart.
pub const SEPARATION_COORDS: [&str; 4] = ["l1", "l2", "m1", "m2"];
/// Coordinate names of the Euler chart.
pub const EULER_COORDS: [&str; 6] = ["phi", "theta", "psi", "p_phi", "p_theta", "p_psi"];
