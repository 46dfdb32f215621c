//! Scalar types the geometry engine is generic over.
//!
//! Every pointwise computation in this crate (field evaluation, torsions,
//! Poisson brackets, Lie derivatives) is written against [`Scalar`]. The
//! trait is implemented for `f32`, `f64`, `Complex<f32>`, `Complex<f64>` and
//! for [`Dual`] over any of them, which is how first derivatives are obtained.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};

/// Field of scalars a chart can be evaluated over.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Embeds a complex constant. `None` when the type cannot hold it
    /// (a nonzero imaginary part on a real type).
    fn from_complex(z: Complex64) -> Option<Self>;

    fn from_f64(x: f64) -> Self;

    /// Principal branch for complex types.
    fn sqrt(self) -> Self;

    fn sin(self) -> Self;

    fn cos(self) -> Self;

    /// Value part as a complex number; derivative parts are dropped.
    fn to_complex(self) -> Complex64;

    fn is_finite(self) -> bool;

    /// Modulus of the value part.
    fn modulus(self) -> f64 {
        self.to_complex().norm()
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_complex(z: Complex64) -> Option<Self> {
                (z.im == 0.0).then_some(z.re as $t)
            }
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            fn to_complex(self) -> Complex64 {
                Complex64::new(self as f64, 0.0)
            }
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
            fn modulus(self) -> f64 {
                (self as f64).abs()
            }
        }
    };
}

macro_rules! complex_scalar {
    ($t:ty) => {
        impl Scalar for Complex<$t> {
            fn from_complex(z: Complex64) -> Option<Self> {
                Some(Complex::new(z.re as $t, z.im as $t))
            }
            fn from_f64(x: f64) -> Self {
                Complex::new(x as $t, 0.0)
            }
            fn sqrt(self) -> Self {
                Complex::sqrt(self)
            }
            fn sin(self) -> Self {
                Complex::sin(self)
            }
            fn cos(self) -> Self {
                Complex::cos(self)
            }
            fn to_complex(self) -> Complex64 {
                Complex64::new(self.re as f64, self.im as f64)
            }
            fn is_finite(self) -> bool {
                self.re.is_finite() && self.im.is_finite()
            }
        }
    };
}

real_scalar!(f32);
real_scalar!(f64);
complex_scalar!(f32);
complex_scalar!(f64);

/// First-order dual number `re + eps·ε` with `ε² = 0`.
///
/// Seeding one coordinate with `eps = 1` and evaluating a rational
/// expression yields its partial derivative along that coordinate, exact up
/// to rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: S) -> Self {
        Dual { re, eps: S::zero() }
    }

    pub fn variable(re: S) -> Self {
        Dual { re, eps: S::one() }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual::new(self.re * rhs.re, self.eps * rhs.re + self.re * rhs.eps)
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = S::one() / rhs.re;
        let re = self.re * inv;
        Dual::new(re, (self.eps - re * rhs.eps) * inv)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<S: Scalar> AddAssign for Dual<S> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<S: Scalar> SubAssign for Dual<S> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<S: Scalar> MulAssign for Dual<S> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<S: Scalar> DivAssign for Dual<S> {
    fn div_assign(&mut self, rhs: Self) {
        *self = *self / rhs;
    }
}

impl<S: Scalar> Zero for Dual<S> {
    fn zero() -> Self {
        Dual::constant(S::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<S: Scalar> One for Dual<S> {
    fn one() -> Self {
        Dual::constant(S::one())
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn from_complex(z: Complex64) -> Option<Self> {
        S::from_complex(z).map(Dual::constant)
    }

    fn from_f64(x: f64) -> Self {
        Dual::constant(S::from_f64(x))
    }

    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        Dual::new(r, self.eps / (S::from_f64(2.0) * r))
    }

    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }

    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }

    fn to_complex(self) -> Complex64 {
        self.re.to_complex()
    }

    fn is_finite(self) -> bool {
        self.re.is_finite() && self.eps.is_finite()
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let lower = self.re.powi(n - 1);
        Dual::new(lower * self.re, S::from_f64(n as f64) * lower * self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_product_rule() {
        let x = Dual::variable(3.0_f64);
        let y = Dual::constant(5.0_f64);
        assert_eq!((x * y).eps, 5.0);
    }

    #[test]
    fn dual_quotient_and_powers() {
        let x = Dual::variable(2.0_f64);
        let r = Dual::constant(1.0) / x;
        assert_eq!(r.re, 0.5);
        assert_eq!(r.eps, -0.25);
        let cube = x.powi(3);
        assert_eq!(cube.re, 8.0);
        assert_eq!(cube.eps, 12.0);
        let inv2 = x.powi(-2);
        assert!((inv2.eps + 0.25).abs() < 1e-15);
    }

    #[test]
    fn dual_sqrt_on_principal_branch() {
        let z = Dual::variable(Complex64::new(-4.0, 0.0));
        let s = z.sqrt();
        assert_eq!(s.re, Complex64::new(0.0, 2.0));
        // d sqrt(z) = 1 / (2 sqrt z) = 1/(4i) = -i/4
        assert!((s.eps - Complex64::new(0.0, -0.25)).norm() < 1e-15);
    }

    #[test]
    fn real_types_reject_imaginary_constants() {
        assert_eq!(f64::from_complex(Complex64::new(1.0, 0.0)), Some(1.0));
        assert_eq!(f64::from_complex(Complex64::new(1.0, 1.0)), None);
        assert!(Complex64::from_complex(Complex64::i()).is_some());
    }

    #[test]
    fn integer_powers_match_repeated_products() {
        let z = Complex64::new(0.3, -1.2);
        assert!((z.powi(4) - z * z * z * z).norm() < 1e-14);
        assert!((Scalar::powi(z, -3) * z * z * z - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(Scalar::powi(2.0_f32, 0), 1.0);
    }
}
