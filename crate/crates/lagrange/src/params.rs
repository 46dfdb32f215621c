//! Physical parameters of the top.

use crate::error::{Result, TopError};

/// Inertia moments `A` (equatorial) and `c·A` (symmetry axis), and the
/// gravity coupling `μga`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopParams {
    pub c: f64,
    pub a: f64,
    /// When set, `μga = A`; otherwise `mu_ga` is used as given.
    pub normalized: bool,
    pub mu_ga: f64,
}

impl Default for TopParams {
    fn default() -> Self {
        TopParams { c: 2.0, a: 1.0, normalized: true, mu_ga: 1.0 }
    }
}

impl TopParams {
    /// Normalized parameters with `A = 1`.
    pub fn with_c(c: f64) -> Result<Self> {
        TopParams { c, ..TopParams::default() }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(TopError::InvalidParams(format!("c must be positive, got {}", self.c)));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(TopError::InvalidParams(format!("A must be positive, got {}", self.a)));
        }
        if !self.normalized && !self.mu_ga.is_finite() {
            return Err(TopError::InvalidParams(format!("μga must be finite, got {}", self.mu_ga)));
        }
        Ok(self)
    }

    pub fn mu_ga(&self) -> f64 {
        if self.normalized {
            self.a
        } else {
            self.mu_ga
        }
    }

    /// `c − 1`, the coupling that vanishes for the symmetric case.
    pub fn c1(&self) -> f64 {
        self.c - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let p = TopParams::default();
        assert_eq!((p.c, p.a, p.mu_ga()), (2.0, 1.0, 1.0));
        assert!(TopParams::with_c(0.0).is_err());
        assert!(TopParams::with_c(f64::NAN).is_err());
        assert!(TopParams { a: -1.0, ..p }.validated().is_err());
        let free = TopParams { normalized: false, mu_ga: 3.0, a: 2.0, ..p };
        assert_eq!(free.mu_ga(), 3.0);
        assert_eq!(TopParams { a: 2.0, ..p }.mu_ga(), 2.0);
    }
}
