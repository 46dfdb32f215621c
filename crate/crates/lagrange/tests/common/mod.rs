//! Difference-quotient oracles for scalar fields given as expressions.

#![allow(dead_code)]

use haantjes::{Expr, C64};

const STEP: f64 = 1e-6;

/// Central difference with one Richardson level along coordinate `k`.
pub fn fd_partial(e: &Expr, x: &[C64], k: usize) -> C64 {
    let central = |h: f64| {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[k] += h;
        minus[k] -= h;
        (e.eval(&plus).unwrap() - e.eval(&minus).unwrap()) / (2.0 * h)
    };
    (central(STEP / 2.0) * 4.0 - central(STEP)) / 3.0
}

pub fn fd_gradient(e: &Expr, x: &[C64]) -> Vec<C64> {
    (0..x.len()).map(|k| fd_partial(e, x, k)).collect()
}
