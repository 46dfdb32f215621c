//! Finite-difference oracles, independent of the dual-number engine.

#![allow(dead_code)]

use haantjes::{Chart, ChartPoint, Expr, Field, OperatorField, C64};

pub const FD_STEP: f64 = 1e-6;

/// Central difference with one Richardson level along coordinate `k`.
pub fn fd_partial(f: impl Fn(&[C64]) -> C64, x: &[C64], k: usize) -> C64 {
    let central = |h: f64| {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[k] += h;
        minus[k] -= h;
        (f(&plus) - f(&minus)) / (2.0 * h)
    };
    (central(FD_STEP / 2.0) * 4.0 - central(FD_STEP)) / 3.0
}

pub fn fd_expr_partial(e: &Expr, x: &[C64], k: usize) -> C64 {
    fd_partial(|y| e.eval(y).unwrap(), x, k)
}

/// `(value[i][j], partial[a][i][j])` of an operator field by finite differences.
pub fn fd_operator_jet(l: &OperatorField, p: &ChartPoint<C64>) -> (Vec<Vec<C64>>, Vec<Vec<Vec<C64>>>) {
    let n = l.dim();
    let x = p.coords();
    let value = (0..n).map(|i| (0..n).map(|j| l.entry(i, j).eval(x).unwrap()).collect()).collect();
    let partial = (0..n)
        .map(|a| (0..n).map(|i| (0..n).map(|j| fd_expr_partial(l.entry(i, j), x, a)).collect()).collect())
        .collect();
    (value, partial)
}

/// Nijenhuis torsion by direct summation of the local formula; `t[i][j][k]`.
pub fn fd_nijenhuis(l: &OperatorField, p: &ChartPoint<C64>) -> Vec<Vec<Vec<C64>>> {
    let n = l.dim();
    let (v, d) = fd_operator_jet(l, p);
    let mut t = vec![vec![vec![C64::new(0.0, 0.0); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for a in 0..n {
                    t[i][j][k] += d[a][i][k] * v[a][j] - d[a][i][j] * v[a][k] + (d[k][a][j] - d[j][a][k]) * v[i][a];
                }
            }
        }
    }
    t
}

/// Haantjes torsion by direct summation on top of [`fd_nijenhuis`].
pub fn fd_haantjes(l: &OperatorField, p: &ChartPoint<C64>) -> Vec<Vec<Vec<C64>>> {
    let n = l.dim();
    let (v, _) = fd_operator_jet(l, p);
    let t = fd_nijenhuis(l, p);
    let mut h = vec![vec![vec![C64::new(0.0, 0.0); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        h[i][j][k] += v[i][a] * v[a][b] * t[b][j][k] + t[i][a][b] * v[a][j] * v[b][k]
                            - v[i][a] * (t[a][b][k] * v[b][j] + t[a][j][b] * v[b][k]);
                    }
                }
            }
        }
    }
    h
}

pub fn chart(n: usize) -> Chart {
    Chart::numbered(format!("r{n}"), n)
}
