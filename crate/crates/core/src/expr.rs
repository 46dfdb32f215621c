//! Expression trees for field components.
//!
//! An [`Expr`] is an immutable, cheaply clonable DAG over chart coordinates.
//! Evaluation is generic over [`Scalar`], so the same component function is
//! evaluated over `f64`, `Complex64` or dual numbers. Constructors fold
//! constants and drop structural zeros/ones; there is no other rewriting.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::scalar::Scalar;

#[derive(Clone)]
pub struct Expr(Arc<Inner>);

struct Inner {
    node: Node,
    /// Number of nodes counted as a tree (saturating).
    tree_size: u64,
    max_var: Option<usize>,
}

/// Trees larger than this are evaluated with a per-call cache over shared nodes.
const SHARED_EVAL_THRESHOLD: u64 = 64;

#[derive(Debug)]
enum Node {
    Const(Complex64),
    Var(usize),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Neg(Expr),
    Recip(Expr),
    Powi(Expr, i32),
    Sqrt(Expr),
    Sin(Expr),
    Cos(Expr),
}

impl Expr {
    fn node(node: Node) -> Self {
        let (tree_size, max_var) = match &node {
            Node::Const(_) => (1, None),
            Node::Var(i) => (1, Some(*i)),
            Node::Add(a, b) | Node::Mul(a, b) => {
                (1u64.saturating_add(a.0.tree_size).saturating_add(b.0.tree_size), a.0.max_var.max(b.0.max_var))
            }
            Node::Neg(a) | Node::Recip(a) | Node::Powi(a, _) | Node::Sqrt(a) | Node::Sin(a) | Node::Cos(a) => {
                (a.0.tree_size.saturating_add(1), a.0.max_var)
            }
        };
        Expr(Arc::new(Inner { node, tree_size, max_var }))
    }

    pub fn constant(z: Complex64) -> Self {
        Expr::node(Node::Const(z))
    }

    pub fn real(x: f64) -> Self {
        Expr::constant(Complex64::new(x, 0.0))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Expr::constant(Complex64::i())
    }

    pub fn zero() -> Self {
        Expr::real(0.0)
    }

    pub fn one() -> Self {
        Expr::real(1.0)
    }

    /// The `index`-th chart coordinate.
    pub fn var(index: usize) -> Self {
        Expr::node(Node::Var(index))
    }

    /// Same underlying node (pointer identity).
    pub fn same_node(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        match self.0.node {
            Node::Const(z) => Some(z),
            _ => None,
        }
    }

    /// Structural zero (a folded constant 0).
    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(Complex64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_constant() == Some(Complex64::new(1.0, 0.0))
    }

    pub fn recip(&self) -> Expr {
        match self.as_constant() {
            Some(z) if z != Complex64::new(0.0, 0.0) => Expr::constant(z.inv()),
            _ => Expr::node(Node::Recip(self.clone())),
        }
    }

    pub fn powi(&self, n: i32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => self.clone(),
            _ => match self.as_constant() {
                Some(z) if n > 0 || z != Complex64::new(0.0, 0.0) => Expr::constant(z.powi(n)),
                _ => Expr::node(Node::Powi(self.clone(), n)),
            },
        }
    }

    pub fn sqrt(&self) -> Expr {
        Expr::node(Node::Sqrt(self.clone()))
    }

    pub fn sin(&self) -> Expr {
        match self.as_constant() {
            Some(z) if z == Complex64::new(0.0, 0.0) => Expr::zero(),
            _ => Expr::node(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_constant() {
            Some(z) if z == Complex64::new(0.0, 0.0) => Expr::one(),
            _ => Expr::node(Node::Cos(self.clone())),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.0.max_var
    }

    /// Evaluates at `x`. Division by an exact zero reports [`GeomError::Singular`].
    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
        if self.0.tree_size <= SHARED_EVAL_THRESHOLD {
            self.eval_tree(x)
        } else {
            self.eval_shared(x, &mut HashMap::new())
        }
    }

    fn eval_tree<S: Scalar>(&self, x: &[S]) -> Result<S> {
        self.eval_node(x, &mut |e| e.eval_tree(x))
    }

    fn eval_shared<S: Scalar>(&self, x: &[S], memo: &mut HashMap<*const Inner, S>) -> Result<S> {
        if self.0.tree_size <= SHARED_EVAL_THRESHOLD {
            return self.eval_tree(x);
        }
        let key = Arc::as_ptr(&self.0);
        if let Some(v) = memo.get(&key) {
            return Ok(*v);
        }
        let v = self.eval_node(x, &mut |e| e.eval_shared(x, memo))?;
        memo.insert(key, v);
        Ok(v)
    }

    fn eval_node<S: Scalar>(&self, x: &[S], child: &mut dyn FnMut(&Expr) -> Result<S>) -> Result<S> {
        Ok(match &self.0.node {
            Node::Const(z) => S::from_complex(*z).ok_or(GeomError::NonRealConstant)?,
            Node::Var(i) => *x.get(*i).ok_or(GeomError::IndexOutOfRange { index: *i, dim: x.len() })?,
            Node::Add(a, b) => child(a)? + child(b)?,
            Node::Mul(a, b) => child(a)? * child(b)?,
            Node::Neg(a) => -child(a)?,
            Node::Recip(a) => {
                let v = child(a)?;
                if v.modulus() == 0.0 {
                    return Err(GeomError::Singular);
                }
                S::one() / v
            }
            Node::Powi(a, n) => {
                let v = child(a)?;
                if *n < 0 && v.modulus() == 0.0 {
                    return Err(GeomError::Singular);
                }
                v.powi(*n)
            }
            Node::Sqrt(a) => child(a)?.sqrt(),
            Node::Sin(a) => child(a)?.sin(),
            Node::Cos(a) => child(a)?.cos(),
        })
    }

    /// Exact symbolic partial derivative along coordinate `k`.
    ///
    /// Used where a derivative has to become a field again (brackets,
    /// differentials, coordinate-change Jacobians); pointwise derivatives go
    /// through dual numbers instead.
    pub fn diff(&self, k: usize) -> Expr {
        self.diff_memo(k, &mut HashMap::new())
    }

    fn diff_memo(&self, k: usize, memo: &mut HashMap<*const Inner, Expr>) -> Expr {
        let key = Arc::as_ptr(&self.0);
        if let Some(d) = memo.get(&key) {
            return d.clone();
        }
        let d = match &self.0.node {
            Node::Const(_) => Expr::zero(),
            Node::Var(i) => {
                if *i == k {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => a.diff_memo(k, memo) + b.diff_memo(k, memo),
            Node::Mul(a, b) => a.diff_memo(k, memo) * b + a * b.diff_memo(k, memo),
            Node::Neg(a) => -a.diff_memo(k, memo),
            Node::Recip(a) => -(a.diff_memo(k, memo) * self.powi(2)),
            Node::Powi(a, n) => Expr::real(*n as f64) * a.powi(n - 1) * a.diff_memo(k, memo),
            Node::Sqrt(a) => a.diff_memo(k, memo) * (Expr::real(2.0) * self).recip(),
            Node::Sin(a) => a.cos() * a.diff_memo(k, memo),
            Node::Cos(a) => -(a.sin() * a.diff_memo(k, memo)),
        };
        memo.insert(key, d.clone());
        d
    }

    /// Replaces coordinate `j` by `subs[j]`. Indices past `subs.len()` are kept.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        self.subst_memo(subs, &mut HashMap::new())
    }

    fn subst_memo(&self, subs: &[Expr], memo: &mut HashMap<*const Inner, Expr>) -> Expr {
        let key = Arc::as_ptr(&self.0);
        if let Some(e) = memo.get(&key) {
            return e.clone();
        }
        let e = match &self.0.node {
            Node::Const(_) => self.clone(),
            Node::Var(i) => subs.get(*i).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(a, b) => a.subst_memo(subs, memo) + b.subst_memo(subs, memo),
            Node::Mul(a, b) => a.subst_memo(subs, memo) * b.subst_memo(subs, memo),
            Node::Neg(a) => -a.subst_memo(subs, memo),
            Node::Recip(a) => a.subst_memo(subs, memo).recip(),
            Node::Powi(a, n) => a.subst_memo(subs, memo).powi(*n),
            Node::Sqrt(a) => a.subst_memo(subs, memo).sqrt(),
            Node::Sin(a) => a.subst_memo(subs, memo).sin(),
            Node::Cos(a) => a.subst_memo(subs, memo).cos(),
        };
        memo.insert(key, e.clone());
        e
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.node {
            Node::Const(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Node::Const(z) => write!(f, "({}{:+}i)", z.re, z.im),
            Node::Var(i) => write!(f, "x{i}"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Mul(a, b) => write!(f, "{a}*{b}"),
            Node::Neg(a) => write!(f, "-{a}"),
            Node::Recip(a) => write!(f, "1/{a}"),
            Node::Powi(a, n) => write!(f, "{a}^{n}"),
            Node::Sqrt(a) => write!(f, "sqrt({a})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

fn add(a: &Expr, b: &Expr) -> Expr {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => Expr::constant(x + y),
        _ if a.is_zero() => b.clone(),
        _ if b.is_zero() => a.clone(),
        _ => Expr::node(Node::Add(a.clone(), b.clone())),
    }
}

fn mul(a: &Expr, b: &Expr) -> Expr {
    match (a.as_constant(), b.as_constant()) {
        (Some(x), Some(y)) => Expr::constant(x * y),
        _ if a.is_zero() || b.is_zero() => Expr::zero(),
        _ if a.is_one() => b.clone(),
        _ if b.is_one() => a.clone(),
        _ => Expr::node(Node::Mul(a.clone(), b.clone())),
    }
}

fn neg(a: &Expr) -> Expr {
    match &a.0.node {
        Node::Const(z) => Expr::constant(-z),
        Node::Neg(inner) => inner.clone(),
        _ => Expr::node(Node::Neg(a.clone())),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $body(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $body(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $body(self, &rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $body(self, rhs)
            }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: f64) -> Expr {
                $body(&self, &Expr::real(rhs))
            }
        }
        impl $tr<f64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: f64) -> Expr {
                $body(self, &Expr::real(rhs))
            }
        }
        impl $tr<Expr> for f64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $body(&Expr::real(self), &rhs)
            }
        }
        impl $tr<&Expr> for f64 {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $body(&Expr::real(self), rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Mul, mul, mul);
binop!(Sub, sub, |a: &Expr, b: &Expr| add(a, &neg(b)));
binop!(Div, div, |a: &Expr, b: &Expr| mul(a, &b.recip()));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(self)
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Self {
        Expr::real(x)
    }
}

impl From<Complex64> for Expr {
    fn from(z: Complex64) -> Self {
        Expr::constant(z)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |acc, e| acc + e)
    }
}
