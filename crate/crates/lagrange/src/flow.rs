//! Fixed-step integration of a vector field with conserved-quantity tracking.

use std::io::Write;

use haantjes::{Field, GeomError, ScalarField, VectorField};

use crate::error::{Result, TopError};
use crate::euler_poisson::EulerPoissonFields;

/// Column header of a Lagrange-top trajectory.
pub const CSV_HEADER: [&str; 14] = ["t", "w1", "w2", "w3", "g1", "g2", "g3", "F1", "F2", "F3", "F4", "h0", "h1", "h2"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order Runge–Kutta.
    #[default]
    Rk4,
}

/// States and observable values at `t_k = k·dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `observables[k][j]` is observable `j` at step `k`.
    pub observables: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Per observable, `max_k |o_k − o_0| / |o_0|`; absolute when `o_0 = 0`.
    pub fn max_drift(&self) -> Vec<f64> {
        let Some(first) = self.observables.first() else {
            return Vec::new();
        };
        (0..first.len())
            .map(|j| {
                let o0 = first[j];
                let denom = if o0 == 0.0 { 1.0 } else { o0.abs() };
                self.observables.iter().map(|row| (row[j] - o0).abs() / denom).fold(0.0, f64::max)
            })
            .collect()
    }

    /// Rows `t, state…, observables…`, 17 significant digits each.
    pub fn write_csv<W: Write>(&self, out: W, header: &[&str]) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header)?;
        for ((t, s), o) in self.times.iter().zip(&self.states).zip(&self.observables) {
            let row = std::iter::once(t).chain(s).chain(o).map(|v| format!("{v:.16e}"));
            w.write_record(row)?;
        }
        w.flush()
    }
}

fn derivative(x: &VectorField, y: &[f64], t: f64) -> Result<Vec<f64>> {
    let p = x.chart().point(y.to_vec())?;
    match x.eval(&p) {
        Ok(v) => Ok(v.iter().copied().collect()),
        Err(GeomError::Singular) => Err(TopError::SingularState { t }),
        Err(GeomError::NonFinite) => Err(TopError::BlowUp { last_valid: t }),
        Err(e) => Err(e.into()),
    }
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn observe(observables: &[&ScalarField], x: &VectorField, y: &[f64], t: f64) -> Result<Vec<f64>> {
    let p = x.chart().point(y.to_vec())?;
    observables
        .iter()
        .map(|f| match f.eval(&p) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) | Err(GeomError::NonFinite) => Err(TopError::BlowUp { last_valid: t }),
            Err(GeomError::Singular) => Err(TopError::SingularState { t }),
            Err(e) => Err(e.into()),
        })
        .collect()
}

/// Integrates `ẏ = X(y)` from `s0` with `round(t_max/dt)` steps of size `dt`.
pub fn integrate_flow(
    x: &VectorField,
    observables: &[&ScalarField],
    s0: &[f64],
    dt: f64,
    t_max: f64,
    method: Method,
) -> Result<Trajectory> {
    if s0.len() != x.dim() {
        return Err(GeomError::DimensionMismatch { expected: x.dim(), found: s0.len() }.into());
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(TopError::InvalidStep(format!("dt must be positive, got {dt}")));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(TopError::InvalidStep(format!("t_max must be non-negative, got {t_max}")));
    }
    if s0.iter().any(|v| !v.is_finite()) {
        return Err(TopError::BlowUp { last_valid: 0.0 });
    }
    let steps = (t_max / dt).round() as usize;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        observables: Vec::with_capacity(steps + 1),
    };
    let mut y = s0.to_vec();
    if x.singular().contains(&y) {
        return Err(TopError::SingularState { t: 0.0 });
    }
    traj.observables.push(observe(observables, x, &y, 0.0)?);
    traj.times.push(0.0);
    traj.states.push(y.clone());
    for k in 0..steps {
        let t = k as f64 * dt;
        y = match method {
            Method::Rk4 => {
                let k1 = derivative(x, &y, t)?;
                let k2 = derivative(x, &axpy(&y, dt / 2.0, &k1), t)?;
                let k3 = derivative(x, &axpy(&y, dt / 2.0, &k2), t)?;
                let k4 = derivative(x, &axpy(&y, dt, &k3), t)?;
                (0..y.len()).map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
            }
        };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(TopError::BlowUp { last_valid: t });
        }
        let t_next = (k + 1) as f64 * dt;
        if x.singular().contains(&y) {
            return Err(TopError::SingularState { t: t_next });
        }
        traj.observables.push(observe(observables, x, &y, t)?);
        traj.times.push(t_next);
        traj.states.push(y.clone());
    }
    Ok(traj)
}

impl EulerPoissonFields {
    /// The Lagrange flow with `F1…F4, h0, h1, h2` recorded at every step.
    pub fn integrate(&self, init: &[f64; 6], dt: f64, t_max: f64) -> Result<Trajectory> {
        let obs = [&self.f1, &self.f2, &self.f3, &self.f4, &self.h0, &self.h1, &self.h2];
        integrate_flow(&self.x_l, &obs, init, dt, t_max, Method::Rk4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::TopParams;
    use haantjes::{Chart, Expr};

    fn fields() -> EulerPoissonFields {
        EulerPoissonFields::new(&TopParams::default()).unwrap()
    }

    #[test]
    fn equilibrium_is_constant() {
        let tr = fields().integrate(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0], 1e-2, 1.0).unwrap();
        assert_eq!(tr.len(), 101);
        assert!(tr.states.iter().all(|s| s == &tr.states[0]));
        assert!(tr.max_drift().iter().all(|d| *d == 0.0));
    }

    #[test]
    fn zero_horizon_keeps_initial_state() {
        let tr = fields().integrate(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6], 1e-3, 0.0).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.states[0], vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
    }

    #[test]
    fn rk4_is_exact_on_linear_decay_to_fourth_order() {
        let chart = Chart::numbered("line", 1);
        let x = VectorField::new(&chart, vec![-Expr::var(0)]).unwrap();
        let tr = integrate_flow(&x, &[], &[1.0], 0.1, 1.0, Method::Rk4).unwrap();
        let step = 1.0 - 0.1 + 0.01 / 2.0 - 0.001 / 6.0 + 0.0001 / 24.0;
        assert!((tr.states[10][0] - f64::powi(step, 10)).abs() < 1e-15);
    }

    #[test]
    fn blow_up_reports_last_valid_time() {
        let chart = Chart::numbered("line", 1);
        let x = VectorField::new(&chart, vec![Expr::var(0).powi(2)]).unwrap();
        match integrate_flow(&x, &[], &[1.0], 0.1, 100.0, Method::Rk4) {
            Err(TopError::BlowUp { last_valid }) => assert!(last_valid > 0.5 && last_valid < 100.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singular_start_is_rejected() {
        let chart = Chart::numbered("line", 1);
        let x = VectorField::new(&chart, vec![Expr::var(0).recip()]).unwrap().with_singular(Expr::var(0));
        assert_eq!(integrate_flow(&x, &[], &[0.0], 0.1, 1.0, Method::Rk4), Err(TopError::SingularState { t: 0.0 }));
    }

    #[test]
    fn csv_layout() {
        let tr = fields().integrate(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6], 1e-3, 2e-3).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &CSV_HEADER).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 4);
        let first: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first.len(), 14);
        assert_eq!(first[1], 0.1);
        assert_eq!(lines[1].split(',').nth(1).unwrap(), "1.0000000000000001e-1");
    }
}
