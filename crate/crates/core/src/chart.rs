use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::scalar::Scalar;

/// A named coordinate chart `(x_1, …, x_n)`.
#[derive(Clone)]
pub struct Chart(Arc<ChartInner>);

struct ChartInner {
    id: String,
    coords: Vec<String>,
}

impl Chart {
    pub fn new(id: impl Into<String>, coords: &[&str]) -> Self {
        Chart(Arc::new(ChartInner {
            id: id.into(),
            coords: coords.iter().map(|c| c.to_string()).collect(),
        }))
    }

    /// A chart with coordinates named `x1 … xn`.
    pub fn numbered(id: impl Into<String>, dim: usize) -> Self {
        let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Chart::new(id, &refs)
    }

    pub fn id(&self) -> &str {
        &self.0.id
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn coord_names(&self) -> &[String] {
        &self.0.coords
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.0.coords.iter().position(|c| c == name)
    }

    pub fn point<S: Scalar>(&self, coords: Vec<S>) -> Result<ChartPoint<S>> {
        ChartPoint::new(self, coords)
    }

    pub(crate) fn ensure_same(&self, other: &Chart) -> Result<()> {
        if Arc::ptr_eq(&self.0, &other.0) || (self.id() == other.id() && self.0.coords == other.0.coords) {
            Ok(())
        } else {
            Err(GeomError::ChartMismatch { expected: self.id().to_string(), found: other.id().to_string() })
        }
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.ensure_same(other).is_ok()
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({}: {})", self.id(), self.0.coords.join(", "))
    }
}

/// Coordinates of a point on a given chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint<S> {
    chart: Chart,
    coords: Vec<S>,
}

impl<S: Scalar> ChartPoint<S> {
    pub fn new(chart: &Chart, coords: Vec<S>) -> Result<Self> {
        if coords.len() != chart.dim() {
            return Err(GeomError::DimensionMismatch { expected: chart.dim(), found: coords.len() });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        Ok(ChartPoint { chart: chart.clone(), coords })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Largest coordinate modulus.
    pub fn magnitude(&self) -> f64 {
        self.coords.iter().map(|c| c.modulus()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_dimension_is_checked() {
        let chart = Chart::numbered("plane", 2);
        assert!(chart.point(vec![1.0_f64, 2.0]).is_ok());
        assert_eq!(
            chart.point(vec![1.0_f64]).unwrap_err(),
            GeomError::DimensionMismatch { expected: 2, found: 1 }
        );
        assert_eq!(chart.point(vec![f64::NAN, 0.0]).unwrap_err(), GeomError::NonFinite);
    }

    #[test]
    fn charts_compare_by_identity_and_coordinates() {
        let a = Chart::numbered("a", 3);
        assert_eq!(a, Chart::numbered("a", 3));
        assert_ne!(a, Chart::numbered("b", 3));
        assert_eq!(a.coord_index("x2"), Some(1));
    }
}
