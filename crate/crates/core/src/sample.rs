//! Seeded random sampling of chart points off singular sets.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::field::SingularSet;
use crate::scalar::Scalar;

pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MARGIN: f64 = 0.1;

/// Where and how many points to draw.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub points: usize,
    pub seed: u64,
    /// Real parts are uniform in `[−half_width, half_width]`.
    pub half_width: f64,
    /// Imaginary parts are uniform in `[−imag_half_width, imag_half_width]`
    /// when the scalar type is complex.
    pub imag_half_width: f64,
    /// Default rejection margin around each singular component.
    pub margin: f64,
    /// Draws allowed per requested point before giving up.
    pub max_draws_per_point: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            half_width: 2.0,
            imag_half_width: 1.0,
            margin: DEFAULT_MARGIN,
            max_draws_per_point: 1000,
        }
    }
}

impl SampleSpec {
    pub fn new(points: usize, seed: u64) -> Self {
        SampleSpec { points, seed, ..SampleSpec::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    /// Draws `points` coordinates on `chart` with every component of
    /// `avoid` at least its margin away from zero.
    pub fn draw<S: Scalar>(&self, chart: &Chart, avoid: &SingularSet) -> Result<Sample<S>> {
        if self.points == 0 {
            return Err(GeomError::EmptySample);
        }
        let complex = S::from_complex(Complex64::i()).is_some();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut points = Vec::with_capacity(self.points);
        let budget = self.points.saturating_mul(self.max_draws_per_point);
        let mut drawn = 0;
        while points.len() < self.points {
            if drawn == budget {
                return Err(GeomError::SamplingExhausted { wanted: self.points, drawn: points.len() });
            }
            drawn += 1;
            let coords: Vec<S> = (0..chart.dim())
                .map(|_| {
                    let re = rng.random_range(-self.half_width..=self.half_width);
                    let im = if complex { rng.random_range(-self.imag_half_width..=self.imag_half_width) } else { 0.0 };
                    S::from_complex(Complex64::new(re, im)).expect("imaginary part is zero for real scalars")
                })
                .collect();
            if avoid.is_clear(&coords, self.margin) {
                points.push(chart.point(coords)?);
            }
        }
        Ok(Sample { spec: self.clone(), chart: chart.clone(), points })
    }
}

/// A reproducible list of points on one chart.
#[derive(Clone, Debug)]
pub struct Sample<S> {
    spec: SampleSpec,
    chart: Chart,
    points: Vec<ChartPoint<S>>,
}

impl<S: Scalar> Sample<S> {
    /// Wraps explicit points (all on `chart`).
    pub fn from_points(chart: &Chart, points: Vec<ChartPoint<S>>) -> Result<Self> {
        if points.is_empty() {
            return Err(GeomError::EmptySample);
        }
        for p in &points {
            chart.ensure_same(p.chart())?;
        }
        let spec = SampleSpec { points: points.len(), ..SampleSpec::default() };
        Ok(Sample { spec, chart: chart.clone(), points })
    }

    pub fn spec(&self) -> &SampleSpec {
        &self.spec
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn points(&self) -> &[ChartPoint<S>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest coordinate modulus over the sample.
    pub fn magnitude(&self) -> f64 {
        self.points.iter().map(ChartPoint::magnitude).fold(0.0, f64::max)
    }
}

/// A polynomial in `dim` variables of total degree ≤ `degree` with
/// coefficients uniform in `[−1, 1]`.
pub fn random_polynomial<R: Rng>(rng: &mut R, dim: usize, degree: u32) -> Expr {
    let mut terms = Vec::new();
    let mut exps = vec![0u32; dim];
    loop {
        if exps.iter().sum::<u32>() <= degree {
            let mut t = Expr::real(rng.random_range(-1.0..=1.0));
            for (k, &e) in exps.iter().enumerate() {
                t = t * Expr::var(k).powi(e as i32);
            }
            terms.push(t);
        }
        // odometer over exponent vectors
        let mut k = 0;
        loop {
            if k == dim {
                return terms.into_iter().sum();
            }
            exps[k] += 1;
            if exps[k] <= degree {
                break;
            }
            exps[k] = 0;
            k += 1;
        }
    }
}
