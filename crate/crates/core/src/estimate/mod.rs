//! Numerical dimension estimates: box counts, local-dimension quantiles,
//! Grassberger–Procaccia correlation sums and log–log regression.

mod boxes;
mod correlation;
mod fit;
mod local;

pub use boxes::{box_dimension_estimate, box_masses, exactly_countable, min_box_count, BoxMass};
pub use correlation::{
    correlation_dim_gp, correlation_sums, modified_correlation_dim, neighbour_counts, pair_counts, ModifiedCorrelation,
    PointCloud, MAX_SAMPLES,
};
pub use fit::{default_window, log_schedule, loglog_fit, Fit};
pub use local::{local_dimension_profile, LocalProfile};

use serde::Serialize;

/// Values observed at a decreasing sequence of scales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSeries {
    /// `(r, value)` with `r` strictly decreasing.
    pub points: Vec<(f64, f64)>,
    pub method: String,
    pub delta: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl ScalingSeries {
    pub fn new(method: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { points, method: method.into(), delta: None, samples: None, seed: None }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = Some(n);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A fitted dimension together with the data it came from.
///
/// `slope` is the dimension itself: for box counts the fitted exponent is
/// negated, since `N(r)` grows as `r` shrinks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub stderr: f64,
    /// `(r_min, r_max)`
    pub window: (f64, f64),
    /// Number of series points inside the window.
    pub used: usize,
    pub series: ScalingSeries,
}

impl DimensionEstimate {
    fn from_fit(series: ScalingSeries, window: (f64, f64), sign: f64) -> crate::Result<Self> {
        let fit = loglog_fit(&series, window)?;
        Ok(Self { slope: sign * fit.slope, stderr: fit.stderr, window, used: fit.used, series })
    }
}
