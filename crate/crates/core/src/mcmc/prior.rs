//! Prior densities. Support is encoded by returning `-inf`.

/// Log prior density, up to an additive constant where noted.
pub trait Prior: Send + Sync {
    fn log_density(&self, theta: &[f64]) -> f64;

    /// Prior mean, when available in closed form.
    fn mean(&self) -> Option<Vec<f64>> {
        None
    }
}

/// Independent uniform priors on open intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxPrior {
    pub bounds: Vec<(f64, f64)>,
}

impl BoxPrior {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        assert!(bounds.iter().all(|(lo, hi)| lo < hi), "empty prior interval");
        BoxPrior { bounds }
    }
}

impl Prior for BoxPrior {
    fn log_density(&self, theta: &[f64]) -> f64 {
        if theta.len() != self.bounds.len() {
            return f64::NEG_INFINITY;
        }
        let mut lp = 0.0;
        for (&t, &(lo, hi)) in theta.iter().zip(&self.bounds) {
            if !(t > lo && t < hi) {
                return f64::NEG_INFINITY;
            }
            lp -= (hi - lo).ln();
        }
        lp
    }

    fn mean(&self) -> Option<Vec<f64>> {
        Some(self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect())
    }
}

/// Uniform prior on the MA(2) invertibility triangle
/// `-1 < t2 < 1, t1 + t2 > -1, t1 - t2 < 1` (area 4).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Ma2TrianglePrior;

impl Prior for Ma2TrianglePrior {
    fn log_density(&self, theta: &[f64]) -> f64 {
        if theta.len() == 2 && crate::models::ma2_in_support(theta) {
            -(4f64).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn mean(&self) -> Option<Vec<f64>> {
        // centroid of (-2,1), (2,1), (0,-1)
        Some(vec![0.0, 1.0 / 3.0])
    }
}

/// Uniform on `(t1, t2 - t1, t3)` over `(0, a) x (0, b) x (0, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mg1Prior {
    pub service_min_upper: f64,
    pub service_width_upper: f64,
    pub arrival_rate_upper: f64,
}

impl Default for Mg1Prior {
    fn default() -> Self {
        Mg1Prior { service_min_upper: 10.0, service_width_upper: 10.0, arrival_rate_upper: 0.5 }
    }
}

impl Prior for Mg1Prior {
    fn log_density(&self, theta: &[f64]) -> f64 {
        if theta.len() != 3 {
            return f64::NEG_INFINITY;
        }
        let width = theta[1] - theta[0];
        let inside = theta[0] > 0.0
            && theta[0] < self.service_min_upper
            && width > 0.0
            && width < self.service_width_upper
            && theta[2] > 0.0
            && theta[2] < self.arrival_rate_upper;
        if inside {
            -(self.service_min_upper * self.service_width_upper * self.arrival_rate_upper).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn mean(&self) -> Option<Vec<f64>> {
        let t1 = 0.5 * self.service_min_upper;
        Some(vec![t1, t1 + 0.5 * self.service_width_upper, 0.5 * self.arrival_rate_upper])
    }
}
