use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::Chain;

/// Autocorrelations at lags `0..x.len()` via zero-padded FFT.
fn autocorrelation(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    buf.resize(size, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let c0 = buf[0].re;
    if !(c0 > 0.0) {
        return vec![];
    }
    buf[..n].iter().map(|c| c.re / c0).collect()
}

/// Effective sample size of one component using Geyer's initial positive
/// sequence estimator. Clamped to `[1, T]`.
pub fn effective_sample_size(chain: &Chain, component: usize) -> f64 {
    ess_of_series(&chain.component(component))
}

pub(crate) fn ess_of_series(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return n.max(1) as f64;
    }
    let rho = autocorrelation(x);
    if rho.is_empty() {
        // constant series
        return 1.0;
    }
    let mut tau = -1.0;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = rho[2 * k] + rho[2 * k + 1];
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 1;
    }
    (n as f64 / tau.max(1e-12)).clamp(1.0, n as f64)
}
