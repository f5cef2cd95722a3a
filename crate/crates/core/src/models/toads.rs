//! Fowler's toads movement model with the random-return rule, summarised by
//! the score of a four-component Gaussian mixture fitted to the observed
//! log displacements at lags 1, 2, 4 and 8.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{ModelError, SimulatorModel};
use crate::mcmc::{BoxPrior, ParameterTransform, Prior};
use crate::rng::{stream, substream, SimRng};

pub const TOAD_LAGS: [usize; 4] = [1, 2, 4, 8];
const COMPONENTS: usize = 4;
const SCORE_LEN: usize = 3 * COMPONENTS - 1;
/// Fits with a component narrower than this fraction of the data sd are
/// discarded: such spikes sit on a single extreme jump whose exact location
/// simulated data never reproduces, which makes the score degenerate.
const MIN_SD_FRACTION: f64 = 0.05;

/// Symmetric alpha-stable draw with scale `gamma` (Chambers-Mallows-Stuck),
/// characteristic function `exp(-|gamma t|^alpha)`.
pub fn stable_sample(alpha: f64, gamma: f64, rng: &mut SimRng) -> f64 {
    let v = std::f64::consts::PI * (rng.random::<f64>() - 0.5);
    let w: f64 = Exp1.sample(rng);
    let x = if (alpha - 1.0).abs() < 1e-12 {
        v.tan()
    } else {
        (alpha * v).sin() / v.cos().powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
    };
    gamma * x
}

/// Refuge positions, `days x toads`.
pub type ToadsData = DMatrix<f64>;

/// Simulates `days` refuge positions for `toads` toads starting at 0.
///
/// Each night a toad moves by a stable displacement from its current refuge;
/// with probability `p0` it instead returns to one of its previous refuges,
/// chosen uniformly.
pub fn toads_simulate(theta: &[f64], toads: usize, days: usize, rng: &mut SimRng) -> Result<ToadsData, ModelError> {
    let valid = theta.len() == 3
        && theta[0] > 0.0
        && theta[0] <= 2.0
        && theta[1] > 0.0
        && (0.0..1.0).contains(&theta[2]);
    if !valid {
        return Err(ModelError::OutOfSupport { model: "toads", theta: theta.to_vec() });
    }
    let (alpha, gamma, p0) = (theta[0], theta[1], theta[2]);
    let mut y = DMatrix::zeros(days, toads);
    for j in 0..toads {
        for i in 1..days {
            let step = stable_sample(alpha, gamma, rng);
            y[(i, j)] = if rng.random::<f64>() < p0 {
                y[(rng.random_range(0..i), j)]
            } else {
                y[(i - 1, j)] + step
            };
        }
    }
    Ok(y)
}

/// `ln |Y[i + lag, j] - Y[i, j]|` over all toads and days, skipping exact
/// returns (zero displacement).
pub fn toads_displacements(y: &ToadsData, lag: usize) -> Vec<f64> {
    let (days, toads) = y.shape();
    let mut out = Vec::with_capacity(days.saturating_sub(lag) * toads);
    for j in 0..toads {
        for i in 0..days.saturating_sub(lag) {
            let d = (y[(i + lag, j)] - y[(i, j)]).abs();
            if d > 0.0 {
                out.push(d.ln());
            }
        }
    }
    out
}

/// Univariate Gaussian mixture with components ordered by mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Gmm {
    pub weights: [f64; COMPONENTS],
    pub means: [f64; COMPONENTS],
    pub sds: [f64; COMPONENTS],
}

fn log_normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln() - crate::special::HALF_LN_2PI
}

impl Gmm {
    pub fn log_likelihood(&self, xs: &[f64]) -> f64 {
        xs.iter()
            .map(|&x| {
                let terms: [f64; COMPONENTS] =
                    std::array::from_fn(|k| self.weights[k].ln() + log_normal_pdf(x, self.means[k], self.sds[k]));
                log_sum_exp(&terms)
            })
            .sum()
    }

    /// Gradient of the log-likelihood at this fit, in the order
    /// `w1..w3` (with `w4 = 1 - w1 - w2 - w3`), `mu1..mu4`, `sd1..sd4`.
    pub fn score(&self, xs: &[f64]) -> [f64; SCORE_LEN] {
        let mut g = [0.0; SCORE_LEN];
        for &x in xs {
            let logs: [f64; COMPONENTS] = std::array::from_fn(|k| log_normal_pdf(x, self.means[k], self.sds[k]));
            let weighted: [f64; COMPONENTS] = std::array::from_fn(|k| self.weights[k].ln() + logs[k]);
            let lp = log_sum_exp(&weighted);
            // phi_k / p and responsibilities w_k phi_k / p
            let ratio: [f64; COMPONENTS] = std::array::from_fn(|k| (logs[k] - lp).exp());
            for k in 0..COMPONENTS - 1 {
                g[k] += ratio[k] - ratio[COMPONENTS - 1];
            }
            for k in 0..COMPONENTS {
                let resp = self.weights[k] * ratio[k];
                let z = (x - self.means[k]) / self.sds[k];
                g[COMPONENTS - 1 + k] += resp * z / self.sds[k];
                g[2 * COMPONENTS - 1 + k] += resp * (z * z - 1.0) / self.sds[k];
            }
        }
        g
    }

    /// EM with random restarts; the best non-degenerate restart is iterated
    /// towards tight convergence so that its score (nearly) vanishes.
    pub fn fit(xs: &[f64], restarts: usize, seed: u64) -> Result<Gmm, ModelError> {
        if xs.len() < 3 * COMPONENTS {
            return Err(ModelError::GmmFitFailure(format!("only {} observations", xs.len())));
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        if !(sd > 0.0) {
            return Err(ModelError::GmmFitFailure("observations have zero spread".into()));
        }
        let floor = 1e-3 * sd;
        let degenerate = |g: &Gmm| g.sds.iter().any(|&s| s < MIN_SD_FRACTION * sd);
        let mut best: Option<(f64, Gmm)> = None;
        for r in 0..restarts.max(1) {
            let mut rng = substream(seed, stream::SETUP, r as u64, 0);
            let init = Gmm {
                weights: [1.0 / COMPONENTS as f64; COMPONENTS],
                means: std::array::from_fn(|_| xs[rng.random_range(0..xs.len())]),
                sds: [sd; COMPONENTS],
            };
            if let Some(run) = em(xs, init, floor, 1e-8, 300).filter(|run| !degenerate(&run.fit)) {
                if best.as_ref().is_none_or(|(b, _)| run.loglike > *b) {
                    best = Some((run.loglike, run.fit));
                }
            }
        }
        let (_, start) = best.ok_or_else(|| ModelError::GmmFitFailure("every EM restart degenerated or collapsed to a spike".into()))?;
        // EM can crawl along flat ridges; an unconverged polish is still the
        // best fit found.
        match em(xs, start.clone(), floor, 1e-13, 20_000) {
            Some(run) if !degenerate(&run.fit) => Ok(run.fit),
            _ => Ok(start),
        }
    }

    fn sort(&mut self) {
        let mut idx: [usize; COMPONENTS] = std::array::from_fn(|k| k);
        idx.sort_by(|&a, &b| self.means[a].total_cmp(&self.means[b]));
        let old = self.clone();
        for (slot, &k) in idx.iter().enumerate() {
            self.weights[slot] = old.weights[k];
            self.means[slot] = old.means[k];
            self.sds[slot] = old.sds[k];
        }
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

struct EmRun {
    loglike: f64,
    fit: Gmm,
}

/// Runs EM until the relative change in log-likelihood drops below `tol`
/// or `max_iter` is reached. `None` if a component collapses.
fn em(xs: &[f64], mut g: Gmm, sd_floor: f64, tol: f64, max_iter: usize) -> Option<EmRun> {
    let mut prev = f64::NEG_INFINITY;
    let mut resp = vec![[0.0; COMPONENTS]; xs.len()];
    let mut ll = f64::NEG_INFINITY;
    for _ in 0..max_iter {
        ll = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let w: [f64; COMPONENTS] = std::array::from_fn(|k| g.weights[k].ln() + log_normal_pdf(x, g.means[k], g.sds[k]));
            let lp = log_sum_exp(&w);
            ll += lp;
            resp[i] = std::array::from_fn(|k| (w[k] - lp).exp());
        }
        if !ll.is_finite() {
            return None;
        }
        if (ll - prev).abs() <= tol * (1.0 + ll.abs()) {
            g.sort();
            return Some(EmRun { loglike: ll, fit: g });
        }
        prev = ll;
        for k in 0..COMPONENTS {
            let nk: f64 = resp.iter().map(|r| r[k]).sum();
            if !(nk > 1e-8) {
                return None;
            }
            let mk = resp.iter().zip(xs).map(|(r, x)| r[k] * x).sum::<f64>() / nk;
            let vk = resp.iter().zip(xs).map(|(r, x)| r[k] * (x - mk).powi(2)).sum::<f64>() / nk;
            g.weights[k] = nk / xs.len() as f64;
            g.means[k] = mk;
            g.sds[k] = vk.sqrt().max(sd_floor);
        }
    }
    g.sort();
    Some(EmRun { loglike: ll, fit: g })
}

/// Mixture fits to the observed displacements, one per lag.
#[derive(Debug, Clone, PartialEq)]
pub struct ToadsAuxiliary {
    pub fits: Vec<Gmm>,
}

impl ToadsAuxiliary {
    pub const RESTARTS: usize = 20;

    pub fn fit(observed: &ToadsData, seed: u64) -> Result<Self, ModelError> {
        let fits = TOAD_LAGS
            .iter()
            .enumerate()
            .map(|(i, &lag)| Gmm::fit(&toads_displacements(observed, lag), Self::RESTARTS, seed.wrapping_add(i as u64)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ToadsAuxiliary { fits })
    }

    /// 44-dimensional score statistic of a dataset.
    pub fn scores(&self, y: &ToadsData) -> Vec<f64> {
        TOAD_LAGS
            .iter()
            .zip(&self.fits)
            .flat_map(|(&lag, gmm)| gmm.score(&toads_displacements(y, lag)))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Toads {
    pub toads: usize,
    pub days: usize,
    pub auxiliary: ToadsAuxiliary,
    prior: BoxPrior,
    transform: ParameterTransform,
}

impl Toads {
    pub const TRUE_PARAMS: [f64; 3] = [1.7, 35.0, 0.6];
    pub const BOUNDS: [(f64, f64); 3] = [(1.0, 2.0), (0.0, 100.0), (0.0, 0.9)];
    pub const TOADS: usize = 66;
    pub const DAYS: usize = 63;

    pub fn new(auxiliary: ToadsAuxiliary) -> Self {
        Toads {
            toads: Self::TOADS,
            days: Self::DAYS,
            auxiliary,
            prior: BoxPrior::new(Self::BOUNDS.to_vec()),
            transform: ParameterTransform::logit_box(&Self::BOUNDS),
        }
    }

    /// Fits the auxiliary mixtures to `observed` and builds the model.
    pub fn from_observed(observed: &ToadsData, seed: u64) -> Result<Self, ModelError> {
        Ok(Self::new(ToadsAuxiliary::fit(observed, seed)?))
    }
}

impl SimulatorModel for Toads {
    type Data = ToadsData;

    fn name(&self) -> &'static str {
        "toads"
    }
    fn param_names(&self) -> Vec<&'static str> {
        vec!["alpha", "gamma", "p0"]
    }
    fn stat_dim(&self) -> usize {
        TOAD_LAGS.len() * SCORE_LEN
    }
    fn simulate(&self, theta: &[f64], rng: &mut SimRng) -> Result<ToadsData, ModelError> {
        toads_simulate(theta, self.toads, self.days, rng)
    }
    fn summarize(&self, data: &ToadsData) -> Result<Vec<f64>, ModelError> {
        Ok(self.auxiliary.scores(data))
    }
    fn prior(&self) -> &dyn Prior {
        &self.prior
    }
    fn transform(&self) -> &ParameterTransform {
        &self.transform
    }
    fn true_params(&self) -> Option<Vec<f64>> {
        Some(Self::TRUE_PARAMS.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_limit_of_stable() {
        let mut rng = substream(1, 0, 0, 0);
        let gamma = 3.0;
        let m = 100_000;
        let xs: Vec<f64> = (0..m).map(|_| stable_sample(2.0, gamma, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / m as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        assert!((var / (2.0 * gamma * gamma) - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn characteristic_function_matches() {
        let (alpha, gamma) = (1.5, 1.0);
        let mut rng = substream(2, 0, 0, 0);
        let m = 1_000_000;
        let xs: Vec<f64> = (0..m).map(|_| stable_sample(alpha, gamma, &mut rng)).collect();
        for t in [0.1f64, 0.5, 1.0] {
            let re = xs.iter().map(|x| (t * x).cos()).sum::<f64>() / m as f64;
            let im = xs.iter().map(|x| (t * x).sin()).sum::<f64>() / m as f64;
            let want = (-(gamma * t).abs().powf(alpha)).exp();
            assert!((re - want).abs() < 0.01 && im.abs() < 0.01, "t={t}: {re} vs {want}");
        }
    }

    #[test]
    fn no_returns_means_independent_increments() {
        let y = toads_simulate(&[1.7, 35.0, 0.0], 66, 63, &mut substream(3, 0, 0, 0)).unwrap();
        let var = |lag: usize| {
            let d: Vec<f64> = (0..66)
                .flat_map(|j| (0..63 - lag).map(move |i| (i, j)))
                .map(|(i, j)| y[(i + lag, j)] - y[(i, j)])
                .collect();
            // heavy tails: compare a robust spread
            let mut a: Vec<f64> = d.iter().map(|v| v.abs()).collect();
            a.sort_unstable_by(f64::total_cmp);
            a[a.len() / 2]
        };
        assert!(var(2) > var(1));
    }

    #[test]
    fn score_vanishes_at_own_fit() {
        let y = toads_simulate(&Toads::TRUE_PARAMS, 66, 63, &mut substream(4, 0, 0, 0)).unwrap();
        let aux = ToadsAuxiliary::fit(&y, 7).unwrap();
        for (lag, gmm) in TOAD_LAGS.iter().zip(&aux.fits) {
            let xs = toads_displacements(&y, *lag);
            let s = gmm.score(&xs);
            let worst = s.iter().map(|v| v.abs()).fold(0.0, f64::max) / xs.len() as f64;
            assert!(worst < 1e-4, "lag {lag}: mean score {worst}");
            assert!(gmm.means.windows(2).all(|w| w[0] <= w[1]));
        }
        assert_eq!(aux.scores(&y).len(), 44);
    }

    #[test]
    fn score_matches_finite_difference_of_log_likelihood() {
        let g = Gmm { weights: [0.1, 0.2, 0.3, 0.4], means: [-1.0, 0.0, 1.0, 3.0], sds: [0.5, 1.0, 0.7, 2.0] };
        let xs = [-1.2, 0.3, 2.2, 4.0, 0.9];
        let s = g.score(&xs);
        let h = 1e-6;
        let bump = |idx: usize, sign: f64| {
            let mut p = g.clone();
            match idx {
                0..=2 => {
                    p.weights[idx] += sign * h;
                    p.weights[3] -= sign * h;
                }
                3..=6 => p.means[idx - 3] += sign * h,
                _ => p.sds[idx - 7] += sign * h,
            }
            p.log_likelihood(&xs)
        };
        for idx in 0..11 {
            let fd = (bump(idx, 1.0) - bump(idx, -1.0)) / (2.0 * h);
            assert!((fd - s[idx]).abs() < 1e-5 * fd.abs().max(1.0), "{idx}: {fd} vs {}", s[idx]);
        }
    }

    #[test]
    fn scores_separate_true_from_distant_parameters() {
        // standardised mean score over simulations: small at the generating
        // value, large away from it
        let y = toads_simulate(&Toads::TRUE_PARAMS, 66, 63, &mut substream(5, 0, 0, 0)).unwrap();
        let model = Toads::from_observed(&y, 11).unwrap();
        let m = 40;
        let spread = |theta: &[f64]| {
            let stats: Vec<Vec<f64>> =
                (0..m).map(|r| model.simulate_stats(theta, &mut substream(6, 0, r, 0)).unwrap()).collect();
            let obs = model.summarize(&y).unwrap();
            (0..44)
                .map(|c| {
                    let mean = stats.iter().map(|s| s[c]).sum::<f64>() / m as f64;
                    let sd = (stats.iter().map(|s| (s[c] - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt();
                    ((mean - obs[c]) / sd).powi(2)
                })
                .sum::<f64>()
        };
        let near = spread(&Toads::TRUE_PARAMS);
        let far = spread(&[1.3, 10.0, 0.2]);
        assert!(far > 10.0 * near, "near {near} far {far}");
    }
}
