//! Single-server FIFO queue with Poisson arrivals and uniform service.
//!
//! Parameters are `(service_min, service_max, arrival_rate)`; the statistic
//! is the log of successive inter-departure times.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{ModelError, SimulatorModel};
use crate::mcmc::{Bijector, Mg1Prior, ParameterTransform, Prior};
use crate::rng::SimRng;

/// Log inter-departure times of `customers` customers (`customers - 1` values).
pub fn mg1_simulate(theta: &[f64], customers: usize, rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
    let valid = theta.len() == 3 && theta[0] > 0.0 && theta[1] > theta[0] && theta[2] > 0.0;
    if !valid || customers < 2 {
        return Err(ModelError::OutOfSupport { model: "mg1", theta: theta.to_vec() });
    }
    let arrivals = Exp::new(theta[2]).expect("positive rate");
    let mut arrival = 0.0;
    let mut departure = 0.0f64;
    let mut out = Vec::with_capacity(customers - 1);
    for i in 0..customers {
        arrival += arrivals.sample(rng);
        let service = rng.random_range(theta[0]..theta[1]);
        let next = arrival.max(departure) + service;
        if i > 0 {
            out.push((next - departure).ln());
        }
        departure = next;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Mg1 {
    pub customers: usize,
    prior: Mg1Prior,
    transform: ParameterTransform,
}

impl Mg1 {
    pub const TRUE_PARAMS: [f64; 3] = [1.0, 5.0, 0.2];

    pub fn new(customers: usize) -> Self {
        let prior = Mg1Prior::default();
        let transform = ParameterTransform::with_offsets(vec![
            (Bijector::Logit { lo: 0.0, hi: prior.service_min_upper }, None),
            (Bijector::Logit { lo: 0.0, hi: prior.service_width_upper }, Some(0)),
            (Bijector::Logit { lo: 0.0, hi: prior.arrival_rate_upper }, None),
        ]);
        Mg1 { customers, prior, transform }
    }
}

impl Default for Mg1 {
    fn default() -> Self {
        Mg1::new(51)
    }
}

impl SimulatorModel for Mg1 {
    type Data = Vec<f64>;

    fn name(&self) -> &'static str {
        "mg1"
    }
    fn param_names(&self) -> Vec<&'static str> {
        vec!["theta1", "theta2", "theta3"]
    }
    fn stat_dim(&self) -> usize {
        self.customers - 1
    }
    fn simulate(&self, theta: &[f64], rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
        mg1_simulate(theta, self.customers, rng)
    }
    fn summarize(&self, data: &Vec<f64>) -> Result<Vec<f64>, ModelError> {
        Ok(data.clone())
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
