//! Likelihood-free Bayesian inference with synthetic likelihoods.
//!
//! The crate provides the Gaussian synthetic likelihood, its semi-parametric
//! robustification (kernel density marginals joined by a Gaussian copula
//! with Gaussian rank correlation), Warton shrinkage of the copula, random
//! walk Metropolis-Hastings drivers for synthetic likelihood and ABC, five
//! benchmark simulators and posterior-accuracy diagnostics.

pub mod diagnostics;
pub mod estimators;
pub mod linalg;
pub mod mcmc;
pub mod models;
pub mod par;
pub mod rng;
pub mod special;
