//! Shared fixtures for the benchmark targets.

use eiv_core::simulate::{generate_dataset, ModelConfig};
use eiv_core::Dataset;

/// Statistics from the textbook 20-point example: (nu, r, l).
pub fn zellner_params() -> (f64, f64, f64) {
    (19.0, 0.909, 0.963)
}

/// A reproducible synthetic dataset with unit slope and mild errors.
pub fn synthetic(n: usize) -> Dataset {
    generate_dataset(&ModelConfig {
        n,
        beta: 1.0,
        alpha: 0.0,
        mu1: 0.0,
        tau: 1.0,
        sigma1: 0.2,
        sigma2: 0.2,
        seed: 20110627,
    })
    .expect("valid config")
}
