//! Shared fixtures for the criterion benches.

use num_complex::Complex64;
use storval::cos::StepKernel;
use storval::{presets, ContractSpec, PriceModel, TruncationRange};

pub fn reference_case(contract: u8, sigma: f64) -> (ContractSpec, PriceModel) {
    (presets::contract(contract), presets::model(sigma))
}

/// One-step kernel on the full-horizon range of the reference model, with
/// weights built from a smooth pseudo value function.
pub fn kernel_fixture(sigma: f64, n_terms: usize) -> (StepKernel, Vec<Complex64>, TruncationRange) {
    let (spec, model) = reference_case(2, sigma);
    let dt = spec.time.dt();
    let range =
        TruncationRange::for_process(&model.process, spec.time.settlement() - spec.time.t0, 10.0)
            .expect("reference model has a finite range");
    let kernel = StepKernel::new(&model.process, &model.market, dt, range, n_terms);
    let v: Vec<f64> = (0..n_terms)
        .map(|k| 1.0 / (1.0 + k as f64).powi(2))
        .collect();
    let weights = kernel.weights(&v);
    (kernel, weights, range)
}
