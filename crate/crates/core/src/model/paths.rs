use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::process::FactorProcess;
use crate::error::{domain, Result};

/// Simulated factor paths, stored time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub n_paths: usize,
    pub times: Vec<f64>,
    pub seed: u64,
    states: Vec<f64>,
}

impl PathEnsemble {
    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn state(&self, path: usize, time_index: usize) -> f64 {
        self.states[time_index * self.n_paths + path]
    }

    /// Cross-section of all paths at one time index.
    pub fn at_time(&self, time_index: usize) -> &[f64] {
        let n = self.n_paths;
        &self.states[time_index * n..(time_index + 1) * n]
    }

    pub fn path(&self, path: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_times()).map(move |t| self.state(path, t))
    }
}

/// Exact Gaussian transition sampling along `times`.
///
/// Path `i` draws from its own ChaCha stream, so the ensemble depends only on
/// `(seed, n_paths, times)` and not on how paths are split across threads.
pub fn simulate_paths(
    process: &FactorProcess,
    n_paths: usize,
    times: &[f64],
    seed: u64,
) -> Result<PathEnsemble> {
    if times.is_empty() {
        return Err(domain("times", "empty time grid"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("times", "must be strictly increasing"));
    }
    let n_times = times.len();
    // x_{t+dt} = β x_t + shift + sd·z
    let steps: Vec<(f64, f64, f64)> = times
        .windows(2)
        .map(|w| {
            let dt = w[1] - w[0];
            let (shift, var) = process.moments(dt, 0.0);
            (process.beta(dt), shift, var.sqrt())
        })
        .collect();
    let x0 = process.x0();

    let by_path: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut out = Vec::with_capacity(n_times);
            let mut x = x0;
            out.push(x);
            for &(beta, shift, sd) in &steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                x = beta * x + shift + sd * z;
                out.push(x);
            }
            out
        })
        .collect();

    let mut states = vec![0.0; n_paths * n_times];
    for (i, p) in by_path.iter().enumerate() {
        for (t, &x) in p.iter().enumerate() {
            states[t * n_paths + i] = x;
        }
    }
    Ok(PathEnsemble {
        n_paths,
        times: times.to_vec(),
        seed,
        states,
    })
}
