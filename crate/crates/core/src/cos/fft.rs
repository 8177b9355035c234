//! FFT evaluation of `Ĉ_k` when `β = 1`.
//!
//! Then `M^s_{k,l}` depends only on `l − k` (Toeplitz) and `M^c_{k,l}` only on
//! `l + k` (Hankel), so both matrix-vector products are linear convolutions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::model::TruncationRange;

/// `Ĉ_k(x1, x2)` for `β = 1` from prepared weights `w_l`.
pub fn continuation_coefficients_fft(
    weights: &[Complex64],
    x1: f64,
    x2: f64,
    range: &TruncationRange,
) -> Vec<f64> {
    let n = weights.len();
    let w = range.width();
    let a = range.a;
    let i_pi_w = Complex64::new(0.0, PI / w);
    let diag = (x2 - x1) * i_pi_w;
    let entry = |d: f64| -> Complex64 {
        if d == 0.0 {
            diag
        } else {
            ((i_pi_w * (d * (x2 - a))).exp() - (i_pi_w * (d * (x1 - a))).exp()) / d
        }
    };
    // ms[d + n − 1] for d = l − k ∈ (−n, n); mc[s] for s = l + k ∈ [0, 2n − 2].
    let ms: Vec<Complex64> = (0..2 * n - 1)
        .map(|j| entry(j as f64 - (n as f64 - 1.0)))
        .collect();
    let mc: Vec<Complex64> = (0..2 * n - 1).map(|s| entry(s as f64)).collect();
    let reversed: Vec<Complex64> = weights.iter().rev().copied().collect();

    let toeplitz = convolve(&ms, &reversed);
    let hankel = convolve(&mc, &reversed);
    (0..n)
        .map(|k| (toeplitz[2 * n - 2 - k] + hankel[k + n - 1]).im / PI)
        .collect()
}

fn convolve(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    let len = x.len() + y.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[Complex64]| {
        let mut out = v.to_vec();
        out.resize(size, Complex64::new(0.0, 0.0));
        out
    };
    let mut fx = pad(x);
    let mut fy = pad(y);
    fwd.process(&mut fx);
    fwd.process(&mut fy);
    for (a, b) in fx.iter_mut().zip(&fy) {
        *a *= b;
    }
    inv.process(&mut fx);
    let norm = 1.0 / size as f64;
    fx.truncate(len);
    fx.iter_mut().for_each(|v| *v *= norm);
    fx
}
