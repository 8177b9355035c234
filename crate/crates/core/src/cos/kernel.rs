//! One-step transition kernel in cosine space.
//!
//! With `φ(u | Δt, x) = e^{iuβx} φ(u | Δt)` the discounted continuation value
//! of a level with next-date coefficients `V_l` is
//! `ĉ(x) = Re Σ_l w_l e^{iu_l(βx − a)}`, `w_l = e^{−rΔt} φ(u_l | Δt) V_l`
//! (halved at `l = 0`). The same weights feed the continuation coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::coeffs::{MklBlock, SINGULAR_GUARD};
use crate::model::{FactorProcess, MarketParams, TruncationRange};

#[derive(Debug, Clone)]
pub struct StepKernel {
    pub range: TruncationRange,
    pub n_terms: usize,
    pub dt: f64,
    pub beta: f64,
    pub discount: f64,
    /// `φ(u_l | Δt)` for `u_l = lπ/(b−a)`.
    pub phi: Vec<Complex64>,
    /// `∂φ(u_l | Δt)/∂σ`.
    pub dphi_dsigma: Vec<Complex64>,
    // Row-major [k][l] tables of 1/(lβ − k) and 1/(lβ + k), zeroed where singular.
    inv_minus: Vec<f64>,
    inv_plus: Vec<f64>,
    singular_minus: Vec<(usize, usize)>,
}

impl StepKernel {
    pub fn new(
        process: &FactorProcess,
        market: &MarketParams,
        dt: f64,
        range: TruncationRange,
        n_terms: usize,
    ) -> Self {
        let w = range.width();
        let beta = process.beta(dt);
        let n = n_terms;
        let phi = (0..n)
            .map(|l| process.char_fn(l as f64 * PI / w, dt))
            .collect();
        let dphi_dsigma = (0..n)
            .map(|l| process.char_fn_dsigma(l as f64 * PI / w, dt))
            .collect();
        let mut inv_minus = vec![0.0; n * n];
        let mut inv_plus = vec![0.0; n * n];
        let mut singular_minus = Vec::new();
        for k in 0..n {
            for l in 0..n {
                let lb = l as f64 * beta;
                let cm = lb - k as f64;
                let cp = lb + k as f64;
                if cm.abs() < SINGULAR_GUARD {
                    singular_minus.push((k, l));
                } else {
                    inv_minus[k * n + l] = 1.0 / cm;
                }
                if cp.abs() >= SINGULAR_GUARD {
                    inv_plus[k * n + l] = 1.0 / cp;
                }
            }
        }
        Self {
            range,
            n_terms,
            dt,
            beta,
            discount: market.discount(dt),
            phi,
            dphi_dsigma,
            inv_minus,
            inv_plus,
            singular_minus,
        }
    }

    pub fn u(&self, l: usize) -> f64 {
        l as f64 * PI / self.range.width()
    }

    /// `w_l = e^{−rΔt} φ(u_l | Δt) V_l`, with the `l = 0` term halved.
    pub fn weights(&self, v_next: &[f64]) -> Vec<Complex64> {
        let mut w: Vec<Complex64> = self
            .phi
            .iter()
            .zip(v_next)
            .map(|(p, v)| p * (self.discount * v))
            .collect();
        w[0] *= 0.5;
        w
    }

    /// `e^{iπ l (βx − a)/(b−a)}` for `l < n_terms`, by repeated rotation.
    pub fn state_factors(&self, x: f64) -> Vec<Complex64> {
        let theta = PI * (self.beta * x - self.range.a) / self.range.width();
        let step = Complex64::from_polar(1.0, theta);
        let mut out = Vec::with_capacity(self.n_terms);
        let mut z = Complex64::new(1.0, 0.0);
        for l in 0..self.n_terms {
            // Re-anchor periodically so rounding does not accumulate.
            if l % 64 == 0 {
                z = Complex64::from_polar(1.0, l as f64 * theta);
            }
            out.push(z);
            z *= step;
        }
        out
    }

    /// `ĉ(x)` from prepared weights.
    pub fn continuation_value(&self, weights: &[Complex64], x: f64) -> f64 {
        dot_re(weights, &self.state_factors(x))
    }

    /// `Ĉ_k(x1, x2)` without materialising `M`:
    /// each endpoint contributes `F_k(x) Σ_l w_l E_l(x)/(lβ ± k)`.
    pub fn continuation_coefficients(&self, weights: &[Complex64], x1: f64, x2: f64) -> Vec<f64> {
        let n = self.n_terms;
        let w = self.range.width();
        let a = self.range.a;
        let e1 = self.state_factors(x1);
        let e2 = self.state_factors(x2);
        let we1: Vec<Complex64> = weights.iter().zip(&e1).map(|(w, e)| w * e).collect();
        let we2: Vec<Complex64> = weights.iter().zip(&e2).map(|(w, e)| w * e).collect();
        let th1 = PI * (x1 - a) / w;
        let th2 = PI * (x2 - a) / w;
        let len_factor = Complex64::new(0.0, (x2 - x1) * PI / w);

        let mut out = vec![0.0; n];
        for (k, ok) in out.iter_mut().enumerate() {
            let row_m = &self.inv_minus[k * n..(k + 1) * n];
            let row_p = &self.inv_plus[k * n..(k + 1) * n];
            let (mut p1, mut p2, mut m1, mut m2) = (
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            );
            for l in 0..n {
                p1 += we1[l] * row_p[l];
                p2 += we2[l] * row_p[l];
                m1 += we1[l] * row_m[l];
                m2 += we2[l] * row_m[l];
            }
            let f1 = Complex64::from_polar(1.0, k as f64 * th1);
            let f2 = Complex64::from_polar(1.0, k as f64 * th2);
            let mut total = f2 * p2 - f1 * p1 + f2.conj() * m2 - f1.conj() * m1;
            if k == 0 {
                total += weights[0] * len_factor;
            }
            *ok = total.im / PI;
        }
        for &(k, l) in &self.singular_minus {
            let phase = Complex64::from_polar(1.0, -PI * (l as f64 - k as f64) * a / w);
            out[k] += (weights[l] * len_factor * phase).im / PI;
        }
        out
    }

    /// Reference path: `Ĉ_k = Re Σ_l w_l M_{k,l}` with an explicit block.
    pub fn continuation_coefficients_block(
        &self,
        weights: &[Complex64],
        block: &MklBlock,
    ) -> Vec<f64> {
        (0..self.n_terms)
            .map(|k| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(l, w)| (w * block.combined(k, l)).re)
                    .sum()
            })
            .collect()
    }
}

/// `Re Σ_l w_l f_l`.
pub fn dot_re(weights: &[Complex64], factors: &[Complex64]) -> f64 {
    weights
        .iter()
        .zip(factors)
        .map(|(w, f)| w.re * f.re - w.im * f.im)
        .sum()
}
