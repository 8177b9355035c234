//! Closed-form cosine coefficients on a subinterval `[x1, x2] ⊆ [a, b]`.
//!
//! All coefficients use the basis `cos(kπ(y − a)/(b − a))` with the
//! normalisation `2/(b − a)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::contract::{Action, ContractSpec};
use crate::model::{PolynomialMap, TruncationRange};

/// Below this `|lβ ± k|` the `M` entry is evaluated by its analytic limit.
pub const SINGULAR_GUARD: f64 = 1e-12;

/// Settlement coefficients `V_k(t_{M+1}, e)` for every grid level. The
/// penalty does not depend on the price, so only `V_0 = 2 q_s(e)` survives.
pub fn terminal_coefficients(spec: &ContractSpec, n_terms: usize) -> Vec<Vec<f64>> {
    spec.grid
        .levels()
        .into_iter()
        .map(|e| {
            let mut v = vec![0.0; n_terms];
            v[0] = 2.0 * spec.settlement_penalty(e);
            v
        })
        .collect()
}

/// `(2/(b−a)) ∫_{x1}^{x2} Φ(y) cos(kπ(y−a)/(b−a)) dy` for `k < n_terms`.
pub fn map_cosine_integrals(
    map: &PolynomialMap,
    x1: f64,
    x2: f64,
    range: &TruncationRange,
    n_terms: usize,
) -> Vec<f64> {
    let w = range.width();
    let shifted = map.shifted_coeffs(range.a);
    let (z1, z2) = (x1 - range.a, x2 - range.a);
    let d1 = derivatives_at(&shifted, z1);
    let d2 = derivatives_at(&shifted, z2);
    let scale = 2.0 / w;

    let mut out = Vec::with_capacity(n_terms);
    // k = 0: plain antiderivative of the shifted polynomial.
    let prim = |z: f64| {
        shifted
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (n, c)| acc * z + c / (n as f64 + 1.0))
            * z
    };
    out.push(scale * (prim(z2) - prim(z1)));
    for k in 1..n_terms {
        let omega = k as f64 * PI / w;
        out.push(scale * (cos_antiderivative(&d2, omega, z2) - cos_antiderivative(&d1, omega, z1)));
    }
    out
}

/// Antiderivative of `P(z) cos(ωz)` from the derivatives `P^{(j)}(z)`:
/// `Σ_j (−1)^j [P^{(2j)} sin(ωz)/ω^{2j+1} + P^{(2j+1)} cos(ωz)/ω^{2j+2}]`.
fn cos_antiderivative(derivs: &[f64], omega: f64, z: f64) -> f64 {
    let (s, c) = (omega * z).sin_cos();
    let inv = 1.0 / omega;
    let mut pow = inv;
    let mut acc = 0.0;
    for (j, d) in derivs.iter().enumerate() {
        let trig = if j % 2 == 0 { s } else { c };
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * d * trig * pow;
        pow *= inv;
    }
    acc
}

/// `[P(z), P'(z), P''(z), …]` by repeated synthetic division.
fn derivatives_at(coeffs: &[f64], z: f64) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            c[j] += z * c[j + 1];
        }
    }
    let mut fact = 1.0;
    for (j, cj) in c.iter_mut().enumerate() {
        if j > 1 {
            fact *= j as f64;
        }
        *cj *= fact;
    }
    c
}

/// Payoff coefficients `G_k(x1, x2, Δe)`.
pub fn payoff_coefficients(
    spec: &ContractSpec,
    map: &PolynomialMap,
    x1: f64,
    x2: f64,
    action: Action,
    n_terms: usize,
    range: &TruncationRange,
) -> Vec<f64> {
    if action == Action::IDLE {
        return vec![0.0; n_terms];
    }
    let slope = spec.payoff_slope(action);
    let mut g = map_cosine_integrals(map, x1, x2, range, n_terms);
    g.iter_mut().for_each(|v| *v *= slope);
    g
}

/// Cosine coefficients of a constant `q` on `[x1, x2]`.
pub fn constant_coefficients(
    q: f64,
    x1: f64,
    x2: f64,
    range: &TruncationRange,
    n_terms: usize,
) -> Vec<f64> {
    let w = range.width();
    let mut out = Vec::with_capacity(n_terms);
    out.push(2.0 / w * q * (x2 - x1));
    for k in 1..n_terms {
        let kp = PI * k as f64;
        out.push(
            2.0 / kp
                * q
                * ((kp * (range.a - x2) / (range.a - range.b)).sin()
                    - (kp * (range.a - x1) / (range.a - range.b)).sin()),
        );
    }
    out
}

/// Penalty coefficients `Q_k(x1, x2, Δe)`; zero for penalty-free actions.
pub fn penalty_coefficients(
    spec: &ContractSpec,
    e: f64,
    x1: f64,
    x2: f64,
    action: Action,
    n_terms: usize,
    range: &TruncationRange,
) -> crate::Result<Vec<f64>> {
    let q = spec.rapidity_penalty(e, action)?;
    if q == 0.0 {
        return Ok(vec![0.0; n_terms]);
    }
    Ok(constant_coefficients(q, x1, x2, range, n_terms))
}

/// The two parts of
/// `M_{k,l}(x1, x2) = (2/(b−a)) ∫ e^{ilπ(βy−a)/(b−a)} cos(kπ(y−a)/(b−a)) dy`,
/// stored row-major in `k`.
#[derive(Debug, Clone)]
pub struct MklBlock {
    pub n_terms: usize,
    pub beta: f64,
    pub x1: f64,
    pub x2: f64,
    pub ms: Vec<Complex64>,
    pub mc: Vec<Complex64>,
}

impl MklBlock {
    pub fn new(x1: f64, x2: f64, beta: f64, n_terms: usize, range: &TruncationRange) -> Self {
        let n = n_terms;
        let w = range.width();
        let a = range.a;
        let i_pi_w = Complex64::new(0.0, PI / w);
        let mut ms = vec![Complex64::new(0.0, 0.0); n * n];
        let mut mc = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            let kf = k as f64;
            for l in 0..n {
                let lf = l as f64;
                let idx = k * n + l;
                let cp = lf * beta + kf;
                mc[idx] = if cp.abs() < SINGULAR_GUARD {
                    (x2 - x1) * i_pi_w * (-i_pi_w * ((lf + kf) * a)).exp()
                } else {
                    ((i_pi_w * (cp * x2 - (lf + kf) * a)).exp()
                        - (i_pi_w * (cp * x1 - (lf + kf) * a)).exp())
                        / cp
                };
                let cm = lf * beta - kf;
                ms[idx] = if cm.abs() < SINGULAR_GUARD {
                    (x2 - x1) * i_pi_w * (-i_pi_w * ((lf - kf) * a)).exp()
                } else {
                    ((i_pi_w * (cm * x2 - (lf - kf) * a)).exp()
                        - (i_pi_w * (cm * x1 - (lf - kf) * a)).exp())
                        / cm
                };
            }
        }
        Self {
            n_terms,
            beta,
            x1,
            x2,
            ms,
            mc,
        }
    }

    /// `M_{k,l} = −(i/π)(M^s + M^c)`.
    pub fn combined(&self, k: usize, l: usize) -> Complex64 {
        let idx = k * self.n_terms + l;
        Complex64::new(0.0, -1.0 / PI) * (self.ms[idx] + self.mc[idx])
    }
}
