//! Increasing polynomial maps `S = Φ(X)` built from non-negative quadratics.
//!
//! Each factor is the normalised quadratic
//! `q(x) = (α/2) x² + (1 − α − γ) x + γ` with `∫₀^∞ e^{−x} q(x) dx = 1`, and the
//! map is the antiderivative of their product, so `Φ(0) = 0` and `Φ' ≥ 0` on
//! `[0, ∞)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const NONNEG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFactor {
    alpha: f64,
    gamma: f64,
}

impl QuadraticFactor {
    /// Validates that the quadratic is non-negative on `[0, ∞)`.
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !alpha.is_finite() || !gamma.is_finite() {
            return Err(domain("alpha/gamma", "must be finite"));
        }
        if alpha < 0.0 {
            return Err(domain("alpha", format!("{alpha} < 0")));
        }
        if gamma < 0.0 {
            return Err(domain("gamma", format!("{gamma} < 0")));
        }
        let lin = 1.0 - alpha - gamma;
        // Negative slope at 0 needs a non-negative interior minimum.
        if lin < 0.0 {
            if alpha == 0.0 {
                return Err(domain("alpha/gamma", "linear factor decreasing on [0, ∞)"));
            }
            let min_value = gamma - lin * lin / (2.0 * alpha);
            if min_value < -NONNEG_TOL * (1.0 + gamma) {
                return Err(domain(
                    "alpha/gamma",
                    format!("quadratic dips to {min_value} on [0, ∞)"),
                ));
            }
        }
        Ok(Self { alpha, gamma })
    }

    /// Polar parametrisation `(α, γ) = r̂ (cos ξ, sin ξ)`.
    pub fn from_polar(xi: f64, r_hat: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&xi) {
            return Err(domain("xi", format!("{xi} outside [0, π/2]")));
        }
        let bound = xi.cos() + xi.sin() + (2.0 * xi).sin().max(0.0).sqrt();
        if !(0.0..=bound * (1.0 + 1e-14)).contains(&r_hat) {
            return Err(domain("r_hat", format!("{r_hat} outside [0, {bound}]")));
        }
        let alpha = (r_hat * xi.cos()).max(0.0);
        let gamma = (r_hat * xi.sin()).max(0.0);
        // The boundary of the polar set touches zero exactly; skip the
        // tolerance check there and trust the parametrisation.
        Ok(Self { alpha, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Monomial coefficients `[c0, c1, c2]`.
    pub fn coeffs(&self) -> [f64; 3] {
        [self.gamma, 1.0 - self.alpha - self.gamma, 0.5 * self.alpha]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let [c0, c1, c2] = self.coeffs();
        c0 + x * (c1 + x * c2)
    }
}

/// Polynomial map `Φ(x) = H(x)ᵀ p` with `H(x) = (1, x, x², …)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialMap {
    factors: Vec<QuadraticFactor>,
    coeffs: Vec<f64>,
}

impl PolynomialMap {
    pub fn new(factors: Vec<QuadraticFactor>) -> Self {
        let mut product = vec![1.0];
        for f in &factors {
            product = poly_mul(&product, &f.coeffs());
        }
        trim(&mut product);
        let mut coeffs = Vec::with_capacity(product.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(
            product
                .iter()
                .enumerate()
                .map(|(n, c)| c / (n as f64 + 1.0)),
        );
        Self { factors, coeffs }
    }

    /// `Φ(x) = x`.
    pub fn identity() -> Self {
        Self::new(Vec::new())
    }

    /// `Φ(x) = ((1 − γ)/2) x² + γ x`, one factor with `α = 0`.
    pub fn second_order(gamma: f64) -> Result<Self> {
        Ok(Self::new(vec![QuadraticFactor::new(0.0, gamma)?]))
    }

    pub fn factors(&self) -> &[QuadraticFactor] {
        &self.factors
    }

    /// Monomial coefficients, lowest order first; `coeffs()[0] == 0`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (n, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + n as f64 * c;
        }
        acc
    }

    pub fn d2(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (n, c) in self.coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * x + (n * (n - 1)) as f64 * c;
        }
        acc
    }

    /// Coefficients of `z ↦ Φ(z + shift)`.
    pub fn shifted_coeffs(&self, shift: f64) -> Vec<f64> {
        // Repeated synthetic division (Taylor shift).
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] += shift * c[j + 1];
            }
        }
        c
    }

    /// Solves `Φ(x) = s` for `x ≥ 0`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(domain("s", format!("{s} < 0: Φ maps [0, ∞) onto [0, ∞)")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        match self.degree() {
            1 => Ok(s / self.coeffs[1]),
            2 => {
                let (p1, p2) = (self.coeffs[1], self.coeffs[2]);
                Ok(2.0 * s / (p1 + (p1 * p1 + 4.0 * p2 * s).sqrt()))
            }
            _ => self.inverse_bracketed(s),
        }
    }

    fn inverse_bracketed(&self, s: f64) -> Result<f64> {
        let tol = 1e-12 * s.max(1.0);
        let mut lo = 0.0;
        let mut hi = s.max(1.0);
        let mut expansions = 0;
        while self.eval(hi) < s {
            lo = hi;
            hi *= 2.0;
            expansions += 1;
            if expansions > 200 {
                return Err(Error::Numeric(format!("cannot bracket Φ⁻¹({s})")));
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..500 {
            let r = self.eval(x) - s;
            if r.abs() <= tol {
                return Ok(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.d1(x);
            let newton = x - r / d;
            x = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * hi {
                return Ok(x);
            }
        }
        Err(Error::Numeric(format!("Φ⁻¹({s}) did not converge")))
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn trim(c: &mut Vec<f64>) {
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
}
