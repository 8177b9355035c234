//! Stochastic factor dynamics and their characteristic functions.
//!
//! Every process here has a characteristic function of the form
//! `E[e^{iuX_{t+Δt}} | X_t = x] = e^{iuβx} φ(u | Δt)`; the engines only ever
//! see `β` and the state-free part `φ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Ornstein–Uhlenbeck factor `dX = κ(θ − X)dt + σ dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    pub kappa: f64,
    pub theta: f64,
    pub sigma: f64,
    pub x0: f64,
}

impl OuParams {
    pub fn new(kappa: f64, theta: f64, sigma: f64, x0: f64) -> Result<Self> {
        let p = Self {
            kappa,
            theta,
            sigma,
            x0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(domain("kappa", format!("{} must be > 0", self.kappa)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(domain("sigma", format!("{} must be > 0", self.sigma)));
        }
        if !self.theta.is_finite() || !self.x0.is_finite() {
            return Err(domain("theta/x0", "must be finite"));
        }
        Ok(())
    }

    pub fn beta(&self, dt: f64) -> f64 {
        (-self.kappa * dt).exp()
    }

    /// Conditional mean and variance of `X_{t+dt}` given `X_t = x_start`.
    pub fn moments(&self, dt: f64, x_start: f64) -> (f64, f64) {
        let one_minus_beta = -(-self.kappa * dt).exp_m1();
        let mean = x_start * self.beta(dt) + self.theta * one_minus_beta;
        let var = self.sigma * self.sigma / (2.0 * self.kappa) * -(-2.0 * self.kappa * dt).exp_m1();
        (mean, var)
    }

    /// Exponent `A(u, Δt)` of the state-free factor `φ(u | Δt) = e^{A}`.
    pub fn char_exponent(&self, u: f64, dt: f64) -> Complex64 {
        let (_, var) = self.moments(dt, 0.0);
        let drift = self.theta * -(-self.kappa * dt).exp_m1();
        Complex64::new(-0.5 * u * u * var, u * drift)
    }

    pub fn char_fn(&self, u: f64, dt: f64) -> Complex64 {
        self.char_exponent(u, dt).exp()
    }

    /// `∂φ(u | Δt)/∂σ = φ · ∂A/∂σ`.
    pub fn char_fn_dsigma(&self, u: f64, dt: f64) -> Complex64 {
        let k = self.kappa;
        let da = self.sigma * u * u / (2.0 * k)
            * ((-2.0 * k * dt).exp() - (-k * dt).exp())
            * (1.0 + (k * dt).exp());
        self.char_fn(u, dt) * da
    }
}

/// Risk-free discounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub r: f64,
}

impl MarketParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(domain("r", format!("{r} must be finite and >= 0")));
        }
        Ok(Self { r })
    }

    pub fn discount(&self, dt: f64) -> f64 {
        (-self.r * dt).exp()
    }
}

/// Arithmetic Brownian motion `dX = μ dt + σ dW`; the `β = 1` case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbmParams {
    pub mu: f64,
    pub sigma: f64,
    pub x0: f64,
}

impl AbmParams {
    pub fn new(mu: f64, sigma: f64, x0: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain("sigma", format!("{sigma} must be > 0")));
        }
        if !mu.is_finite() || !x0.is_finite() {
            return Err(domain("mu/x0", "must be finite"));
        }
        Ok(Self { mu, sigma, x0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FactorProcess {
    Ou(OuParams),
    Abm(AbmParams),
}

impl FactorProcess {
    pub fn x0(&self) -> f64 {
        match self {
            Self::Ou(p) => p.x0,
            Self::Abm(p) => p.x0,
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            Self::Ou(p) => p.sigma,
            Self::Abm(p) => p.sigma,
        }
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        match *self {
            Self::Ou(p) => Self::Ou(OuParams { sigma, ..p }),
            Self::Abm(p) => Self::Abm(AbmParams { sigma, ..p }),
        }
    }

    pub fn with_x0(&self, x0: f64) -> Self {
        match *self {
            Self::Ou(p) => Self::Ou(OuParams { x0, ..p }),
            Self::Abm(p) => Self::Abm(AbmParams { x0, ..p }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Ou(p) => p.validate(),
            Self::Abm(p) => AbmParams::new(p.mu, p.sigma, p.x0).map(|_| ()),
        }
    }

    pub fn beta(&self, dt: f64) -> f64 {
        match self {
            Self::Ou(p) => p.beta(dt),
            Self::Abm(_) => 1.0,
        }
    }

    pub fn moments(&self, dt: f64, x_start: f64) -> (f64, f64) {
        match self {
            Self::Ou(p) => p.moments(dt, x_start),
            Self::Abm(p) => (x_start + p.mu * dt, p.sigma * p.sigma * dt),
        }
    }

    pub fn char_fn(&self, u: f64, dt: f64) -> Complex64 {
        match self {
            Self::Ou(p) => p.char_fn(u, dt),
            Self::Abm(p) => {
                Complex64::new(-0.5 * u * u * p.sigma * p.sigma * dt, u * p.mu * dt).exp()
            }
        }
    }

    pub fn char_fn_dsigma(&self, u: f64, dt: f64) -> Complex64 {
        match self {
            Self::Ou(p) => p.char_fn_dsigma(u, dt),
            Self::Abm(p) => self.char_fn(u, dt) * (-u * u * p.sigma * dt),
        }
    }

    /// Cumulants `(κ₁, κ₂, κ₄)` of `X_{t0+dt}` started from `x0`; Gaussian, so `κ₄ = 0`.
    pub fn cumulants(&self, dt: f64) -> (f64, f64, f64) {
        let (m, v) = self.moments(dt, self.x0());
        (m, v, 0.0)
    }
}

impl From<OuParams> for FactorProcess {
    fn from(p: OuParams) -> Self {
        Self::Ou(p)
    }
}

/// Integration interval `[a, b]` for the cosine expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationRange {
    pub a: f64,
    pub b: f64,
    pub l_bar: f64,
}

impl TruncationRange {
    pub fn from_cumulants(k1: f64, k2: f64, k4: f64, l_bar: f64) -> Result<Self> {
        let half = l_bar * (k2 + k4.sqrt()).sqrt();
        if !(half > 0.0 && half.is_finite()) {
            return Err(domain(
                "truncation",
                format!("degenerate half-width {half}"),
            ));
        }
        Ok(Self {
            a: k1 - half,
            b: k1 + half,
            l_bar,
        })
    }

    pub fn for_process(process: &FactorProcess, dt_total: f64, l_bar: f64) -> Result<Self> {
        let (k1, k2, k4) = process.cumulants(dt_total);
        Self::from_cumulants(k1, k2, k4, l_bar)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}
