//! Cosine-series Greeks.
//!
//! With coefficients `V_l(t_{m+1}, e)` fixed, `v(t_m, x) = Re Σ′ w_l e^{iu_l(βx−a)}`
//! is differentiated in `x` and mapped to spot by `X_S = 1/Φ'`,
//! `X_SS = −Φ''/Φ'^3`. Vega differentiates `φ` only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::engine::{solve, CosConfig, CosSolution};
use crate::contract::ContractSpec;
use crate::error::{Error, Result};
use crate::model::PriceModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Greeks {
    pub delta: f64,
    pub gamma: f64,
    pub vega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreekPoint {
    pub spot: f64,
    pub energy: f64,
    pub value: f64,
    pub greeks: Greeks,
}

impl CosSolution {
    /// Value and Greeks at `t_index ∈ 0..=M`, spot `s` and level index `j`.
    pub fn value_and_greeks(&self, t_index: usize, s: f64, j: usize) -> Result<(f64, Greeks)> {
        let map = &self.model.map;
        let x = map.inverse(s)?;
        let d1 = map.d1(x);
        if d1.abs() < 1e-300 {
            return Err(Error::SingularDerivative(x));
        }
        let x_s = 1.0 / d1;
        let x_ss = -map.d2(x) / (d1 * d1 * d1);

        let k = &self.kernel;
        let v = self.table.get(t_index + 1, j);
        let state = k.state_factors(x);
        let (mut val, mut vx, mut vxx, mut vega) = (0.0, 0.0, 0.0, 0.0);
        for l in 0..k.n_terms {
            let half = if l == 0 { 0.5 } else { 1.0 };
            let base = k.phi[l] * state[l] * (half * k.discount * v[l]);
            let iub = Complex64::new(0.0, k.u(l) * k.beta);
            val += base.re;
            vx += (base * iub).re;
            vxx += (base * iub * iub).re;
            vega += (k.dphi_dsigma[l] * state[l] * (half * k.discount * v[l])).re;
        }
        let greeks = Greeks {
            delta: x_s * vx,
            gamma: x_s * x_s * vxx + x_ss * vx,
            vega,
        };
        Ok((val, greeks))
    }

    pub fn greeks_at(&self, t_index: usize, s: f64, j: usize) -> Result<Greeks> {
        Ok(self.value_and_greeks(t_index, s, j)?.1)
    }

    /// Greeks at `t_0`, the initial spot and `e_start`.
    pub fn initial_greeks(&self) -> Result<Greeks> {
        self.greeks_at(0, self.model.spot0(), self.spec.start_index())
    }

    /// `value_and_greeks` over `spots × all levels`, spot-major.
    pub fn greeks_surface(&self, t_index: usize, spots: &[f64]) -> Result<Vec<GreekPoint>> {
        let mut out = Vec::with_capacity(spots.len() * self.table.n_levels);
        for &s in spots {
            for j in 0..self.table.n_levels {
                let (value, greeks) = self.value_and_greeks(t_index, s, j)?;
                out.push(GreekPoint {
                    spot: s,
                    energy: self.spec.grid.level(j),
                    value,
                    greeks,
                });
            }
        }
        Ok(out)
    }
}

/// Central difference of the full revaluation in `σ`, including the change
/// of `[a, b]` and of every later coefficient. Diagnostic only.
pub fn full_revaluation_vega(
    spec: &ContractSpec,
    model: &PriceModel,
    config: &CosConfig,
    rel_step: f64,
) -> Result<f64> {
    let sigma = model.process.sigma();
    let h = sigma * rel_step;
    let up = solve(spec, &model.with_sigma(sigma + h), config)?
        .result
        .value_at_start;
    let down = solve(spec, &model.with_sigma(sigma - h), config)?
        .result
        .value_at_start;
    Ok((up - down) / (2.0 * h))
}
