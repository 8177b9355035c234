//! Structural spot-price model `S_t = Φ(X_t)`.

pub mod map;
pub mod paths;
pub mod process;

pub use map::{PolynomialMap, QuadraticFactor};
pub use paths::{simulate_paths, PathEnsemble};
pub use process::{AbmParams, FactorProcess, MarketParams, OuParams, TruncationRange};

use serde::{Deserialize, Serialize};

/// Everything the engines need to know about prices: the map, the factor
/// dynamics and discounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceModel {
    pub map: PolynomialMap,
    pub process: FactorProcess,
    pub market: MarketParams,
}

impl PriceModel {
    pub fn new(
        map: PolynomialMap,
        process: impl Into<FactorProcess>,
        market: MarketParams,
    ) -> Self {
        Self {
            map,
            process: process.into(),
            market,
        }
    }

    pub fn spot0(&self) -> f64 {
        self.map.eval(self.process.x0())
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        Self {
            process: self.process.with_sigma(sigma),
            ..self.clone()
        }
    }
}
