//! Valuation of energy storage contracts under a polynomial
//! Ornstein-Uhlenbeck spot model.
//!
//! Two independent engines: a Fourier-cosine backward induction with Greeks
//! ([`cos`]) and least-squares Monte Carlo ([`lsmc`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contract;
pub mod cos;
pub mod error;
pub mod lsmc;
pub mod model;
pub mod presets;

pub use contract::{Action, ActionInfo, ContractSpec, EnergyGrid, SettlementPenalty, TimeGrid};
pub use cos::{backward_induction, CosConfig, CosSolution, Greeks, ValuationResult};
pub use error::{Error, FieldError, Result};
pub use lsmc::{lsmc_value, LsmcConfig, LsmcResult};
pub use model::{
    FactorProcess, MarketParams, OuParams, PathEnsemble, PolynomialMap, PriceModel,
    QuadraticFactor, TruncationRange,
};
