//! Least-squares Monte Carlo valuation, used as an independent check on the
//! cosine engine.

pub mod engine;
pub mod regression;
pub mod stats;

pub use engine::{
    lsmc_value, simulate_policy, single_run, ActionCount, EnergyStat, FittedPolicy, LsmcConfig,
    LsmcResult, PolicyStatistics, RunOutcome, Trajectory,
};
pub use regression::{PolyBasis, PolyFit};
pub use stats::{confidence_interval, mean_std, Interval, Z_95};
