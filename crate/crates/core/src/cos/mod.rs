//! Fourier-cosine backward induction for storage contracts.

pub mod coeffs;
pub mod engine;
pub mod fft;
pub mod greeks;
pub mod kernel;
pub mod partition;

pub use coeffs::{
    constant_coefficients, map_cosine_integrals, payoff_coefficients, penalty_coefficients,
    terminal_coefficients, MklBlock,
};
pub use engine::{
    backward_induction, solve, CoefficientTable, CosConfig, CosSolution, Diagnostics, RangeHorizon,
    ValuationResult,
};
pub use fft::continuation_coefficients_fft;
pub use greeks::{full_revaluation_vega, GreekPoint, Greeks};
pub use kernel::StepKernel;
pub use partition::{find_switch_partition, PartitionSettings, SwitchPartition};
