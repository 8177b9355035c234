//! The run configuration file: sectioned TOML with units in the key names.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use storval::cos::{CosConfig, RangeHorizon};
use storval::model::AbmParams;
use storval::{
    ContractSpec, EnergyGrid, FactorProcess, LsmcConfig, MarketParams, OuParams, PolynomialMap,
    PriceModel, QuadraticFactor, SettlementPenalty, TimeGrid,
};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub contract: ContractSection,
    pub settlement: SettlementSection,
    #[serde(default)]
    pub cos: CosSection,
    #[serde(default)]
    pub lsmc: LsmcSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// `Φ(x) = ((1 − γ)/2) x² + γ x`; needs `gamma`.
    SecondOrderGamma,
    /// `Φ(x) = x`.
    Identity,
    /// Product of the `[[model.factors]]` entries.
    Factors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessKind {
    #[default]
    Ou,
    Abm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSection {
    pub alpha: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub map: MapKind,
    pub gamma: Option<f64>,
    pub factors: Option<Vec<FactorSection>>,
    #[serde(default)]
    pub process: ProcessKind,
    pub kappa_per_year: Option<f64>,
    /// Long-run level of the factor (factor units).
    pub theta: Option<f64>,
    /// Drift of the factor for `process = "abm"`.
    pub mu_per_year: Option<f64>,
    pub sigma_per_sqrt_year: f64,
    pub x0: f64,
    pub rate_per_year: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractSection {
    #[serde(default)]
    pub t0_years: f64,
    pub maturity_years: f64,
    pub exercises: usize,
    pub e_min_mwh: f64,
    pub e_max_mwh: f64,
    pub delta_e_mwh: f64,
    pub e_start_mwh: f64,
    pub i_min_op_mwh: f64,
    pub i_max_op_mwh: f64,
    pub i_min_market_mwh: f64,
    pub i_min_b_mwh: f64,
    pub i_max_b_mwh: f64,
    pub eta: f64,
    pub q_b_eur: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SettlementSection {
    None {},
    ThresholdConstant {
        threshold_mwh: f64,
        penalty_eur: f64,
    },
    PiecewiseLinear {
        e_fix_mwh: f64,
        slope_penalty_eur: f64,
        floor_penalty_eur: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CosSection {
    pub n_terms: usize,
    pub l_bar: f64,
    /// Minimum switch-interval width in factor units.
    pub tol_interval: Option<f64>,
    pub scan_points: Option<usize>,
    pub horizon: RangeHorizon,
    pub use_fft: bool,
    pub prune_unreachable: bool,
}

impl Default for CosSection {
    fn default() -> Self {
        let c = CosConfig::default();
        Self {
            n_terms: c.n_terms,
            l_bar: c.l_bar,
            tol_interval: c.tol_interval,
            scan_points: c.scan_points,
            horizon: c.horizon,
            use_fft: c.use_fft,
            prune_unreachable: c.prune_unreachable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LsmcSection {
    pub n_paths: usize,
    pub n_runs: usize,
    pub basis_degree: usize,
    pub seed: u64,
    pub out_of_sample_paths: usize,
}

impl Default for LsmcSection {
    fn default() -> Self {
        let c = LsmcConfig::default();
        Self {
            n_paths: c.n_paths,
            n_runs: c.n_runs,
            basis_degree: c.basis_degree,
            seed: c.seed,
            out_of_sample_paths: c.out_of_sample_paths,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
    /// Also write the `(m, e, k, V_k)` coefficient table from `price`.
    pub dump_coefficients: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
            dump_coefficients: false,
        }
    }
}

fn required<T: Copy>(v: Option<T>, key: &str, errs: &mut Vec<String>) -> Option<T> {
    if v.is_none() {
        errs.push(format!("{key}: required"));
    }
    v
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(vec![e.message().trim().to_string()]))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(vec![format!("{}: {}", path.display(), e)]))
    }

    pub fn price_model(&self) -> Result<PriceModel, CliError> {
        let m = &self.model;
        let mut errs = Vec::new();
        let map = match m.map {
            MapKind::Identity => Some(PolynomialMap::identity()),
            MapKind::SecondOrderGamma => {
                required(m.gamma, "model.gamma", &mut errs).and_then(|g| {
                    PolynomialMap::second_order(g)
                        .map_err(|e| errs.push(format!("model.gamma: {e}")))
                        .ok()
                })
            }
            MapKind::Factors => match &m.factors {
                Some(fs) if !fs.is_empty() => {
                    let mut out = Vec::new();
                    for (i, f) in fs.iter().enumerate() {
                        match QuadraticFactor::new(f.alpha, f.gamma) {
                            Ok(q) => out.push(q),
                            Err(e) => errs.push(format!("model.factors[{i}]: {e}")),
                        }
                    }
                    Some(PolynomialMap::new(out))
                }
                _ => {
                    errs.push("model.factors: required and non-empty for map = \"factors\"".into());
                    None
                }
            },
        };
        let process: Option<FactorProcess> = match m.process {
            ProcessKind::Ou => {
                let kappa = required(m.kappa_per_year, "model.kappa_per_year", &mut errs);
                let theta = required(m.theta, "model.theta", &mut errs);
                match (kappa, theta) {
                    (Some(k), Some(t)) => OuParams::new(k, t, m.sigma_per_sqrt_year, m.x0)
                        .map_err(|e| errs.push(format!("model: {e}")))
                        .ok()
                        .map(Into::into),
                    _ => None,
                }
            }
            ProcessKind::Abm => {
                required(m.mu_per_year, "model.mu_per_year", &mut errs).and_then(|mu| {
                    AbmParams::new(mu, m.sigma_per_sqrt_year, m.x0)
                        .map_err(|e| errs.push(format!("model: {e}")))
                        .ok()
                        .map(FactorProcess::Abm)
                })
            }
        };
        let market = MarketParams::new(m.rate_per_year)
            .map_err(|e| errs.push(format!("model.rate_per_year: {e}")))
            .ok();
        match (map, process, market) {
            (Some(map), Some(process), Some(market)) if errs.is_empty() => Ok(PriceModel {
                map,
                process,
                market,
            }),
            _ => Err(CliError::Config(errs)),
        }
    }

    /// Builds and validates the contract; validation warnings go to the log.
    pub fn contract_spec(&self) -> Result<ContractSpec, CliError> {
        let c = &self.contract;
        let settlement = match self.settlement {
            SettlementSection::None {} => SettlementPenalty::none(),
            SettlementSection::ThresholdConstant {
                threshold_mwh,
                penalty_eur,
            } => SettlementPenalty::ThresholdConstant {
                threshold: threshold_mwh,
                penalty: penalty_eur,
            },
            SettlementSection::PiecewiseLinear {
                e_fix_mwh,
                slope_penalty_eur,
                floor_penalty_eur,
            } => SettlementPenalty::PiecewiseLinear {
                e_fix: e_fix_mwh,
                slope_penalty: slope_penalty_eur,
                floor_penalty: floor_penalty_eur,
            },
        };
        let spec = ContractSpec {
            time: TimeGrid {
                t0: c.t0_years,
                maturity: c.maturity_years,
                exercises: c.exercises,
            },
            grid: EnergyGrid {
                e_min: c.e_min_mwh,
                e_max: c.e_max_mwh,
                delta: c.delta_e_mwh,
            },
            e_start: c.e_start_mwh,
            i_min_op: c.i_min_op_mwh,
            i_max_op: c.i_max_op_mwh,
            i_min_market: c.i_min_market_mwh,
            i_min_b: c.i_min_b_mwh,
            i_max_b: c.i_max_b_mwh,
            eta: c.eta,
            q_b: c.q_b_eur,
            settlement,
        };
        for w in spec.validate()? {
            log::warn!("contract: {w}");
        }
        Ok(spec)
    }

    pub fn cos_config(&self) -> Result<CosConfig, CliError> {
        let c = &self.cos;
        let cfg = CosConfig {
            n_terms: c.n_terms,
            l_bar: c.l_bar,
            tol_interval: c.tol_interval,
            scan_points: c.scan_points,
            horizon: c.horizon,
            use_fft: c.use_fft,
            prune_unreachable: c.prune_unreachable,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn lsmc_config(&self) -> Result<LsmcConfig, CliError> {
        let l = &self.lsmc;
        let cfg = LsmcConfig {
            n_paths: l.n_paths,
            n_runs: l.n_runs,
            basis_degree: l.basis_degree,
            seed: l.seed,
            out_of_sample_paths: l.out_of_sample_paths,
        };
        cfg.validate()?;
        if cfg.n_runs < 2 {
            return Err(CliError::Config(vec![format!(
                "lsmc.n_runs: a confidence interval needs at least 2 runs, got {}",
                cfg.n_runs
            )]));
        }
        Ok(cfg)
    }
}
