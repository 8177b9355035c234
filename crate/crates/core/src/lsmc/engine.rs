//! Least-squares Monte Carlo for storage contracts.
//!
//! Per exercise date the discounted accumulated cash flows of every level are
//! regressed on the spot price, decisions use the fitted continuation values,
//! and realised cash flows are accumulated along the chosen level.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::regression::{PolyBasis, PolyFit};
use super::stats::{confidence_interval, Interval, Z_95};
use crate::contract::{argmax_prefer_idle, ActionInfo, ContractSpec};
use crate::error::{domain, Error, Result};
use crate::model::{simulate_paths, PathEnsemble, PriceModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsmcConfig {
    pub n_paths: usize,
    pub n_runs: usize,
    pub basis_degree: usize,
    pub seed: u64,
    /// Fresh paths for the out-of-sample policy value; 0 disables it.
    #[serde(default)]
    pub out_of_sample_paths: usize,
}

impl Default for LsmcConfig {
    fn default() -> Self {
        Self {
            n_paths: 25_000,
            n_runs: 10,
            basis_degree: 3,
            seed: 20_240_611,
            out_of_sample_paths: 0,
        }
    }
}

impl LsmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 100 {
            return Err(domain(
                "n_paths",
                format!("need at least 100 paths, got {}", self.n_paths),
            ));
        }
        if self.basis_degree < 1 {
            return Err(domain("basis_degree", "must be at least 1"));
        }
        if self.n_runs < 1 {
            return Err(domain("n_runs", "must be at least 1"));
        }
        Ok(())
    }

    /// Seed of run `run`; the out-of-sample ensemble uses `run + n_runs`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed
            .wrapping_add((run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// Fitted continuation values for each exercise date and level.
#[derive(Debug, Clone)]
pub struct FittedPolicy {
    /// `[m − 1]` for `m = 1..=M`.
    bases: Vec<PolyBasis>,
    fits: Vec<Vec<PolyFit>>,
    actions: Vec<Vec<ActionInfo>>,
    discount: f64,
}

impl FittedPolicy {
    fn decide(&self, spec: &ContractSpec, m: usize, j: usize, s: f64) -> &ActionInfo {
        let z = self.bases[m - 1].standardise(s);
        let fits = &self.fits[m - 1];
        let acts = &self.actions[j];
        let (i, _) = argmax_prefer_idle(acts, |info| {
            spec.payoff(s, info.action) + fits[info.target].eval(z) + info.penalty
        });
        &acts[i]
    }
}

/// One trajectory of the fitted policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Level index at `t_0, …, t_{M+1}`.
    pub levels: Vec<usize>,
    /// Action steps at `t_1, …, t_M`.
    pub actions: Vec<i64>,
    /// `Σ_m e^{−r(t_m − t_0)}(PO + Q) + e^{−r(t_{M+1} − t_0)} q_s`.
    pub discounted_cash: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyStat {
    pub time: f64,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionCount {
    pub time: f64,
    pub de: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyStatistics {
    pub n_trajectories: usize,
    pub energy: Vec<EnergyStat>,
    pub action_usage: Vec<ActionCount>,
    /// Number of trajectories ending at each level.
    pub final_levels: Vec<(f64, usize)>,
}

impl PolicyStatistics {
    pub fn final_fraction_at(&self, e: f64) -> f64 {
        let hits: usize = self
            .final_levels
            .iter()
            .filter(|(l, _)| (l - e).abs() < 1e-9)
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.n_trajectories as f64
    }
}

#[derive(Debug, Clone, Default)]
struct PolicyAccumulator {
    n: usize,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    min: Vec<usize>,
    max: Vec<usize>,
    // (m, steps) -> count
    usage: BTreeMap<(usize, i64), usize>,
    finals: BTreeMap<usize, usize>,
}

impl PolicyAccumulator {
    fn new(n_times: usize) -> Self {
        Self {
            sum: vec![0.0; n_times],
            sum_sq: vec![0.0; n_times],
            min: vec![usize::MAX; n_times],
            max: vec![0; n_times],
            ..Self::default()
        }
    }

    fn add(&mut self, spec: &ContractSpec, tr: &Trajectory) {
        self.n += 1;
        for (t, &j) in tr.levels.iter().enumerate() {
            let e = spec.grid.level(j);
            self.sum[t] += e;
            self.sum_sq[t] += e * e;
            self.min[t] = self.min[t].min(j);
            self.max[t] = self.max[t].max(j);
        }
        for (m, &s) in tr.actions.iter().enumerate() {
            *self.usage.entry((m + 1, s)).or_default() += 1;
        }
        *self.finals.entry(*tr.levels.last().unwrap()).or_default() += 1;
    }

    fn finish(&self, spec: &ContractSpec) -> PolicyStatistics {
        let n = self.n as f64;
        let energy = (0..self.sum.len())
            .map(|t| {
                let mean = self.sum[t] / n;
                let var = (self.sum_sq[t] / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
                let half = Z_95 * (var / n).sqrt();
                EnergyStat {
                    time: spec.time.time(t),
                    mean,
                    ci_low: mean - half,
                    ci_high: mean + half,
                    min: spec.grid.level(self.min[t]),
                    max: spec.grid.level(self.max[t]),
                }
            })
            .collect();
        PolicyStatistics {
            n_trajectories: self.n,
            energy,
            action_usage: self
                .usage
                .iter()
                .map(|(&(m, s), &count)| ActionCount {
                    time: spec.time.time(m),
                    de: s as f64 * spec.grid.delta,
                    count,
                })
                .collect(),
            final_levels: self
                .finals
                .iter()
                .map(|(&j, &c)| (spec.grid.level(j), c))
                .collect(),
        }
    }
}

/// Result of one LSMC run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub value: f64,
    /// `e^{−rΔt}·ACF_1` at `e_start`, per path.
    pub dacf0: Vec<f64>,
    pub policy: FittedPolicy,
    pub paths: PathEnsemble,
}

/// One backward pass over freshly simulated paths.
pub fn single_run(
    spec: &ContractSpec,
    model: &PriceModel,
    config: &LsmcConfig,
    run: usize,
) -> Result<RunOutcome> {
    spec.validate()?;
    config.validate()?;
    let times = spec.time.all_times();
    let paths = simulate_paths(&model.process, config.n_paths, &times, config.run_seed(run))?;
    let policy_and_acf = fit_policy(spec, model, config, &paths);
    let (policy, acf1) = policy_and_acf;
    let start = spec.start_index();
    let dacf0: Vec<f64> = acf1[start].iter().map(|v| policy.discount * v).collect();
    let value = dacf0.iter().sum::<f64>() / dacf0.len() as f64;
    Ok(RunOutcome {
        value,
        dacf0,
        policy,
        paths,
    })
}

fn fit_policy(
    spec: &ContractSpec,
    model: &PriceModel,
    config: &LsmcConfig,
    paths: &PathEnsemble,
) -> (FittedPolicy, Vec<Vec<f64>>) {
    let n_ex = spec.time.exercises;
    let n_levels = spec.grid.n_levels();
    let discount = model.market.discount(spec.time.dt());
    let actions = spec.action_table();

    // CF_{M+1} = q_s at every level.
    let mut acf: Vec<Vec<f64>> = (0..n_levels)
        .map(|j| vec![spec.settlement_penalty(spec.grid.level(j)); paths.n_paths])
        .collect();
    let mut bases = Vec::with_capacity(n_ex);
    let mut fits_all = Vec::with_capacity(n_ex);
    for m in (1..=n_ex).rev() {
        let spot: Vec<f64> = paths
            .at_time(m)
            .iter()
            .map(|&x| model.map.eval(x))
            .collect();
        let basis = PolyBasis::new(&spot, config.basis_degree);
        let fits: Vec<PolyFit> = acf
            .par_iter()
            .map(|a| {
                let dacf: Vec<f64> = a.iter().map(|v| discount * v).collect();
                basis.fit(&dacf)
            })
            .collect();
        let z: Vec<f64> = spot.iter().map(|&s| basis.standardise(s)).collect();
        let cv: Vec<Vec<f64>> = fits
            .par_iter()
            .map(|f| z.iter().map(|&z| f.eval(z)).collect())
            .collect();
        acf = (0..n_levels)
            .into_par_iter()
            .map(|j| {
                let acts = &actions[j];
                (0..spot.len())
                    .map(|i| {
                        let s = spot[i];
                        let (best, _) = argmax_prefer_idle(acts, |info| {
                            spec.payoff(s, info.action) + cv[info.target][i] + info.penalty
                        });
                        let info = &acts[best];
                        spec.payoff(s, info.action) + info.penalty + discount * acf[info.target][i]
                    })
                    .collect()
            })
            .collect();
        bases.push(basis);
        fits_all.push(fits);
    }
    bases.reverse();
    fits_all.reverse();
    (
        FittedPolicy {
            bases,
            fits: fits_all,
            actions,
            discount,
        },
        acf,
    )
}

/// Runs the fitted policy forward from `e_start` along every path.
pub fn simulate_policy(
    spec: &ContractSpec,
    model: &PriceModel,
    policy: &FittedPolicy,
    paths: &PathEnsemble,
) -> Vec<Trajectory> {
    let n_ex = spec.time.exercises;
    let start = spec.start_index();
    let d = policy.discount;
    (0..paths.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut j = start;
            let mut levels = Vec::with_capacity(n_ex + 2);
            let mut actions = Vec::with_capacity(n_ex);
            levels.push(j);
            levels.push(j);
            let mut disc = 1.0;
            let mut cash = 0.0;
            for m in 1..=n_ex {
                disc *= d;
                let s = model.map.eval(paths.state(i, m));
                let info = policy.decide(spec, m, j, s);
                cash += disc * (spec.payoff(s, info.action) + info.penalty);
                actions.push(info.action.0);
                j = info.target;
                levels.push(j);
            }
            disc *= d;
            cash += disc * spec.settlement_penalty(spec.grid.level(j));
            Trajectory {
                levels,
                actions,
                discounted_cash: cash,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsmcResult {
    pub value_mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub std_dev: f64,
    pub run_values: Vec<f64>,
    /// Mean value of the fitted policies on independent paths, if requested.
    pub out_of_sample_mean: Option<f64>,
    pub policy: PolicyStatistics,
}

impl LsmcResult {
    pub fn interval(&self) -> Interval {
        Interval {
            mean: self.value_mean,
            std_dev: self.std_dev,
            low: self.ci_low,
            high: self.ci_high,
        }
    }

    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.run_values.len() as f64).sqrt()
    }
}

/// `n_runs` independent runs with a 95% confidence interval and policy
/// statistics pooled over every in-sample trajectory.
pub fn lsmc_value(
    spec: &ContractSpec,
    model: &PriceModel,
    config: &LsmcConfig,
) -> Result<LsmcResult> {
    config.validate()?;
    if config.n_runs < 2 {
        return Err(Error::Statistics(format!(
            "a confidence interval needs at least 2 runs, got {}",
            config.n_runs
        )));
    }
    let times = spec.time.all_times();
    let mut acc = PolicyAccumulator::new(times.len());
    let mut run_values = Vec::with_capacity(config.n_runs);
    let mut oos = Vec::new();
    for run in 0..config.n_runs {
        let out = single_run(spec, model, config, run)?;
        for tr in simulate_policy(spec, model, &out.policy, &out.paths) {
            acc.add(spec, &tr);
        }
        if config.out_of_sample_paths > 0 {
            let fresh = simulate_paths(
                &model.process,
                config.out_of_sample_paths,
                &times,
                config.run_seed(run + config.n_runs),
            )?;
            let trs = simulate_policy(spec, model, &out.policy, &fresh);
            oos.push(trs.iter().map(|t| t.discounted_cash).sum::<f64>() / trs.len() as f64);
        }
        log::debug!("lsmc run {run}: {}", out.value);
        run_values.push(out.value);
    }
    let ci = confidence_interval(&run_values)?;
    Ok(LsmcResult {
        value_mean: ci.mean,
        ci_low: ci.low,
        ci_high: ci.high,
        std_dev: ci.std_dev,
        run_values,
        out_of_sample_mean: (!oos.is_empty()).then(|| oos.iter().sum::<f64>() / oos.len() as f64),
        policy: acc.finish(spec),
    })
}
