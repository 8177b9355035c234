//! Backward induction over exercise dates in cosine space.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coeffs::{constant_coefficients, map_cosine_integrals, terminal_coefficients};
use super::fft::continuation_coefficients_fft;
use super::greeks::Greeks;
use super::kernel::{dot_re, StepKernel};
use super::partition::{find_switch_partition, PartitionSettings, SwitchPartition};
use crate::contract::{argmax_prefer_idle, ActionInfo, ContractSpec};
use crate::error::{domain, Error, Result};
use crate::model::{PriceModel, TruncationRange};

/// Which conditional law sizes `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeHorizon {
    /// From `x0` over `t_{M+1} − t_0`.
    #[default]
    FullHorizon,
    /// From `x0` over a single `Δt`.
    OneStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosConfig {
    pub n_terms: usize,
    pub l_bar: f64,
    /// Minimum subinterval width; `None` means `(b − a)·1e−4`.
    pub tol_interval: Option<f64>,
    /// Switch-point scan resolution; `None` means `max(1000, 5N)`.
    pub scan_points: Option<usize>,
    pub horizon: RangeHorizon,
    /// Toeplitz/Hankel FFT products, used only when `β = 1`.
    pub use_fft: bool,
    /// Skip levels that cannot be reached from `e_start`.
    pub prune_unreachable: bool,
}

impl Default for CosConfig {
    fn default() -> Self {
        Self {
            n_terms: 200,
            l_bar: 10.0,
            tol_interval: None,
            scan_points: None,
            horizon: RangeHorizon::FullHorizon,
            use_fft: false,
            prune_unreachable: false,
        }
    }
}

impl CosConfig {
    pub fn with_terms(n_terms: usize) -> Self {
        Self {
            n_terms,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_terms < 16 {
            return Err(domain(
                "n_terms",
                format!("must be at least 16, got {}", self.n_terms),
            ));
        }
        if !(self.l_bar > 0.0) {
            return Err(domain(
                "l_bar",
                format!("must be positive, got {}", self.l_bar),
            ));
        }
        if let Some(tol) = self.tol_interval {
            if !(tol >= 0.0) {
                return Err(domain(
                    "tol_interval",
                    format!("must be non-negative, got {tol}"),
                ));
            }
        }
        if matches!(self.scan_points, Some(n) if n < 2) {
            return Err(domain("scan_points", "need at least 2 scan points"));
        }
        Ok(())
    }

    pub fn effective_scan_points(&self) -> usize {
        self.scan_points.unwrap_or(1000.max(5 * self.n_terms))
    }

    pub fn effective_tol(&self, range: &TruncationRange) -> f64 {
        self.tol_interval.unwrap_or(range.width() * 1e-4)
    }
}

/// `V_k(t_m, e)` for `m = 1..=M+1`, every level and `k < N`.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub n_terms: usize,
    pub n_levels: usize,
    pub exercises: usize,
    data: Vec<f64>,
}

impl CoefficientTable {
    fn new(n_terms: usize, n_levels: usize, exercises: usize) -> Self {
        Self {
            n_terms,
            n_levels,
            exercises,
            data: vec![f64::NAN; n_terms * n_levels * (exercises + 1)],
        }
    }

    fn offset(&self, m: usize, j: usize) -> usize {
        assert!(
            (1..=self.exercises + 1).contains(&m),
            "time index {m} outside 1..=M+1"
        );
        assert!(j < self.n_levels, "level index {j} out of range");
        ((m - 1) * self.n_levels + j) * self.n_terms
    }

    /// Coefficients at time index `m ∈ 1..=M+1` and level index `j`.
    pub fn get(&self, m: usize, j: usize) -> &[f64] {
        let o = self.offset(m, j);
        &self.data[o..o + self.n_terms]
    }

    fn set(&mut self, m: usize, j: usize, v: &[f64]) {
        let o = self.offset(m, j);
        self.data[o..o + self.n_terms].copy_from_slice(v);
    }

    /// `(m, level index, k, V_k)` rows in time, level, term order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        (1..=self.exercises + 1).flat_map(move |m| {
            (0..self.n_levels).flat_map(move |j| {
                self.get(m, j)
                    .iter()
                    .enumerate()
                    .map(move |(k, &v)| (m, j, k, v))
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub range: TruncationRange,
    pub n_terms: usize,
    pub scan_points: usize,
    pub tol_interval: f64,
    pub beta: f64,
    pub used_fft: bool,
    pub total_intervals: usize,
    pub max_intervals: usize,
    /// Wall-clock time; not serialized so that emitted files stay reproducible.
    #[serde(skip)]
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationResult {
    pub value_at_start: f64,
    pub levels: Vec<f64>,
    /// `v(t_0, S_0, e)` per level; NaN for pruned levels.
    pub values_per_level: Vec<f64>,
    pub greeks: Option<Greeks>,
    pub diagnostics: Diagnostics,
}

/// A finished backward induction, keeping everything needed for Greeks and
/// policy queries.
#[derive(Debug, Clone)]
pub struct CosSolution {
    pub spec: ContractSpec,
    pub model: PriceModel,
    pub config: CosConfig,
    pub kernel: StepKernel,
    pub table: CoefficientTable,
    /// Indexed `[m − 1][j]` for `m = 1..=M`; `None` for pruned levels.
    pub partitions: Vec<Vec<Option<SwitchPartition>>>,
    pub result: ValuationResult,
    actions: Vec<Vec<ActionInfo>>,
}

/// Value of the contract at `t_0` for every energy level.
pub fn backward_induction(
    spec: &ContractSpec,
    model: &PriceModel,
    config: &CosConfig,
) -> Result<ValuationResult> {
    Ok(solve(spec, model, config)?.result)
}

pub fn solve(spec: &ContractSpec, model: &PriceModel, config: &CosConfig) -> Result<CosSolution> {
    let started = Instant::now();
    spec.validate()?;
    model.process.validate()?;
    config.validate()?;

    let time = spec.time;
    let dt = time.dt();
    let horizon = match config.horizon {
        RangeHorizon::FullHorizon => time.settlement() - time.t0,
        RangeHorizon::OneStep => dt,
    };
    let range = TruncationRange::for_process(&model.process, horizon, config.l_bar)?;
    let n = config.n_terms;
    let kernel = StepKernel::new(&model.process, &model.market, dt, range, n);
    let n_levels = spec.grid.n_levels();
    let n_ex = time.exercises;
    let actions = spec.action_table();
    let reachable = reachable_levels(spec, &actions, config.prune_unreachable);

    let use_fft = config.use_fft && kernel.beta == 1.0;
    let n_scan = config.effective_scan_points();
    let settings = PartitionSettings {
        scan_points: n_scan,
        tol_interval: config.effective_tol(&range),
        refine_tol: 1e-10 * range.width(),
    };
    let scan_y: Vec<f64> = (0..n_scan)
        .map(|i| {
            if i == n_scan - 1 {
                range.b
            } else {
                range.a + i as f64 * range.width() / (n_scan - 1) as f64
            }
        })
        .collect();
    let scan_spot: Vec<f64> = scan_y.iter().map(|&y| model.map.eval(y)).collect();
    let scan_basis: Vec<Vec<Complex64>> = scan_y.iter().map(|&y| kernel.state_factors(y)).collect();
    // Map integrals depend only on the interval, but intervals differ per
    // level, so they are recomputed; this vector caches the full-range case.
    let full_map = map_cosine_integrals(&model.map, range.a, range.b, &range, n);

    let mut table = CoefficientTable::new(n, n_levels, n_ex);
    for (j, v) in terminal_coefficients(spec, n).iter().enumerate() {
        table.set(n_ex + 1, j, v);
    }

    let mut partitions = vec![Vec::new(); n_ex];
    for m in (1..=n_ex).rev() {
        let weights: Vec<Vec<Complex64>> = (0..n_levels)
            .map(|j| kernel.weights(table.get(m + 1, j)))
            .collect();
        // Levels needed as targets from somewhere reachable at m.
        let mut needed = vec![false; n_levels];
        for j in (0..n_levels).filter(|&j| reachable[m][j]) {
            for a in &actions[j] {
                needed[a.target] = true;
            }
        }
        let scan_cont: Vec<Option<Vec<f64>>> = (0..n_levels)
            .into_par_iter()
            .map(|j| needed[j].then(|| scan_basis.iter().map(|f| dot_re(&weights[j], f)).collect()))
            .collect();

        let level_out: Vec<Option<(Vec<f64>, SwitchPartition)>> = (0..n_levels)
            .into_par_iter()
            .map(|j| {
                if !reachable[m][j] {
                    return None;
                }
                let acts = &actions[j];
                let score = |i: usize, spot: f64, cont: f64| {
                    let info = &acts[i];
                    spec.payoff_slope(info.action) * spot + cont + info.penalty
                };
                let part = find_switch_partition(
                    acts,
                    &range,
                    &settings,
                    |s, i| {
                        let cont = scan_cont[acts[i].target].as_ref().unwrap()[s];
                        score(i, scan_spot[s], cont)
                    },
                    |y| {
                        let f = kernel.state_factors(y);
                        let spot = model.map.eval(y);
                        (0..acts.len())
                            .map(|i| score(i, spot, dot_re(&weights[acts[i].target], &f)))
                            .collect()
                    },
                );
                let mut v = vec![0.0; n];
                for (x1, x2, i) in part.intervals() {
                    let info = &acts[i];
                    let slope = spec.payoff_slope(info.action);
                    if info.action.0 != 0 {
                        let g = if x1 == range.a && x2 == range.b {
                            full_map.clone()
                        } else {
                            map_cosine_integrals(&model.map, x1, x2, &range, n)
                        };
                        v.iter_mut().zip(&g).for_each(|(v, g)| *v += slope * g);
                    }
                    let w = &weights[info.target];
                    let c = if use_fft {
                        continuation_coefficients_fft(w, x1, x2, &range)
                    } else {
                        kernel.continuation_coefficients(w, x1, x2)
                    };
                    v.iter_mut().zip(&c).for_each(|(v, c)| *v += c);
                    if info.penalty != 0.0 {
                        let q = constant_coefficients(info.penalty, x1, x2, &range, n);
                        v.iter_mut().zip(&q).for_each(|(v, q)| *v += q);
                    }
                }
                Some((v, part))
            })
            .collect();

        let mut parts = Vec::with_capacity(n_levels);
        for (j, out) in level_out.into_iter().enumerate() {
            match out {
                Some((v, part)) => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::NonFinite {
                            m,
                            e: spec.grid.level(j),
                        });
                    }
                    table.set(m, j, &v);
                    parts.push(Some(part));
                }
                None => parts.push(None),
            }
        }
        partitions[m - 1] = parts;
    }

    let x0 = model.process.x0();
    let values_per_level: Vec<f64> = (0..n_levels)
        .map(|j| {
            if reachable[0][j] {
                kernel.continuation_value(&kernel.weights(table.get(1, j)), x0)
            } else {
                f64::NAN
            }
        })
        .collect();
    let start = spec.start_index();
    let counts = partitions
        .iter()
        .flatten()
        .flatten()
        .map(|p| p.n_intervals());
    let diagnostics = Diagnostics {
        range,
        n_terms: n,
        scan_points: n_scan,
        tol_interval: settings.tol_interval,
        beta: kernel.beta,
        used_fft: use_fft,
        total_intervals: counts.clone().sum(),
        max_intervals: counts.max().unwrap_or(0),
        runtime_secs: started.elapsed().as_secs_f64(),
    };
    let result = ValuationResult {
        value_at_start: values_per_level[start],
        levels: spec.grid.levels(),
        values_per_level,
        greeks: None,
        diagnostics,
    };
    Ok(CosSolution {
        spec: spec.clone(),
        model: model.clone(),
        config: config.clone(),
        kernel,
        table,
        partitions,
        result,
        actions,
    })
}

/// `reachable[m][j]`: level `j` can hold at `t_m` (before acting).
fn reachable_levels(
    spec: &ContractSpec,
    actions: &[Vec<ActionInfo>],
    prune: bool,
) -> Vec<Vec<bool>> {
    let n_levels = spec.grid.n_levels();
    let n_times = spec.time.exercises + 2;
    if !prune {
        return vec![vec![true; n_levels]; n_times];
    }
    let mut out = vec![vec![false; n_levels]; n_times];
    out[0][spec.start_index()] = true;
    // No action is taken at t_0.
    out[1][spec.start_index()] = true;
    for m in 1..n_times - 1 {
        for j in 0..n_levels {
            if out[m][j] {
                for a in &actions[j] {
                    out[m + 1][a.target] = true;
                }
            }
        }
    }
    out
}

impl CosSolution {
    pub fn range(&self) -> &TruncationRange {
        &self.kernel.range
    }

    /// `ĉ(t_m, x, e_j)`: discounted expectation of `v(t_{m+1}, ·, e_j)`, for
    /// `m = 0..=M`.
    pub fn continuation_value(&self, m: usize, j: usize, x: f64) -> f64 {
        let w = self.kernel.weights(self.table.get(m + 1, j));
        self.kernel.continuation_value(&w, x)
    }

    /// `max_Δe h(y, Δe)` at exercise date `m ∈ 1..=M`, level `j`, and the
    /// maximising action index.
    pub fn exercise_value(&self, m: usize, j: usize, y: f64) -> (ActionInfo, f64) {
        let acts = &self.actions[j];
        let spot = self.model.map.eval(y);
        let (i, v) = argmax_prefer_idle(acts, |info| {
            self.spec.payoff_slope(info.action) * spot
                + self.continuation_value(m, info.target, y)
                + info.penalty
        });
        (acts[i], v)
    }

    /// `Σ′_k V_k(t_m, e_j) cos(kπ(y − a)/(b − a))`.
    pub fn reconstruct(&self, m: usize, j: usize, y: f64) -> f64 {
        let r = self.range();
        let th = std::f64::consts::PI * (y - r.a) / r.width();
        self.table
            .get(m, j)
            .iter()
            .enumerate()
            .map(|(k, v)| {
                if k == 0 {
                    0.5 * v
                } else {
                    v * (k as f64 * th).cos()
                }
            })
            .sum()
    }

    pub fn actions_at(&self, j: usize) -> &[ActionInfo] {
        &self.actions[j]
    }
}
