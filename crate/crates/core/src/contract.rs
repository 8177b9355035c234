//! Storage contract data model: time and energy grids, admissible actions,
//! payoffs and penalties.
//!
//! All penalties are non-positive amounts that are *added* to value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};

const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub maturity: f64,
    /// Number of exercise moments `M`.
    pub exercises: usize,
}

impl TimeGrid {
    pub fn dt(&self) -> f64 {
        (self.maturity - self.t0) / self.exercises as f64
    }

    /// `t_m` for `m = 0..=M+1`; `t_{M+1}` is the settlement date.
    pub fn time(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt()
    }

    pub fn settlement(&self) -> f64 {
        self.time(self.exercises + 1)
    }

    /// `t_0, …, t_{M+1}`.
    pub fn all_times(&self) -> Vec<f64> {
        (0..=self.exercises + 1).map(|m| self.time(m)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    pub e_min: f64,
    pub e_max: f64,
    /// Spacing `δ`; the grid has `N_e + 1` levels with `N_e = (e_max − e_min)/δ`.
    pub delta: f64,
}

impl EnergyGrid {
    pub fn n_intervals(&self) -> usize {
        ((self.e_max - self.e_min) / self.delta).round() as usize
    }

    pub fn n_levels(&self) -> usize {
        self.n_intervals() + 1
    }

    pub fn level(&self, j: usize) -> f64 {
        self.e_min + j as f64 * self.delta
    }

    pub fn levels(&self) -> Vec<f64> {
        (0..self.n_levels()).map(|j| self.level(j)).collect()
    }

    pub fn index_of(&self, e: f64) -> Result<usize> {
        let j = (e - self.e_min) / self.delta;
        let r = j.round();
        if (j - r).abs() > GRID_TOL || r < 0.0 || r as usize >= self.n_levels() {
            return Err(Error::OffGrid(e));
        }
        Ok(r as usize)
    }

    fn steps_of(&self, x: f64) -> Option<i64> {
        let s = x / self.delta;
        let r = s.round();
        ((s - r).abs() <= GRID_TOL).then_some(r as i64)
    }
}

/// Energy change `Δe = steps · δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action(pub i64);

impl Action {
    pub const IDLE: Action = Action(0);

    pub fn steps(self) -> i64 {
        self.0
    }

    pub fn de(self, grid: &EnergyGrid) -> f64 {
        self.0 as f64 * grid.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SettlementPenalty {
    /// Pays `penalty` (≤ 0) when `e < threshold`.
    ThresholdConstant { threshold: f64, penalty: f64 },
    /// `−slope_penalty·(e_max − e)/(e_max − e_fix)` above `e_fix`,
    /// `−floor_penalty` below it.
    PiecewiseLinear {
        e_fix: f64,
        slope_penalty: f64,
        floor_penalty: f64,
    },
}

impl SettlementPenalty {
    pub fn none() -> Self {
        Self::ThresholdConstant {
            threshold: 0.0,
            penalty: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractSpec {
    pub time: TimeGrid,
    pub grid: EnergyGrid,
    pub e_start: f64,
    pub i_min_op: f64,
    pub i_max_op: f64,
    pub i_min_market: f64,
    pub i_min_b: f64,
    pub i_max_b: f64,
    pub eta: f64,
    /// Rapidity penalty for actions in `A ∖ D`.
    pub q_b: f64,
    pub settlement: SettlementPenalty,
}

/// One admissible action at a given level, with its precomputed penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionInfo {
    pub action: Action,
    pub target: usize,
    pub penalty: f64,
}

#[derive(Debug, Clone, Copy)]
struct StepBounds {
    op_lo: i64,
    op_hi: i64,
    b_lo: i64,
    b_hi: i64,
}

impl ContractSpec {
    /// Checks every invariant; returns warnings on success.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut errs = Vec::new();
        let mut warnings = Vec::new();
        let mut bad =
            |field: &'static str, message: String| errs.push(FieldError { field, message });
        let t = &self.time;
        if !(t.maturity > t.t0) {
            bad(
                "maturity",
                format!("{} must exceed t0 = {}", t.maturity, t.t0),
            );
        }
        if t.exercises == 0 {
            bad("exercises", "need at least one exercise moment".into());
        }
        let g = &self.grid;
        if !(g.e_min < g.e_max) {
            bad(
                "e_max",
                format!("{} must exceed e_min = {}", g.e_max, g.e_min),
            );
        }
        if !(g.delta > 0.0) {
            bad("delta", format!("{} must be > 0", g.delta));
        } else {
            let n = (g.e_max - g.e_min) / g.delta;
            if (n - n.round()).abs() > GRID_TOL || n.round() < 1.0 {
                bad(
                    "delta",
                    format!("{} does not divide the capacity range", g.delta),
                );
            }
            if g.index_of(self.e_start).is_err() {
                bad("e_start", format!("{} is not a grid level", self.e_start));
            }
            for (field, v) in [
                ("i_min_op", self.i_min_op),
                ("i_max_op", self.i_max_op),
                ("i_min_b", self.i_min_b),
                ("i_max_b", self.i_max_b),
            ] {
                if g.steps_of(v).is_none() {
                    bad(
                        field,
                        format!("{v} is not a multiple of delta = {}", g.delta),
                    );
                }
            }
            if self.i_min_market.abs() <= g.delta {
                warnings.push(format!(
                    "i_min_market = {} is inactive at delta = {}",
                    self.i_min_market, g.delta
                ));
            }
        }
        if !(self.e_start >= g.e_min && self.e_start <= g.e_max) {
            bad(
                "e_start",
                format!("{} outside [e_min, e_max]", self.e_start),
            );
        }
        if self.i_min_op > 0.0 {
            bad("i_min_op", format!("{} must be <= 0", self.i_min_op));
        }
        if self.i_min_market > 0.0 {
            bad(
                "i_min_market",
                format!("{} must be <= 0", self.i_min_market),
            );
        }
        if !(self.i_min_op <= self.i_min_b && self.i_min_b <= 0.0) {
            bad(
                "i_min_b",
                format!("{} must lie in [i_min_op, 0]", self.i_min_b),
            );
        }
        if !(0.0 <= self.i_max_b && self.i_max_b <= self.i_max_op) {
            bad(
                "i_max_b",
                format!("{} must lie in [0, i_max_op]", self.i_max_b),
            );
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            bad("eta", format!("{} must lie in (0, 1]", self.eta));
        }
        if !(self.q_b <= 0.0) {
            bad("q_b", format!("{} must be <= 0", self.q_b));
        }
        match self.settlement {
            SettlementPenalty::ThresholdConstant { threshold, penalty } => {
                if !(penalty <= 0.0) {
                    bad("settlement.penalty", format!("{penalty} must be <= 0"));
                }
                if !threshold.is_finite() {
                    bad("settlement.threshold", "must be finite".into());
                }
            }
            SettlementPenalty::PiecewiseLinear {
                e_fix,
                slope_penalty,
                floor_penalty,
            } => {
                if !(e_fix < g.e_max) {
                    bad("settlement.e_fix", format!("{e_fix} must be < e_max"));
                }
                if !(slope_penalty >= 0.0) {
                    bad(
                        "settlement.slope_penalty",
                        format!("{slope_penalty} must be >= 0"),
                    );
                }
                if !(floor_penalty >= slope_penalty) {
                    bad(
                        "settlement.floor_penalty",
                        format!("{floor_penalty} must be >= slope_penalty for monotonicity"),
                    );
                }
            }
        }
        if errs.is_empty() {
            Ok(warnings)
        } else {
            Err(Error::InvalidContract(errs))
        }
    }

    fn bounds(&self) -> StepBounds {
        let d = self.grid.delta;
        let steps = |x: f64| (x / d).round() as i64;
        StepBounds {
            op_lo: steps(self.i_min_op),
            op_hi: steps(self.i_max_op),
            b_lo: steps(self.i_min_b),
            b_hi: steps(self.i_max_b),
        }
    }

    fn release_ok(&self, s: i64) -> bool {
        s as f64 * self.grid.delta <= self.i_min_market + GRID_TOL * self.grid.delta
    }

    fn actions_within(&self, j: usize, lo: i64, hi: i64) -> Vec<Action> {
        let top = self.grid.n_intervals() as i64;
        let j = j as i64;
        (lo.min(0)..=hi.max(0))
            .filter(|&s| {
                let in_band = if s < 0 {
                    s >= lo && self.release_ok(s)
                } else {
                    s <= hi
                };
                in_band && (0..=top).contains(&(j + s))
            })
            .map(Action)
            .collect()
    }

    /// `A(e)` at level index `j`, ascending in `Δe`.
    pub fn allowed_at(&self, j: usize) -> Vec<Action> {
        let b = self.bounds();
        self.actions_within(j, b.op_lo, b.op_hi)
    }

    /// `D(e)` at level index `j`, ascending in `Δe`.
    pub fn penalty_free_at(&self, j: usize) -> Vec<Action> {
        let b = self.bounds();
        self.actions_within(j, b.b_lo, b.b_hi)
    }

    pub fn allowed_actions(&self, e: f64) -> Result<Vec<Action>> {
        Ok(self.allowed_at(self.grid.index_of(e)?))
    }

    pub fn penalty_free_actions(&self, e: f64) -> Result<Vec<Action>> {
        Ok(self.penalty_free_at(self.grid.index_of(e)?))
    }

    fn is_penalty_free(&self, a: Action) -> bool {
        let b = self.bounds();
        a.0 >= b.b_lo && a.0 <= b.b_hi
    }

    /// Cash flow of taking action `a` at spot `s`.
    pub fn payoff(&self, s: f64, a: Action) -> f64 {
        let de = a.de(&self.grid);
        match a.0 {
            0 => 0.0,
            n if n > 0 => -(s / self.eta) * de,
            _ => -s * de,
        }
    }

    /// `Δe ↦ −Δe/η` for charging, `−Δe` for releasing: the payoff is `slope · S`.
    pub fn payoff_slope(&self, a: Action) -> f64 {
        let de = a.de(&self.grid);
        if a.0 > 0 {
            -de / self.eta
        } else {
            -de
        }
    }

    pub fn rapidity_penalty(&self, e: f64, a: Action) -> Result<f64> {
        let j = self.grid.index_of(e)?;
        if !self.allowed_at(j).contains(&a) {
            return Err(Error::ActionNotAllowed {
                e,
                de: a.de(&self.grid),
            });
        }
        Ok(if self.is_penalty_free(a) {
            0.0
        } else {
            self.q_b
        })
    }

    pub fn settlement_penalty(&self, e: f64) -> f64 {
        match self.settlement {
            SettlementPenalty::ThresholdConstant { threshold, penalty } => {
                if e < threshold - GRID_TOL {
                    penalty
                } else {
                    0.0
                }
            }
            SettlementPenalty::PiecewiseLinear {
                e_fix,
                slope_penalty,
                floor_penalty,
            } => {
                let e_max = self.grid.e_max;
                if e >= e_fix - GRID_TOL {
                    // `+ 0.0` normalises −0 at e = e_max.
                    -slope_penalty * (e_max - e).max(0.0) / (e_max - e_fix) + 0.0
                } else {
                    -floor_penalty
                }
            }
        }
    }

    /// Per level: every admissible action with its target level and penalty.
    pub fn action_table(&self) -> Vec<Vec<ActionInfo>> {
        (0..self.grid.n_levels())
            .map(|j| {
                self.allowed_at(j)
                    .into_iter()
                    .map(|a| ActionInfo {
                        action: a,
                        target: (j as i64 + a.0) as usize,
                        penalty: if self.is_penalty_free(a) {
                            0.0
                        } else {
                            self.q_b
                        },
                    })
                    .collect()
            })
            .collect()
    }

    pub fn start_index(&self) -> usize {
        self.grid
            .index_of(self.e_start)
            .expect("validated contract has e_start on the grid")
    }
}

/// Index of the best score; ties go to the smallest `|Δe|`, then the
/// smaller `Δe`.
pub(crate) fn argmax_prefer_idle<F>(actions: &[ActionInfo], mut score: F) -> (usize, f64)
where
    F: FnMut(&ActionInfo) -> f64,
{
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, info) in actions.iter().enumerate() {
        let v = score(info);
        let better = v > best_val
            || (v == best_val && {
                let (a, b) = (info.action.0, actions[best].action.0);
                (a.abs(), a) < (b.abs(), b)
            });
        if better {
            best = i;
            best_val = v;
        }
    }
    (best, best_val)
}
