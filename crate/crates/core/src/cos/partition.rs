//! Splitting `[a, b]` into intervals on which a single action is optimal.

use serde::{Deserialize, Serialize};

use crate::contract::{argmax_prefer_idle, Action, ActionInfo};
use crate::model::TruncationRange;

/// `a = x_0 < x_1 < … < x_{n+1} = b` with one optimal action per interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchPartition {
    pub breakpoints: Vec<f64>,
    pub actions: Vec<Action>,
    /// Index into the level's action list, parallel to `actions`.
    #[serde(skip)]
    pub choice: Vec<usize>,
}

impl SwitchPartition {
    pub fn n_intervals(&self) -> usize {
        self.actions.len()
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.choice)
            .map(|(w, &c)| (w[0], w[1], c))
    }
}

pub struct PartitionSettings {
    pub scan_points: usize,
    pub tol_interval: f64,
    /// Bisection stops once the bracket is narrower than this.
    pub refine_tol: f64,
}

/// Locates the switch points of `argmax_Δe h(y, Δe)` over `[a, b]`.
///
/// `scan(j, i)` gives `h` at the `j`-th of `scan_points` equally spaced
/// points for action `i`; `eval(y)` gives every action's `h` at any `y`.
pub fn find_switch_partition<S, E>(
    actions: &[ActionInfo],
    range: &TruncationRange,
    settings: &PartitionSettings,
    scan: S,
    eval: E,
) -> SwitchPartition
where
    S: Fn(usize, usize) -> f64,
    E: Fn(f64) -> Vec<f64>,
{
    let n_scan = settings.scan_points.max(2);
    let step = range.width() / (n_scan - 1) as f64;
    let y_at = |j: usize| {
        if j == n_scan - 1 {
            range.b
        } else {
            range.a + j as f64 * step
        }
    };
    let best_at = |y: f64| {
        let h = eval(y);
        best_index(actions, |i| h[i])
    };

    let mut points = vec![range.a];
    let mut choice = Vec::new();
    if actions.len() == 1 {
        choice.push(0);
    } else {
        let best_scan: Vec<usize> = (0..n_scan)
            .map(|j| best_index(actions, |i| scan(j, i)))
            .collect();
        let mut current = best_scan[0];
        choice.push(current);
        for j in 0..n_scan - 1 {
            let target = best_scan[j + 1];
            let mut lo = y_at(j);
            let hi_end = y_at(j + 1);
            while current != target {
                let mut hi = hi_end;
                let mut lo_b = lo;
                while hi - lo_b > settings.refine_tol {
                    let mid = 0.5 * (lo_b + hi);
                    if best_at(mid) == current {
                        lo_b = mid;
                    } else {
                        hi = mid;
                    }
                }
                let next = if hi >= hi_end { target } else { best_at(hi) };
                if next == current {
                    // Bisection landed on a tie; accept the scan's verdict.
                    points.push(hi);
                    choice.push(target);
                    current = target;
                    break;
                }
                points.push(0.5 * (lo_b + hi));
                choice.push(next);
                current = next;
                lo = hi;
            }
        }
    }
    points.push(range.b);
    merge_short(&mut points, &mut choice, settings.tol_interval);
    SwitchPartition {
        actions: choice.iter().map(|&c| actions[c].action).collect(),
        breakpoints: points,
        choice,
    }
}

fn best_index(actions: &[ActionInfo], score: impl Fn(usize) -> f64) -> usize {
    let mut i = 0;
    argmax_prefer_idle(actions, |_| {
        let v = score(i);
        i += 1;
        v
    })
    .0
}

/// Intervals narrower than `tol` are absorbed by their left neighbour (the
/// first one by its right neighbour); equal neighbours are then fused.
fn merge_short(points: &mut Vec<f64>, choice: &mut Vec<usize>, tol: f64) {
    let mut i = 0;
    while i < choice.len() && choice.len() > 1 {
        let width = points[i + 1] - points[i];
        if width < tol {
            if i == 0 {
                points.remove(1);
                choice.remove(0);
            } else {
                points.remove(i);
                choice.remove(i);
            }
            continue;
        }
        i += 1;
    }
    let mut i = 1;
    while i < choice.len() {
        if choice[i] == choice[i - 1] {
            points.remove(i);
            choice.remove(i);
        } else {
            i += 1;
        }
    }
}
