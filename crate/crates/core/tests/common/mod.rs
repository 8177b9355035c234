//! Independent numerical oracles shared by the integration tests and the
//! acceptance harness.
#![allow(dead_code)]

use std::f64::consts::PI;

use storval::contract::{ContractSpec, EnergyGrid, SettlementPenalty, TimeGrid};
use storval::model::{MarketParams, OuParams, PolynomialMap, PriceModel, TruncationRange};

// Gauss–Kronrod 7/15 nodes and weights on [−1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod quadrature: bisect the worst interval
/// until the summed error estimate is below `tol` (or below what rounding
/// allows for the integrand's magnitude).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const START: usize = 64;
    const LIMIT: usize = 20_000;
    if a == b {
        return 0.0;
    }
    let h = (b - a) / START as f64;
    // (error, lo, hi, value)
    let mut parts: Vec<(f64, f64, f64, f64)> = (0..START)
        .map(|i| {
            let (x1, x2) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (v, e) = gk15(&f, x1, x2);
            (e, x1, x2, v)
        })
        .collect();
    let abs_f = |x: f64| f(x).abs();
    let scale: f64 = parts.iter().map(|p| gk15(&abs_f, p.1, p.2).0.abs()).sum();
    let target = tol.max(1e-13 * scale);
    while parts.len() < LIMIT {
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if total <= target {
            break;
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| {
                if p.0 > best.1 {
                    (i, p.0)
                } else {
                    best
                }
            });
        let (_, lo, hi, _) = parts.swap_remove(worst);
        let m = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, m);
        let (v2, e2) = gk15(&f, m, hi);
        parts.push((e1, lo, m, v1));
        parts.push((e2, m, hi, v2));
    }
    parts.iter().map(|p| p.3).sum()
}

pub fn cos_basis(k: usize, y: f64, range: &TruncationRange) -> f64 {
    (k as f64 * PI * (y - range.a) / range.width()).cos()
}

/// `(2/(b−a)) ∫_{x1}^{x2} f(y) cos(kπ(y−a)/(b−a)) dy`.
pub fn cosine_coefficient(
    f: impl Fn(f64) -> f64,
    x1: f64,
    x2: f64,
    k: usize,
    range: &TruncationRange,
) -> f64 {
    2.0 / range.width() * integrate(|y| f(y) * cos_basis(k, y, range), x1, x2, 1e-13)
}

/// `E[f(Z)]` for `Z ~ N(mean, var)`.
pub fn gaussian_expectation(f: impl Fn(f64) -> f64, mean: f64, var: f64) -> f64 {
    let sd = var.sqrt();
    let dens = |x: f64| (-(x - mean).powi(2) / (2.0 * var)).exp() / (sd * (2.0 * PI).sqrt());
    integrate(
        |x| f(x) * dens(x),
        mean - 12.0 * sd,
        mean + 12.0 * sd,
        1e-13,
    )
}

pub fn reference_model(sigma: f64) -> PriceModel {
    PriceModel::new(
        PolynomialMap::second_order(0.5).unwrap(),
        OuParams::new(0.3, 10.1, sigma, 10.0).unwrap(),
        MarketParams::new(0.01).unwrap(),
    )
}

/// Two exercise dates, four levels: small enough for a dense lattice.
pub fn small_contract() -> ContractSpec {
    ContractSpec {
        time: TimeGrid {
            t0: 0.0,
            maturity: 1.0,
            exercises: 2,
        },
        grid: EnergyGrid {
            e_min: 0.0,
            e_max: 3.0,
            delta: 1.0,
        },
        e_start: 1.0,
        i_min_op: -2.0,
        i_max_op: 2.0,
        i_min_market: -0.1,
        i_min_b: -1.0,
        i_max_b: 1.0,
        eta: 0.9,
        q_b: -1.5,
        settlement: SettlementPenalty::ThresholdConstant {
            threshold: 1.0,
            penalty: -20.0,
        },
    }
}

/// `A = {0}` everywhere.
pub fn no_action_contract() -> ContractSpec {
    ContractSpec {
        i_min_op: 0.0,
        i_max_op: 0.0,
        i_min_b: 0.0,
        i_max_b: 0.0,
        e_start: 5.0,
        ..storval::presets::contract(1)
    }
}

/// Dense-lattice dynamic program: `X` on `n_grid` equally spaced points,
/// Gaussian transition densities from the OU moments, trapezoid rule.
pub fn lattice_value(spec: &ContractSpec, model: &PriceModel, n_grid: usize) -> f64 {
    let dt = spec.time.dt();
    let process = &model.process;
    let x0 = process.x0();
    let horizon = spec.time.settlement() - spec.time.t0;
    let (m_all, v_all) = process.moments(horizon, x0);
    let (lo, hi) = (m_all - 14.0 * v_all.sqrt(), m_all + 14.0 * v_all.sqrt());
    let h = (hi - lo) / (n_grid - 1) as f64;
    let xs: Vec<f64> = (0..n_grid).map(|i| lo + i as f64 * h).collect();
    let disc = model.market.discount(dt);
    let n_levels = spec.grid.n_levels();
    let (_, var) = process.moments(dt, 0.0);
    let sd = var.sqrt();
    let norm = 1.0 / (sd * (2.0 * PI).sqrt());

    // E[v(X_{t+Δt}) | X_t = x] for every level at once.
    let expect = |v: &[Vec<f64>], x: f64| -> Vec<f64> {
        let (mean, _) = process.moments(dt, x);
        let i_lo = (((mean - 10.0 * sd) - lo) / h).floor().max(0.0) as usize;
        let i_hi = ((((mean + 10.0 * sd) - lo) / h).ceil() as usize).min(n_grid - 1);
        let mut out = vec![0.0; v.len()];
        for i in i_lo..=i_hi {
            let w = if i == i_lo || i == i_hi { 0.5 } else { 1.0 };
            let p = w * h * norm * (-(xs[i] - mean).powi(2) / (2.0 * var)).exp();
            for (o, vj) in out.iter_mut().zip(v) {
                *o += p * vj[i];
            }
        }
        out
    };

    let actions = spec.action_table();
    let mut v: Vec<Vec<f64>> = (0..n_levels)
        .map(|j| vec![spec.settlement_penalty(spec.grid.level(j)); n_grid])
        .collect();
    for _m in (1..=spec.time.exercises).rev() {
        let cont: Vec<Vec<f64>> = xs.iter().map(|&x| expect(&v, x)).collect();
        v = (0..n_levels)
            .map(|j| {
                xs.iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        let s = model.map.eval(x);
                        actions[j]
                            .iter()
                            .map(|a| {
                                spec.payoff(s, a.action) + a.penalty + disc * cont[i][a.target]
                            })
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .collect()
            })
            .collect();
    }
    disc * expect(&v, x0)[spec.start_index()]
}

/// Worst relative error of each closed form (`G_k`, `Q_k`, `M_{k,l}`,
/// terminal `V_k`) over `cases` randomized instances against quadrature.
pub fn closed_form_errors(cases: usize, seed: u64) -> [(&'static str, f64); 4] {
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use storval::contract::Action;
    use storval::cos::{
        payoff_coefficients, penalty_coefficients, terminal_coefficients, MklBlock,
    };
    use storval::model::QuadraticFactor;

    let r = TruncationRange {
        a: -0.379,
        b: 20.431,
        l_bar: 10.0,
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(1.0);
    let interval = |rng: &mut rand_chacha::ChaCha8Rng| {
        let u: f64 = rng.random_range(r.a..r.b);
        let v: f64 = rng.random_range(r.a..r.b);
        (u.min(v), u.max(v))
    };
    let spec = storval::presets::contract(1);
    let (mut g_err, mut q_err, mut m_err, mut v_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cases {
        let n_factors = rng.random_range(0..=2);
        let factors = (0..n_factors)
            .map(|_| {
                let xi = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
                let bound = xi.cos() + xi.sin() + (2.0 * xi).sin().sqrt();
                QuadraticFactor::from_polar(xi, rng.random_range(0.0..bound)).unwrap()
            })
            .collect();
        let map = PolynomialMap::new(factors);
        let (x1, x2) = interval(&mut rng);
        let action = Action(rng.random_range(-6..=6));
        let k = rng.random_range(0..200);
        let g = payoff_coefficients(&spec, &map, x1, x2, action, k + 1, &r)[k];
        let want = cosine_coefficient(|y| spec.payoff(map.eval(y), action), x1, x2, k, &r);
        g_err = g_err.max(rel(g, want));

        let q = penalty_coefficients(&spec, 7.0, x1, x2, action, k + 1, &r).unwrap()[k];
        let level = spec.rapidity_penalty(7.0, action).unwrap();
        q_err = q_err.max(rel(q, cosine_coefficient(|_| level, x1, x2, k, &r)));

        let beta = if rng.random_bool(0.25) {
            1.0
        } else {
            rng.random_range(0.5..1.0)
        };
        let (kk, ll) = (rng.random_range(0..32), rng.random_range(0..32));
        let block = MklBlock::new(x1, x2, beta, 32, &r);
        let w = r.width();
        let phase = |y: f64| PI * ll as f64 * (beta * y - r.a) / w;
        let re = 2.0 / w * integrate(|y| phase(y).cos() * cos_basis(kk, y, &r), x1, x2, 1e-13);
        let im = 2.0 / w * integrate(|y| phase(y).sin() * cos_basis(kk, y, &r), x1, x2, 1e-13);
        let diff = (block.combined(kk, ll) - Complex64::new(re, im)).norm();
        m_err = m_err.max(diff / Complex64::new(re, im).norm().max(1.0));

        let c = storval::presets::contract(rng.random_range(1..=4));
        let j = rng.random_range(0..c.grid.n_levels());
        let kv = rng.random_range(0..64);
        let qs = c.settlement_penalty(c.grid.level(j));
        let v = terminal_coefficients(&c, 64)[j][kv];
        v_err = v_err.max(rel(v, cosine_coefficient(|_| qs, r.a, r.b, kv, &r)));
    }
    [
        ("G_k", g_err),
        ("Q_k", q_err),
        ("M_kl", m_err),
        ("terminal V_k", v_err),
    ]
}
