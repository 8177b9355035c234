//! Brute-force and analytic oracles for the two engines.

mod common;

use storval::cos::{self, CosConfig, RangeHorizon};
use storval::lsmc::{self, LsmcConfig};
use storval::model::{simulate_paths, AbmParams, FactorProcess, PriceModel};

const LATTICE_POINTS: usize = 20_000;

#[test]
fn no_action_contract_is_discounted_penalty() {
    let spec = common::no_action_contract();
    for sigma in [0.3, 1.2] {
        let model = common::reference_model(sigma);
        let v = cos::backward_induction(&spec, &model, &CosConfig::default()).unwrap();
        let want = (-0.01 * spec.time.settlement()).exp() * spec.settlement_penalty(spec.e_start);
        assert!(
            (v.value_at_start - want).abs() < 1e-10,
            "{} vs {want}",
            v.value_at_start
        );
    }
}

#[test]
fn zero_cash_flow_contract_is_worthless() {
    let spec = storval::ContractSpec {
        settlement: storval::SettlementPenalty::none(),
        q_b: 0.0,
        ..common::no_action_contract()
    };
    let v = cos::backward_induction(
        &spec,
        &common::reference_model(0.6),
        &CosConfig::with_terms(64),
    )
    .unwrap();
    assert_eq!(v.value_at_start, 0.0);
}

#[test]
fn cos_matches_dense_lattice() {
    let spec = common::small_contract();
    for sigma in [0.6, 1.2] {
        let model = common::reference_model(sigma);
        let lattice = common::lattice_value(&spec, &model, LATTICE_POINTS);
        let v = cos::backward_induction(&spec, &model, &CosConfig::default()).unwrap();
        assert!(
            (v.value_at_start - lattice).abs() < 1e-3,
            "sigma {sigma}: cos {} lattice {lattice}",
            v.value_at_start
        );
    }
}

#[test]
fn lsmc_matches_dense_lattice() {
    let spec = common::small_contract();
    let model = common::reference_model(1.2);
    let lattice = common::lattice_value(&spec, &model, LATTICE_POINTS);
    // In-sample estimates carry a foresight bias of order 1/n_paths
    // (about +0.03 at 20k paths here), so the oracle uses a large ensemble.
    let cfg = LsmcConfig {
        n_paths: 100_000,
        n_runs: 10,
        out_of_sample_paths: 100_000,
        ..LsmcConfig::default()
    };
    let r = lsmc::lsmc_value(&spec, &model, &cfg).unwrap();
    let se = r.std_error();
    let oos = r.out_of_sample_mean.unwrap();
    assert!(
        oos <= lattice + 3.0 * se,
        "out-of-sample {oos} above lattice {lattice}"
    );
    assert!(
        (r.value_mean - lattice).abs() <= 3.0 * se,
        "lsmc {} ± {se} vs lattice {lattice}",
        r.value_mean
    );
}

#[test]
fn one_step_horizon_agrees_on_small_contract() {
    // A narrower [a, b] still covers the law of each single step.
    let spec = common::small_contract();
    let model = common::reference_model(0.6);
    let full = cos::backward_induction(&spec, &model, &CosConfig::default()).unwrap();
    let one = cos::backward_induction(
        &spec,
        &model,
        &CosConfig {
            horizon: RangeHorizon::OneStep,
            l_bar: 12.0,
            ..CosConfig::default()
        },
    )
    .unwrap();
    assert!((full.value_at_start - one.value_at_start).abs() < 1e-3);
}

#[test]
fn fft_path_matches_direct_products_for_abm() {
    let spec = common::small_contract();
    let abm = AbmParams::new(0.05, 1.0, 10.0).unwrap();
    let model = PriceModel {
        process: FactorProcess::Abm(abm),
        ..common::reference_model(1.0)
    };
    let direct = cos::solve(&spec, &model, &CosConfig::with_terms(128)).unwrap();
    let fast = cos::solve(
        &spec,
        &model,
        &CosConfig {
            use_fft: true,
            ..CosConfig::with_terms(128)
        },
    )
    .unwrap();
    assert!(fast.result.diagnostics.used_fft);
    assert!(!direct.result.diagnostics.used_fft);
    for m in 1..=spec.time.exercises {
        for j in 0..spec.grid.n_levels() {
            for (a, b) in direct.table.get(m, j).iter().zip(fast.table.get(m, j)) {
                assert!((a - b).abs() < 1e-9, "m={m} j={j}: {a} vs {b}");
            }
        }
    }
    let lattice = common::lattice_value(&spec, &model, LATTICE_POINTS);
    assert!((fast.result.value_at_start - lattice).abs() < 1e-3);
}

#[test]
fn pruning_keeps_the_start_value() {
    let spec = storval::presets::contract(2);
    let model = storval::presets::model(0.6);
    let cfg = CosConfig::with_terms(64);
    let full = cos::backward_induction(&spec, &model, &cfg).unwrap();
    let pruned = cos::backward_induction(
        &spec,
        &model,
        &CosConfig {
            prune_unreachable: true,
            ..cfg
        },
    )
    .unwrap();
    assert_eq!(full.value_at_start, pruned.value_at_start);
    let nan = pruned
        .values_per_level
        .iter()
        .filter(|v| v.is_nan())
        .count();
    assert_eq!(nan, spec.grid.n_levels() - 1);
}

#[test]
fn ou_sample_moments_at_maturity() {
    let model = common::reference_model(0.6);
    let n = 1_000_000;
    let paths = simulate_paths(&model.process, n, &[0.0, 0.5, 1.0], 7).unwrap();
    let xs = paths.at_time(2);
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let (m, v) = model.process.moments(1.0, 10.0);
    let se_mean = (v / n as f64).sqrt();
    // Var of the sample variance of a Gaussian is 2σ⁴/(n−1).
    let se_var = v * (2.0 / (n - 1) as f64).sqrt();
    assert!((mean - m).abs() < 4.0 * se_mean, "{mean} vs {m}");
    assert!((var - v).abs() < 4.0 * se_var, "{var} vs {v}");
}

#[test]
fn ou_empirical_characteristic_function() {
    let model = common::reference_model(0.9);
    let dt = 0.25;
    let n = 100_000;
    let paths = simulate_paths(&model.process, n, &[0.0, dt], 99).unwrap();
    let xs = paths.at_time(1);
    let x0 = model.process.x0();
    for u in [0.5, 1.0, 2.0] {
        let (re, im) = xs.iter().fold((0.0, 0.0), |(r, i), x| {
            (r + (u * x).cos(), i + (u * x).sin())
        });
        let emp = num_complex::Complex64::new(re / n as f64, im / n as f64);
        let phase = num_complex::Complex64::from_polar(1.0, u * model.process.beta(dt) * x0);
        let want = phase * model.process.char_fn(u, dt);
        assert!(
            (emp - want).norm() < 4.0 / (n as f64).sqrt(),
            "u={u}: {emp} vs {want}"
        );
    }
}

#[test]
fn lsmc_cash_flow_identity() {
    let spec = storval::presets::contract(2);
    let model = storval::presets::model(1.2);
    let cfg = LsmcConfig {
        n_paths: 2_000,
        n_runs: 2,
        ..LsmcConfig::default()
    };
    let run = lsmc::single_run(&spec, &model, &cfg, 0).unwrap();
    let trajectories = lsmc::simulate_policy(&spec, &model, &run.policy, &run.paths);
    for (t, d) in trajectories.iter().zip(&run.dacf0) {
        assert!(
            (t.discounted_cash - d).abs() <= 1e-9 * d.abs().max(1.0),
            "{} vs {d}",
            t.discounted_cash
        );
        let mut j = spec.start_index();
        for (m, &s) in t.actions.iter().enumerate() {
            assert_eq!(t.levels[m + 1], j);
            assert!(spec.allowed_at(j).iter().any(|a| a.0 == s));
            j = (j as i64 + s) as usize;
        }
        assert_eq!(*t.levels.last().unwrap(), j);
    }
}

#[test]
fn lsmc_is_deterministic_and_refuses_single_run() {
    let spec = common::small_contract();
    let model = common::reference_model(0.6);
    let cfg = LsmcConfig {
        n_paths: 1_000,
        n_runs: 3,
        ..LsmcConfig::default()
    };
    let a = lsmc::lsmc_value(&spec, &model, &cfg).unwrap();
    let b = lsmc::lsmc_value(&spec, &model, &cfg).unwrap();
    assert_eq!(a, b);
    let one = LsmcConfig { n_runs: 1, ..cfg };
    assert!(matches!(
        lsmc::lsmc_value(&spec, &model, &one),
        Err(storval::Error::Statistics(_))
    ));
}

#[test]
fn lsmc_degenerate_contract_without_noise() {
    let spec = common::no_action_contract();
    let model = common::reference_model(1e-12);
    let cfg = LsmcConfig {
        n_paths: 500,
        n_runs: 2,
        ..LsmcConfig::default()
    };
    let r = lsmc::lsmc_value(&spec, &model, &cfg).unwrap();
    let want = (-0.01 * spec.time.settlement()).exp() * spec.settlement_penalty(spec.e_start);
    assert!((r.value_mean - want).abs() < 1e-10);
    assert!(r.policy.energy.iter().all(|e| e.mean == spec.e_start));
    assert!(r.policy.action_usage.iter().all(|a| a.de == 0.0));
}
