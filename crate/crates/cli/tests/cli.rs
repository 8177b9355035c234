//! End-to-end runs of the `storval` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_storval");

fn out_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("storval-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    run(&all)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    std::fs::create_dir_all(dir).unwrap();
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

const NO_ACTION: &str = r#"
[model]
map = "second-order-gamma"
gamma = 0.5
kappa_per_year = 0.3
theta = 10.1
sigma_per_sqrt_year = 0.6
x0 = 10.0
rate_per_year = 0.01

[contract]
maturity_years = 1.0
exercises = 50
e_min_mwh = 0.0
e_max_mwh = 15.0
delta_e_mwh = 1.0
e_start_mwh = 5.0
i_min_op_mwh = 0.0
i_max_op_mwh = 0.0
i_min_market_mwh = 0.0
i_min_b_mwh = 0.0
i_max_b_mwh = 0.0
eta = 1.0
q_b_eur = -3.0

[settlement]
kind = "threshold-constant"
threshold_mwh = 7.0
penalty_eur = -350.0

[lsmc]
n_paths = 2000
n_runs = 2
seed = 7
"#;

#[test]
fn price_contract2_sigma06() {
    let dir = out_dir("price2");
    let o = run_in(&dir, &["price", "--preset", "contract2_sigma06"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = read_json(dir.join("valuation.json"));
    let value = v["value_at_start"].as_f64().unwrap();
    assert!((value - 3.4641).abs() <= 0.02, "{value}");
    let g = &v["greeks"];
    assert!((g["delta"].as_f64().unwrap() - 0.1663).abs() <= 0.01);
    let rows = csv_rows(dir.join("valuation.csv"));
    assert_eq!(rows[0], ["e", "value"]);
    assert_eq!(rows.len(), 1 + 16);
}

#[test]
fn price_contract3_is_worthless() {
    let dir = out_dir("price3");
    let o = run_in(
        &dir,
        &["price", "--preset", "contract3_sigma06", "--format", "json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let value = read_json(dir.join("valuation.json"))["value_at_start"]
        .as_f64()
        .unwrap();
    assert!(value.abs() < 1e-3, "{value}");
    assert!(!dir.join("valuation.csv").exists());
}

#[test]
fn empty_action_set_pays_discounted_penalty() {
    let dir = out_dir("noaction");
    let cfg = write_config(&dir, NO_ACTION);
    let o = run_in(&dir, &["price", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let value = read_json(dir.join("valuation.json"))["value_at_start"]
        .as_f64()
        .unwrap();
    let want = -350.0 * (-0.01f64 * 1.02).exp();
    assert!((value - want).abs() < 1e-9, "{value} vs {want}");
}

#[test]
fn coefficient_dump_layout() {
    let dir = out_dir("dump");
    let text = format!("{NO_ACTION}\n[cos]\nn_terms = 32\n\n[output]\ndump_coefficients = true\nformats = [\"csv\"]\n");
    let cfg = write_config(&dir, &text);
    let o = run_in(&dir, &["price", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(dir.join("coefficients.csv"));
    assert_eq!(rows[0], ["m", "e", "k", "V_k"]);
    // M + 1 = 51 dates, 16 levels, 32 terms.
    assert_eq!(rows.len() - 1, 51 * 16 * 32);
}

#[test]
fn initial_greeks_single_point() {
    let dir = out_dir("greeks0");
    let o = run_in(&dir, &["greeks", "--preset", "contract4_sigma12"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(dir.join("greeks.csv"));
    assert_eq!(rows[0], ["s", "e", "delta", "gamma", "vega"]);
    // Defaults to S0 = Φ(10) = 30; pick the row for e_start = 2.
    assert_eq!(rows.len() - 1, 13);
    let r = rows.iter().find(|r| r[1] == "2.0").unwrap();
    assert_eq!(r[0], "30.0");
    let got: Vec<f64> = r[2..].iter().map(|x| x.parse().unwrap()).collect();
    for (g, w) in got.iter().zip([-9.3865, 0.3245, 0.1237]) {
        assert!((g - w).abs() <= 0.01, "{got:?}");
    }
}

#[test]
fn half_time_greeks_grid() {
    let dir = out_dir("greeks25");
    let o = run_in(
        &dir,
        &[
            "greeks",
            "--preset",
            "contract2_sigma06",
            "--t-index",
            "25",
            "--price-grid",
            "10:60:6",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(dir.join("greeks.csv"));
    assert_eq!(rows.len() - 1, 6 * 16);
    let pts = read_json(dir.join("greeks.json"));
    assert!(pts
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p["value"].as_f64().unwrap().is_finite()));
}

#[test]
fn zero_value_contract_has_zero_greeks() {
    let dir = out_dir("greekszero");
    let text = NO_ACTION.replace("penalty_eur = -350.0", "penalty_eur = 0.0");
    let cfg = write_config(&dir, &text);
    let o = run_in(
        &dir,
        &[
            "greeks",
            "--config",
            cfg.to_str().unwrap(),
            "--price-grid",
            "20:50:4",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for r in &csv_rows(dir.join("greeks.csv"))[1..] {
        for x in &r[2..] {
            assert!(x.parse::<f64>().unwrap().abs() < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn lsmc_is_deterministic_for_a_seed() {
    let text = NO_ACTION
        .replace("i_max_op_mwh = 0.0", "i_max_op_mwh = 2.0")
        .replace("i_min_op_mwh = 0.0", "i_min_op_mwh = -2.0");
    let (a, b) = (out_dir("lsmc-a"), out_dir("lsmc-b"));
    for d in [&a, &b] {
        let cfg = write_config(d, &text);
        let o = run_in(
            d,
            &["lsmc", "--config", cfg.to_str().unwrap(), "--seed", "11"],
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in [
        "lsmc.json",
        "lsmc_summary.csv",
        "lsmc_runs.csv",
        "policy_energy.csv",
        "policy_actions.csv",
    ] {
        let (x, y) = (
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
        );
        assert_eq!(x, y, "{f} differs");
    }
    assert_eq!(
        csv_rows(a.join("policy_energy.csv"))[0],
        ["time", "mean_e", "ci_lo", "ci_hi", "min_e", "max_e"]
    );
    assert_eq!(
        csv_rows(a.join("policy_actions.csv"))[0],
        ["time", "action", "count"]
    );
    assert_eq!(csv_rows(a.join("lsmc_runs.csv")).len(), 3);
}

#[test]
fn lsmc_single_run_is_refused() {
    let dir = out_dir("lsmc1");
    let cfg = write_config(&dir, &NO_ACTION.replace("n_runs = 2", "n_runs = 1"));
    let o = run_in(&dir, &["lsmc", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 2 runs"), "{}", stderr(&o));
}

#[test]
fn convergence_rows() {
    let dir = out_dir("conv");
    let o = run_in(
        &dir,
        &[
            "convergence",
            "--preset",
            "contract2_sigma06",
            "--n-list",
            "100,150,200,400",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(dir.join("convergence.csv"));
    assert_eq!(rows[0], ["N", "value"]);
    let v: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(v.len(), 4);
    assert!((v[2] - v[3]).abs() < 1e-3);
    assert!(
        (v[0] - 3.4770).abs() <= 0.02 && (v[1] - 3.4640).abs() <= 0.02,
        "{v:?}"
    );

    let dir = out_dir("conv1");
    let o = run_in(
        &dir,
        &[
            "convergence",
            "--preset",
            "contract3_sigma03",
            "--n-list",
            "64",
            "--format",
            "csv",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_rows(dir.join("convergence.csv")).len(), 2);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = out_dir("bad");
    let cfg = write_config(
        &dir,
        &NO_ACTION.replace("eta = 1.0", "eta = 1.0\nefficiency = 0.5"),
    );
    let o = run_in(&dir, &["price", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("efficiency"), "{}", stderr(&o));

    let cfg = write_config(
        &dir,
        &NO_ACTION.replace("e_start_mwh = 5.0", "e_start_mwh = 20.0"),
    );
    let o = run_in(&dir, &["price", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("e_start"), "{}", stderr(&o));

    let o = run(&["price", "--preset", "contract9_sigma03"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["price", "--config", "/does/not/exist.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reproduce_passes_on_bundled_configs() {
    let dir = out_dir("repro");
    let o = run_in(&dir, &["reproduce", "--format", "csv"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}\n{}", stderr(&o));
    // 16 values and 3 Greeks at two volatilities for four contracts.
    assert_eq!(
        stdout.lines().filter(|l| l.starts_with("PASS")).count(),
        16 + 24
    );
    assert_eq!(csv_rows(dir.join("reproduce.csv")).len(), 1 + 40);
}
