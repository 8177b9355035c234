use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use storval_cli::config::Format;
use storval_cli::output::Sink;
use storval_cli::{bundled, commands, CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "storval",
    version,
    about = "Value electricity storage contracts with the COS method and LSMC"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Use a bundled configuration, e.g. `contract2_sigma06`.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Only emit this format; overrides `output.formats`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for the engines (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// COS value at t0 for every energy level.
    Price {
        #[command(flatten)]
        common: Common,
    },
    /// Delta, gamma and vega on a spot grid at one exercise date.
    Greeks {
        #[command(flatten)]
        common: Common,
        /// Exercise index in 0..=M; 0 is the valuation date.
        #[arg(long, default_value_t = 0)]
        t_index: usize,
        /// Spot prices in EUR/MWh, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "price_grid")]
        spots: Option<Vec<f64>>,
        /// Evenly spaced spots `LOW:HIGH:COUNT`.
        #[arg(long, value_name = "LOW:HIGH:COUNT")]
        price_grid: Option<String>,
    },
    /// Least-squares Monte Carlo value, confidence interval and policy statistics.
    Lsmc {
        #[command(flatten)]
        common: Common,
        /// Base seed; overrides `lsmc.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// COS value against the number of series terms.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "50,100,150,200,300,400")]
        n_list: Vec<usize>,
    },
    /// Prices all bundled configurations and compares with the published tables.
    Reproduce {
        /// Output directory for the comparison report.
        #[arg(long, value_name = "DIR", default_value = "out/reproduce")]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, value_name = "N")]
        threads: Option<usize>,
    },
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--price-grid expects LOW:HIGH:COUNT, got `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    // Written negated so that NaN bounds are rejected.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if n == 0 || !(hi >= lo) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

fn set_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn formats(flag: Option<Format>, configured: &[Format]) -> Vec<Format> {
    flag.map(|f| vec![f]).unwrap_or_else(|| configured.to_vec())
}

fn load(common: &Common) -> Result<(RunConfig, Sink), CliError> {
    set_threads(common.threads)?;
    let cfg = match (&common.config, &common.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => {
            let text = bundled::find(name).ok_or_else(|| {
                let names: Vec<&str> = bundled::BUNDLED.iter().map(|(n, _)| *n).collect();
                CliError::Usage(format!(
                    "unknown preset `{name}`; available: {}",
                    names.join(", ")
                ))
            })?;
            RunConfig::parse(text)?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --config or --preset is required".into(),
            ))
        }
    };
    let dir = common
        .out
        .clone()
        .unwrap_or_else(|| cfg.output.directory.clone());
    let sink = Sink::new(dir, formats(common.format, &cfg.output.formats));
    Ok((cfg, sink))
}

fn run(cli: Cli) -> Result<Sink, CliError> {
    match cli.command {
        Command::Price { common } => {
            let (cfg, sink) = load(&common)?;
            let r = commands::price(&cfg, &sink)?;
            println!("value_at_start = {:.6} EUR", r.value_at_start);
            if let Some(g) = r.greeks {
                println!(
                    "delta = {:.6}  gamma = {:.6}  vega = {:.6}",
                    g.delta, g.gamma, g.vega
                );
            }
            Ok(sink)
        }
        Command::Greeks {
            common,
            t_index,
            spots,
            price_grid,
        } => {
            let (cfg, sink) = load(&common)?;
            let spots = match price_grid {
                Some(g) => Some(parse_grid(&g)?),
                None => spots,
            };
            let points = commands::greeks(&cfg, &sink, t_index, spots)?;
            println!("{} greek points at t_index {t_index}", points.len());
            Ok(sink)
        }
        Command::Lsmc { common, seed } => {
            let (cfg, sink) = load(&common)?;
            let r = commands::lsmc(&cfg, &sink, seed)?;
            println!(
                "value = {:.6} EUR, 95% CI [{:.6}, {:.6}] over {} runs",
                r.value_mean,
                r.ci_low,
                r.ci_high,
                r.run_values.len()
            );
            if let Some(o) = r.out_of_sample_mean {
                println!("out-of-sample policy value = {o:.6} EUR");
            }
            Ok(sink)
        }
        Command::Convergence { common, n_list } => {
            let (cfg, sink) = load(&common)?;
            for row in commands::convergence(&cfg, &sink, &n_list)? {
                println!("N = {:>5}  value = {:.6}", row.n, row.value);
            }
            Ok(sink)
        }
        Command::Reproduce {
            out,
            format,
            threads,
        } => {
            set_threads(threads)?;
            let sink = Sink::new(out, formats(format, &[Format::Csv, Format::Json]));
            let checks = commands::reproduce(&sink)?;
            for c in &checks {
                println!(
                    "{} {:<18} {:<6} computed {:>12.4} expected {:>12.4} tol {:.4}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.config,
                    c.quantity,
                    c.computed,
                    c.expected,
                    c.tolerance
                );
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            for p in sink.written() {
                eprintln!("wrote {}", p.display());
            }
            if failed > 0 {
                return Err(CliError::Reproduction {
                    failed,
                    total: checks.len(),
                });
            }
            println!("all {} checks passed", checks.len());
            Ok(sink)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(sink) => {
            for p in sink.written() {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
