use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use tbc_core::field::TimeScheme;
use tbc_core::kernel::KernelTable;
use tbc_sim::{output, runner, validate, Config, Scenario};

#[derive(Parser)]
#[command(version, about = "Schrödinger wave packets on a box with transparent boundaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario; parameters are overridden with `--key value`.
    Run {
        scenario: String,
        /// `--key value` overrides, plus the bare flag `--oracle`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Check a config file without running it.
    Validate { config: PathBuf },
    /// Print C_q and the origin kernel sums.
    Kernels {
        #[arg(long)]
        dump: bool,
        #[arg(long, default_value_t = 40)]
        n_steps: usize,
        /// Physical time step; defaults to the free-1d scenario's.
        #[arg(long)]
        dt: Option<f64>,
    },
}

/// Exit code for bad invocations and configurations.
const USAGE: u8 = 2;

fn parse_overrides(cfg: &mut Config, args: &[String]) -> anyhow::Result<()> {
    let mut it = args.iter().peekable();
    while let Some(arg) = it.next() {
        let Some(key) = arg.strip_prefix("--") else {
            bail!("expected `--key value`, found `{arg}`");
        };
        if let Some((k, v)) = key.split_once('=') {
            cfg.set(k, v)?;
            continue;
        }
        if key == "oracle" && it.peek().is_none_or(|next| next.starts_with("--")) {
            cfg.oracle = true;
            continue;
        }
        let value = it.next().with_context(|| format!("missing value for `--{key}`"))?;
        cfg.set(key, value)?;
    }
    Ok(())
}

fn run(scenario: &str, overrides: &[String]) -> Result<ExitCode, (u8, anyhow::Error)> {
    let usage = |e: anyhow::Error| (USAGE, e);
    let scenario: Scenario = scenario.parse().map_err(|e: tbc_sim::config::ConfigError| usage(e.into()))?;
    let mut cfg = Config::defaults(scenario);
    parse_overrides(&mut cfg, overrides).map_err(usage)?;
    let report = validate(&cfg);
    if !report.is_ok() {
        return Err(usage(anyhow::anyhow!("invalid configuration:\n{report}")));
    }
    let summary = runner::run(&cfg).map_err(|e| (1, e))?;
    for c in &summary.checks {
        println!("{:<24} {:>12.4e}  (tol {:.1e})  {}", c.name, c.value, c.tolerance, c.verdict());
    }
    println!("{} steps, {} files in {}", summary.steps, summary.files.len(), cfg.output.display());
    Ok(if summary.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, overrides } => run(&scenario, &overrides),
        Command::Validate { config } => (|| {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = Config::parse(&text)?;
            let report = validate(&cfg);
            print!("{report}");
            Ok(if report.is_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(USAGE)
            })
        })()
        .map_err(|e| (USAGE, e)),
        Command::Kernels { dump, n_steps, dt } => (|| {
            if !dump {
                bail!("nothing to do; pass --dump");
            }
            let free = Config::defaults(Scenario::Free1d);
            let scheme = match dt {
                Some(dt) => TimeScheme::physical(n_steps, dt)?,
                None => TimeScheme::scaled(n_steps, free.total_time * n_steps as f64 / free.n_steps as f64, free.sigma0)?,
            };
            let table = KernelTable::new(scheme.mu2(), n_steps)?;
            output::write_kernel_dump(io::stdout().lock(), &table)?;
            Ok(ExitCode::SUCCESS)
        })()
        .map_err(|e| (USAGE, e)),
    };
    match result {
        Ok(code) => code,
        Err((code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
