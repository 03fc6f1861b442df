//! Scenario setup and execution.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use rayon::prelude::*;
use tbc_core::band2d::{Field2D, ModeSet};
use tbc_core::delta::{DeltaDrive, DeltaRun};
use tbc_core::field::{analytic_free_density, make_gaussian, PotentialSpec, TimeScheme};
use tbc_core::kernel::KernelTable;
use tbc_core::tbc1d::{BoundaryKernel, Stepper};

use crate::config::{validate, Config, Scenario};
use crate::oracle;
use crate::output;

/// One built-in check: passes when `value < tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            value,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.value < self.tolerance
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub steps: usize,
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

pub fn potential(cfg: &Config) -> PotentialSpec {
    match cfg.scenario {
        Scenario::Free1d | Scenario::Free2d => PotentialSpec::None,
        Scenario::ScatterStatic => PotentialSpec::StaticGaussian {
            depth: cfg.depth,
            width: cfg.width,
        },
        Scenario::DrivenTrap => PotentialSpec::DrivenGaussian {
            depth: cfg.depth,
            width: cfg.width,
            frequency: cfg.frequency,
        },
        Scenario::Tunneling => PotentialSpec::DoubleWell {
            height: cfg.depth,
            width: cfg.width,
            offset: cfg.offset,
        },
        Scenario::DrivenDelta => PotentialSpec::DrivenDelta {
            strength: cfg.lambda0,
            amplitude: cfg.amplitude,
            drive_ratio: cfg.drive_ratio,
        },
    }
}

/// Grid scenarios run in units of `t̃ = 2t/σ0²`.
pub fn scheme(cfg: &Config) -> tbc_core::Result<TimeScheme> {
    TimeScheme::scaled(cfg.n_steps, cfg.total_time, cfg.sigma0)
}

/// Fresh 1D stepper at step 0.
pub fn build_stepper(cfg: &Config) -> tbc_core::Result<Stepper> {
    let grid = cfg.grid()?;
    let scheme = scheme(cfg)?;
    let table = KernelTable::new(scheme.mu2(), cfg.n_steps)?;
    let kernel = Arc::new(BoundaryKernel::build(cfg.closure, &table, grid.dx(), 0.0)?);
    let initial = make_gaussian(&grid, &cfg.packet()?);
    Stepper::new(initial, scheme, potential(cfg), kernel)
}

/// Largest `|ρ - ρ_exact|` over the grid relative to the exact peak, and the
/// `x` of the numerical density maximum. Free evolution only.
pub fn free_density_deviation(stepper: &Stepper, cfg: &Config) -> tbc_core::Result<(f64, f64)> {
    let packet = cfg.packet()?;
    let t = stepper.scheme().time(stepper.n());
    let grid = stepper.grid();
    let mut peak = 0.0_f64;
    let mut worst = 0.0_f64;
    let mut arg = (0.0, f64::NEG_INFINITY);
    for (i, v) in stepper.psi().iter().enumerate() {
        let x = grid.x(i);
        let exact = analytic_free_density(&packet, x, t);
        let rho = v.norm_sqr();
        peak = peak.max(exact);
        worst = worst.max((rho - exact).abs());
        if rho > arg.1 {
            arg = (x, rho);
        }
    }
    Ok((worst / peak, arg.0))
}

/// Advances all modes one step, in parallel.
pub fn step_modes_parallel(set: &mut ModeSet) -> tbc_core::Result<()> {
    set.steppers_mut().par_iter_mut().try_for_each(Stepper::step)
}

pub fn initial_field_2d(cfg: &Config) -> tbc_core::Result<Field2D> {
    let px = cfg.packet()?;
    let py = cfg.packet_y()?;
    Ok(Field2D::from_fn(cfg.band_grid()?, |x, y| px.value(x) * py.value(y)))
}

pub fn build_modes(cfg: &Config) -> tbc_core::Result<ModeSet> {
    let field = initial_field_2d(cfg)?;
    ModeSet::new(&field, &scheme(cfg)?, potential(cfg), cfg.closure, cfg.aliasing_tol)
}

/// Relative error of the density at the numerical maximum against the
/// separable analytic density.
pub fn peak_error_2d(field: &Field2D, cfg: &Config, t: f64) -> tbc_core::Result<f64> {
    let (px, py) = (cfg.packet()?, cfg.packet_y()?);
    let g = field.grid();
    let rho = field.density();
    let (idx, &max) = rho
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("field is not empty");
    let (i, j) = (idx / g.ny(), idx % g.ny());
    let exact = analytic_free_density(&px, g.x_grid().x(i), t) * analytic_free_density(&py, g.y(j), t);
    Ok((max - exact).abs() / exact)
}

pub fn delta_run(cfg: &Config) -> tbc_core::Result<(DeltaRun, TimeScheme)> {
    let drive = DeltaDrive::from_spec(&potential(cfg))?;
    let scheme = drive.scheme(cfg.n_steps, cfg.pulses)?;
    let mut run = DeltaRun::driven(&drive, &scheme)?;
    run.simulate()?;
    Ok((run, scheme))
}

/// Validates, runs and writes every output file of `cfg`.
pub fn run(cfg: &Config) -> anyhow::Result<RunSummary> {
    let report = validate(cfg);
    for w in &report.warnings {
        log::warn!("{w}");
    }
    if !report.is_ok() {
        anyhow::bail!("invalid configuration:\n{report}");
    }
    let summary = match cfg.scenario {
        Scenario::DrivenDelta => run_delta(cfg)?,
        Scenario::Free2d => run_2d(cfg)?,
        _ => run_1d(cfg)?,
    };
    let mut files = summary.files;
    files.push(output::write_manifest(&cfg.output, &cfg.to_text(), &summary.checks)?);
    Ok(RunSummary { files, ..summary })
}

fn run_1d(cfg: &Config) -> anyhow::Result<RunSummary> {
    let mut stepper = build_stepper(cfg).context("setting up the stepper")?;
    let mut files = vec![output::write_snapshot(&cfg.output, 0, stepper.grid(), stepper.psi())?];
    let mut worst_residual = 0.0_f64;
    for n in 1..=cfg.n_steps {
        stepper.step().with_context(|| format!("step {n}"))?;
        worst_residual = worst_residual.max(stepper.closure_residual()?);
        if n % cfg.stride == 0 || n == cfg.n_steps {
            files.push(output::write_snapshot(&cfg.output, n, stepper.grid(), stepper.psi())?);
        }
    }
    files.push(output::write_ledger(&cfg.output, stepper.scheme(), stepper.ledger())?);

    let start = stepper.ledger().total(0);
    let mut checks = vec![
        Check::new("conservation", stepper.ledger().max_drift(start), cfg.conservation_tol),
        Check::new("closure_residual", worst_residual, 1e-8),
    ];
    if cfg.scenario == Scenario::Free1d {
        let (dev, _) = free_density_deviation(&stepper, cfg)?;
        checks.push(Check::new("analytic_deviation", dev, 1e-2));
    }
    if cfg.oracle {
        let mut fresh = build_stepper(cfg)?;
        let report = oracle::compare(
            &mut fresh,
            Arc::new(potential(cfg)),
            cfg.packet()?.wavenumber(),
            cfg.sigma0,
            cfg.oracle_half_width,
            cfg.n_steps,
            cfg.oracle_tol,
        )?;
        if report.steps == 0 {
            log::warn!("reflection-free window is empty; widen oracle-half-width");
        }
        checks.push(Check::new("oracle_rel_l2", report.max_rel_l2, report.tolerance));
    }
    Ok(RunSummary {
        scenario: cfg.scenario,
        steps: stepper.n(),
        checks,
        files,
    })
}

fn run_delta(cfg: &Config) -> anyhow::Result<RunSummary> {
    let (run, scheme) = delta_run(cfg)?;
    let samples: Vec<_> = run.time_series().into_iter().step_by(cfg.stride).collect();
    let files = vec![output::write_delta_series(&cfg.output, &scheme, &samples)?];
    let excess = (0..=run.n())
        .map(|n| run.autocorrelation(n).norm() - 1.0)
        .fold(0.0_f64, f64::max);
    Ok(RunSummary {
        scenario: cfg.scenario,
        steps: run.n(),
        checks: vec![Check::new("overlap_above_one", excess, 1e-9)],
        files,
    })
}

fn run_2d(cfg: &Config) -> anyhow::Result<RunSummary> {
    let mut set = build_modes(cfg)?;
    let scheme = scheme(cfg)?;
    let start = set.ledger_total();
    let mut files = Vec::new();
    let mut worst_peak = 0.0_f64;
    let mut worst_drift = 0.0_f64;
    for n in 0..=cfg.n_steps {
        if n > 0 {
            step_modes_parallel(&mut set)?;
            worst_drift = worst_drift.max((set.ledger_total() - start).abs());
        }
        if n % cfg.stride == 0 || n == cfg.n_steps {
            let field = set.field()?;
            worst_peak = worst_peak.max(peak_error_2d(&field, cfg, scheme.time(n))?);
            files.push(output::write_density(&cfg.output, n, &field)?);
        }
    }
    Ok(RunSummary {
        scenario: cfg.scenario,
        steps: set.n(),
        checks: vec![
            Check::new("conservation", worst_drift / start, cfg.conservation_tol),
            Check::new("analytic_peak_error", worst_peak, 1e-2),
        ],
        files,
    })
}
