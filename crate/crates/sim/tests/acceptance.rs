//! One verdict line per acceptance criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. A
//! criterion listed in `KNOWN_SHORTFALLS` prints FAIL without failing the
//! target, but its documented failure mode is still asserted so that a
//! regression (or a fix) shows up. Any other FAIL exits nonzero.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use tbc_core::band2d::decompose;
use tbc_core::delta::{bound_state, DeltaDrive, DeltaRun, RegularizedDelta};
use tbc_core::field::{ComplexField, Grid1D, PotentialSpec};
use tbc_core::kernel::{cq_coefficient, KernelTable};
use tbc_core::tbc1d::{BoundaryKernel, ClosureKind, Stepper};
use tbc_core::Complex;
use tbc_sim::{oracle, runner, Config, Scenario};

/// Criteria that cannot be met as stated; see the README.
const KNOWN_SHORTFALLS: [u8; 3] = [1, 6, 7];

struct Verdict {
    pass: bool,
    detail: String,
    /// Holds for a known shortfall only if it still fails the documented way.
    expected_shape: bool,
}

impl Verdict {
    fn plain(pass: bool, detail: String) -> Self {
        Self {
            pass,
            detail,
            expected_shape: true,
        }
    }
}

const GRID_SCENARIOS: [Scenario; 4] = [
    Scenario::Free1d,
    Scenario::ScatterStatic,
    Scenario::DrivenTrap,
    Scenario::Tunneling,
];

fn run_free(nx: usize, n_steps: usize, closure: ClosureKind) -> (f64, f64) {
    let mut cfg = Config::defaults(Scenario::Free1d);
    cfg.nx = nx;
    cfg.n_steps = n_steps;
    cfg.closure = closure;
    let mut s = runner::build_stepper(&cfg).unwrap();
    s.run(n_steps).unwrap();
    runner::free_density_deviation(&s, &cfg).unwrap()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let (dev, peak_x) = run_free(201, 40, ClosureKind::Lattice);
    let elapsed = start.elapsed();
    let (dev_c, _) = run_free(201, 40, ClosureKind::Continuum);
    let (fine, _) = run_free(401, 80, ClosureKind::Lattice);
    let (fine_c, _) = run_free(401, 80, ClosureKind::Continuum);
    let near_one = (0.75..=1.0).contains(&peak_x);
    let refines = fine < dev && fine_c < dev_c;
    let fast = elapsed.as_secs_f64() < 1.0;
    Verdict {
        pass: dev < 1e-2 && near_one && refines && fast,
        detail: format!(
            "max deviation {dev:.3e} of peak (continuum closure {dev_c:.3e}), maximum at x = {peak_x:.2}; \
             N=80/nx=401 gives {fine:.3e} ({fine_c:.3e}); {:.0} ms",
            elapsed.as_secs_f64() * 1e3
        ),
        // Discretisation error just above 1%, removed by refinement.
        expected_shape: dev < 1.2e-2 && near_one && refines && fast && fine < 5e-3,
    }
}

fn criterion_2() -> Verdict {
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for sc in GRID_SCENARIOS {
        let cfg = Config::defaults(sc);
        let mut s = runner::build_stepper(&cfg).unwrap();
        s.run(cfg.n_steps).unwrap();
        let l = s.ledger();
        let drift = (0..=l.steps()).map(|n| (l.total(n) - 1.0).abs()).fold(0.0, f64::max);
        worst = worst.max(drift);
        parts.push(format!("{sc} {drift:.1e}"));
    }
    Verdict::plain(worst < 1e-5, format!("max |norm + exterior - 1|: {}", parts.join(", ")))
}

fn criterion_3() -> Verdict {
    let mut worst_cq = 0.0_f64;
    for q in 0..=30u32 {
        // (2q)! / (2^q q!)² = binom(2q, q) / 4^q, exactly in integers.
        let mut binom: u128 = 1;
        for i in 0..q as u128 {
            binom = binom * (2 * q as u128 - i) / (i + 1);
        }
        let exact = binom as f64 / 4f64.powi(q as i32);
        worst_cq = worst_cq.max((cq_coefficient(q as usize) - exact).abs() / exact);
    }
    let mut worst_sum = 0.0_f64;
    for sc in [Scenario::Free1d, Scenario::DrivenTrap, Scenario::Free2d] {
        let cfg = Config::defaults(sc);
        let scheme = runner::scheme(&cfg).unwrap();
        let table = KernelTable::new(scheme.mu2(), cfg.n_steps).unwrap();
        let sums = table.sums(0.0, 0.0).unwrap();
        let scale = table.kernel_sum_origin(0).norm();
        for p in 0..cfg.n_steps {
            let exact = table.kernel_sum_origin(p);
            let denom = if p % 2 == 0 { exact.norm() } else { scale };
            worst_sum = worst_sum.max((sums.values[p] - exact).norm() / denom);
        }
    }
    Verdict::plain(
        worst_cq < 1e-14 && worst_sum < 1e-9,
        format!("C_q relative error {worst_cq:.1e} (q <= 30); DFT origin sums {worst_sum:.1e} (p < N)"),
    )
}

fn criterion_4() -> Verdict {
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for sc in GRID_SCENARIOS {
        let cfg = Config::defaults(sc);
        let mut s = runner::build_stepper(&cfg).unwrap();
        let start = Instant::now();
        let report = oracle::compare(
            &mut s,
            Arc::new(runner::potential(&cfg)),
            cfg.packet().unwrap().wavenumber(),
            cfg.sigma0,
            8.0,
            cfg.n_steps,
            1e-6,
        )
        .unwrap();
        worst = worst.max(report.max_rel_l2);
        parts.push(format!(
            "{sc} {:.1e} over {} steps ({:.1} s)",
            report.max_rel_l2,
            report.steps,
            start.elapsed().as_secs_f64()
        ));
        if report.steps == 0 {
            worst = f64::INFINITY;
        }
    }
    Verdict::plain(worst < 1e-6, format!("relative L2 vs [-8, 8] Dirichlet: {}", parts.join(", ")))
}

fn criterion_5() -> Verdict {
    let cfg = Config::defaults(Scenario::DrivenDelta);
    let start = Instant::now();

    // Undriven.
    let drive0 = DeltaDrive::new(cfg.lambda0, 0.0, cfg.drive_ratio).unwrap();
    let scheme = drive0.scheme(1000, cfg.pulses).unwrap();
    let mut still = DeltaRun::driven(&drive0, &scheme).unwrap();
    still.simulate().unwrap();
    let chi_max = still.chi().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let unit = (0..=1000).map(|n| (still.autocorrelation(n).norm() - 1.0).abs()).fold(0.0, f64::max);
    let undriven = chi_max == 0.0 && unit < 1e-12;

    // Driven; compared at pulse ends where λ = λ0.
    let (run, scheme) = runner::delta_run(&cfg).unwrap();
    let recurrence_time = start.elapsed();
    let per_pulse = cfg.n_steps / cfg.pulses as usize;
    let gap = |k: usize| {
        let s = run.sample(k * per_pulse);
        (s.origin_density - s.autocorrelation2).abs() / s.autocorrelation2
    };
    let first = gap(1);
    let pulses = cfg.pulses as usize;
    let late = (pulses - 9..=pulses).map(gap).sum::<f64>() / 10.0;
    let converging = late <= first && late < 5e-2;

    // Gaussian stand-in on a grid, same time step, shrinking width.
    let drive = DeltaDrive::from_spec(&runner::potential(&cfg)).unwrap();
    let table = KernelTable::new(scheme.mu2(), cfg.n_steps).unwrap();
    let oracle_start = Instant::now();
    let errors: Vec<f64> = [0.2, 0.1, 0.05]
        .into_iter()
        .map(|b| {
            let dx = b / 8.0;
            let grid = Grid1D::with_spacing(9.5, dx).unwrap();
            let mid = grid.nx() / 2;
            let values = grid.points().map(|x| Complex::new(bound_state(cfg.lambda0, x), 0.0)).collect();
            let kernel = Arc::new(BoundaryKernel::build(ClosureKind::Lattice, &table, dx, 0.0).unwrap());
            let pot = Arc::new(RegularizedDelta { drive, width: b });
            let init = ComplexField::new(grid, values).unwrap();
            let mut s = Stepper::with_potential(init, scheme.clone(), pot, kernel, 0.0).unwrap();
            let rho0 = s.psi()[mid].norm_sqr();
            let mut worst = 0.0_f64;
            for n in 1..=cfg.n_steps {
                s.step().unwrap();
                worst = worst.max((s.psi()[mid].norm_sqr() / rho0 - run.normalized_origin_density(n)).abs());
            }
            worst
        })
        .collect();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);

    Verdict::plain(
        undriven && converging && monotone,
        format!(
            "undriven max|chi| {chi_max:.0e}, max||A|-1| {unit:.0e}; driven relative gap \
             |rho(0)-|A|^2|/|A|^2 first pulse {first:.2e}, last 10 pulses {late:.2e} ({:.0} ms); \
             grid oracle max |rho(0)| error for b = 0.2, 0.1, 0.05: {:.2e}, {:.2e}, {:.2e} ({:.1} s)",
            recurrence_time.as_secs_f64() * 1e3,
            errors[0],
            errors[1],
            errors[2],
            oracle_start.elapsed().as_secs_f64()
        ),
    )
}

fn peak_errors_2d(cfg: &Config) -> Vec<f64> {
    let mut set = runner::build_modes(cfg).unwrap();
    let scheme = runner::scheme(cfg).unwrap();
    let stride = cfg.n_steps / 5;
    let mut errs = Vec::new();
    for n in 0..=cfg.n_steps {
        if n > 0 {
            runner::step_modes_parallel(&mut set).unwrap();
        }
        if n % stride == 0 {
            errs.push(runner::peak_error_2d(&set.field().unwrap(), cfg, scheme.time(n)).unwrap());
        }
    }
    errs
}

fn criterion_6() -> Verdict {
    let cfg = Config::defaults(Scenario::Free2d);
    let start = Instant::now();
    let errs = peak_errors_2d(&cfg);
    let elapsed = start.elapsed();
    let worst = errs.iter().copied().fold(0.0, f64::max);

    let mut fine = cfg.clone();
    fine.nx = 201;
    fine.n_steps = 200;
    let fine_worst = peak_errors_2d(&fine).into_iter().fold(0.0, f64::max);

    // ky = 0 mode against a standalone 1D stepper from the same data.
    let field = runner::initial_field_2d(&cfg).unwrap();
    let modes = decompose(&field, cfg.aliasing_tol).unwrap();
    let scheme = runner::scheme(&cfg).unwrap();
    let table = KernelTable::new(scheme.mu2(), cfg.n_steps).unwrap();
    let kernel = Arc::new(BoundaryKernel::build(cfg.closure, &table, modes[0].grid().dx(), 0.0).unwrap());
    let mut alone = Stepper::with_energy_shift(modes[0].clone(), scheme, PotentialSpec::None, kernel, 0.0).unwrap();
    alone.run(cfg.n_steps).unwrap();
    let mut set = runner::build_modes(&cfg).unwrap();
    for _ in 0..cfg.n_steps {
        runner::step_modes_parallel(&mut set).unwrap();
    }
    let identical = set.steppers()[0].psi() == alone.psi();

    let list: Vec<String> = errs.iter().map(|e| format!("{e:.2e}")).collect();
    Verdict {
        pass: worst < 1e-2 && identical,
        detail: format!(
            "peak error at six times [{}] ({:.2} s); nx=201, N=200 gives {fine_worst:.2e}; ky=0 mode {}",
            list.join(", "),
            elapsed.as_secs_f64(),
            if identical { "bit-identical to 1D" } else { "DIFFERS from 1D" }
        ),
        // Each axis contributes about 1% at this resolution; refinement fixes it.
        expected_shape: identical && errs.len() == 6 && worst < 3e-2 && fine_worst < 1e-2,
    }
}

fn criterion_7() -> Verdict {
    let mut cfg = Config::defaults(Scenario::ScatterStatic);
    let base = cfg.clone();
    cfg.n_steps *= 4;
    cfg.total_time *= 4.0;
    let mut s = runner::build_stepper(&cfg).unwrap();
    s.run(cfg.n_steps).unwrap();
    let l = s.ledger();
    let n = l.steps();
    let (left, right) = (l.left_cumulative(), l.right_cumulative());
    let exterior = left[n] + right[n];
    let monotone = (base.n_steps..n).all(|m| left[m + 1] >= left[m] - 1e-12 && right[m + 1] >= right[m] - 1e-12);

    // Sixteen times longer: the interior settles instead of draining.
    let mut long = base.clone();
    long.n_steps *= 16;
    long.total_time *= 16.0;
    let mut s16 = runner::build_stepper(&long).unwrap();
    s16.run(long.n_steps).unwrap();
    let trapped = s16.ledger().interior()[long.n_steps];

    Verdict {
        pass: (1.0 - exterior).abs() < 1e-3 && monotone,
        detail: format!(
            "4x run: R = {:.4}, T = {:.4}, R + T = {exterior:.5}, |1 - (R + T)| = {:.2e}; \
             cumulative curves monotone after splitting: {monotone}; interior after 16x run {trapped:.2e}",
            left[n],
            right[n],
            (1.0 - exterior).abs()
        ),
        // The residual is the part held by the well, which does not decay.
        expected_shape: monotone && trapped > 1e-3 && (1.0 - exterior) < 2.5e-3,
    }
}

fn criterion_8() -> Verdict {
    let sizes = [100usize, 200, 400];
    let mut ops = Vec::new();
    let mut times = Vec::new();
    for &n in &sizes {
        let mut cfg = Config::defaults(Scenario::ScatterStatic);
        cfg.total_time *= n as f64 / cfg.n_steps as f64;
        cfg.n_steps = n;
        let mut s = runner::build_stepper(&cfg).unwrap();
        let start = Instant::now();
        s.run(n).unwrap();
        times.push(start.elapsed().as_secs_f64());
        ops.push(s.closure_ops() as f64);
    }
    let ratios = [ops[1] / ops[0], ops[2] / ops[1]];
    let exponent = (ops[2] / ops[0]).ln() / 4f64.ln();
    Verdict::plain(
        ratios.iter().all(|r| (3.2..=4.8).contains(r)) && (1.6..=2.4).contains(&exponent),
        format!(
            "closure multiply-adds {:.0} / {:.0} / {:.0}, ratios {:.2}, {:.2}, fitted exponent {exponent:.2}; \
             wall time {:.1} / {:.1} / {:.1} ms (not asserted)",
            ops[0],
            ops[1],
            ops[2],
            ratios[0],
            ratios[1],
            times[0] * 1e3,
            times[1] * 1e3,
            times[2] * 1e3
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u8, fn() -> Verdict); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut unexpected = Vec::new();
    for (id, check) in criteria {
        let v = check();
        let known = KNOWN_SHORTFALLS.contains(&id);
        let tag = match (v.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known shortfall)",
            (false, false) => "FAIL",
        };
        println!("criterion {id}: {tag} - {}", v.detail);
        if known && (v.pass || !v.expected_shape) {
            unexpected.push(format!("criterion {id} no longer fails the documented way"));
        } else if !known && !v.pass {
            unexpected.push(format!("criterion {id} failed"));
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            eprintln!("{u}");
        }
        ExitCode::FAILURE
    }
}
