//! Plain-text output files, whitespace delimited, `#` header lines.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use tbc_core::band2d::Field2D;
use tbc_core::delta::DeltaSample;
use tbc_core::field::{Grid1D, TimeScheme};
use tbc_core::kernel::KernelTable;
use tbc_core::observables::FluxLedger;
use tbc_core::Complex;

fn create(dir: &Path, name: &str) -> io::Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

/// `snapshot_<step>.dat`: `x  Re Ψ  Im Ψ  |Ψ|²`.
pub fn write_snapshot(dir: &Path, step: usize, grid: &Grid1D, psi: &[Complex]) -> io::Result<PathBuf> {
    let (path, mut w) = create(dir, &format!("snapshot_{step}.dat"))?;
    writeln!(w, "# x re im density")?;
    for (x, v) in grid.points().zip(psi) {
        writeln!(w, "{x:.10e} {:.10e} {:.10e} {:.10e}", v.re, v.im, v.norm_sqr())?;
    }
    w.flush()?;
    Ok(path)
}

/// `ledger.dat`: `step  t̃  interior  left  right  total`.
pub fn write_ledger(dir: &Path, scheme: &TimeScheme, ledger: &FluxLedger) -> io::Result<PathBuf> {
    let (path, mut w) = create(dir, "ledger.dat")?;
    writeln!(w, "# step t_scaled interior left right total")?;
    for n in 0..=ledger.steps() {
        writeln!(
            w,
            "{n} {:.10e} {:.15e} {:.15e} {:.15e} {:.15e}",
            scheme.time(n),
            ledger.interior()[n],
            ledger.left_cumulative()[n],
            ledger.right_cumulative()[n],
            ledger.total(n)
        )?;
    }
    w.flush()?;
    Ok(path)
}

/// `density_<step>.dat`: a header line `nx ny x_min x_max y_min y_max`
/// followed by `nx` rows of `ny` densities.
pub fn write_density(dir: &Path, step: usize, field: &Field2D) -> io::Result<PathBuf> {
    let (path, mut w) = create(dir, &format!("density_{step}.dat"))?;
    let g = field.grid();
    let a = g.x_grid().half_width();
    let (y0, _) = g.y_window();
    let y_last = g.y(g.ny() - 1);
    writeln!(w, "# nx ny x_min x_max y_min y_max, then rows over x of values over y")?;
    writeln!(w, "{} {} {:.10e} {:.10e} {:.10e} {:.10e}", g.nx(), g.ny(), -a, a, y0, y_last)?;
    let rho = field.density();
    for row in rho.chunks(g.ny()) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.10e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;
    Ok(path)
}

/// `delta_series.dat`: `step  t  |χ(0)|²  |Ψ(0)|²/|Φ₀(0)|²  |⟨Φ|Ψ⟩|²`.
pub fn write_delta_series(dir: &Path, scheme: &TimeScheme, samples: &[DeltaSample]) -> io::Result<PathBuf> {
    let (path, mut w) = create(dir, "delta_series.dat")?;
    writeln!(w, "# step t chi2 origin_density autocorrelation2")?;
    for s in samples {
        writeln!(
            w,
            "{} {:.10e} {:.15e} {:.15e} {:.15e}",
            s.step,
            scheme.time(s.step),
            s.chi2,
            s.origin_density,
            s.autocorrelation2
        )?;
    }
    w.flush()?;
    Ok(path)
}

/// Manifest: resolved config followed by `check.<name> = value tol PASS|FAIL`.
pub fn write_manifest(dir: &Path, config_text: &str, checks: &[crate::runner::Check]) -> io::Result<PathBuf> {
    let (path, mut w) = create(dir, "manifest.txt")?;
    writeln!(w, "# resolved parameters")?;
    w.write_all(config_text.as_bytes())?;
    writeln!(w, "# built-in checks: value tolerance verdict")?;
    for c in checks {
        writeln!(w, "check.{} = {:.6e} {:.1e} {}", c.name, c.value, c.tolerance, c.verdict())?;
    }
    w.flush()?;
    Ok(path)
}

/// `C_q` and the kernel sums at the origin, DFT next to closed form.
pub fn write_kernel_dump(mut w: impl Write, table: &KernelTable) -> io::Result<()> {
    writeln!(w, "# q C_q")?;
    for (q, c) in table.cq().iter().enumerate() {
        writeln!(w, "{q} {c:.17e}")?;
    }
    writeln!(w, "# p re_dft im_dft re_exact im_exact")?;
    let sums = table.sums(0.0, 0.0).map_err(io::Error::other)?;
    for (p, v) in sums.values.iter().enumerate().take(table.n_steps() + 1) {
        let exact = table.kernel_sum_origin(p);
        writeln!(w, "{p} {:.15e} {:.15e} {:.15e} {:.15e}", v.re, v.im, exact.re, exact.im)?;
    }
    Ok(())
}
