//! Band domain `[-a, a] × ℝ`.
//!
//! For a potential that does not depend on `y`, a Fourier transform in `y`
//! splits the problem into independent 1D problems, one per transverse
//! momentum `k_y`, each seeing the constant energy shift `k_y²` inside and
//! outside the box. The transform is a discrete one over a finite `y`
//! window, so the packet must stay well inside the window for the whole run.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{ComplexField, Grid1D, PotentialSpec, TimeScheme};
use crate::kernel::KernelTable;
use crate::tbc1d::{BoundaryKernel, ClosureKind, Stepper};
use crate::Complex;

/// Largest spectral amplitude at the Nyquist edge, relative to the peak,
/// accepted by [`decompose`].
pub const DEFAULT_ALIASING_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct BandGrid {
    x: Grid1D,
    y0: f64,
    ly: f64,
    ny: usize,
    ky: Vec<f64>,
}

impl BandGrid {
    /// `ny` samples of the periodic window `[y0, y0 + ly)`.
    pub fn new(x: Grid1D, y0: f64, ly: f64, ny: usize) -> Result<Self> {
        if !(ly.is_finite() && ly > 0.0 && y0.is_finite()) {
            return Err(Error::InvalidGrid("y window must be finite with positive length"));
        }
        if ny < 2 {
            return Err(Error::InvalidGrid("need at least two transverse samples"));
        }
        let ky = (0..ny)
            .map(|m| {
                let signed = if m <= ny / 2 { m as f64 } else { m as f64 - ny as f64 };
                2.0 * PI * signed / ly
            })
            .collect();
        Ok(Self { x, y0, ly, ny, ky })
    }

    pub fn x_grid(&self) -> &Grid1D {
        &self.x
    }

    pub fn nx(&self) -> usize {
        self.x.nx()
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn y_window(&self) -> (f64, f64) {
        (self.y0, self.y0 + self.ly)
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy()
    }

    /// Mode momenta in FFT order.
    pub fn ky(&self) -> &[f64] {
        &self.ky
    }

    /// Modes with the largest `|k_y|`.
    fn nyquist_modes(&self) -> Vec<usize> {
        let top = self.ky.iter().fold(0.0_f64, |m, k| m.max(libm::fabs(*k)));
        (0..self.ny)
            .filter(|&m| libm::fabs(self.ky[m]) == top)
            .collect()
    }
}

/// Complex field on the band grid, stored with `y` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: BandGrid,
    values: Vec<Complex>,
}

impl Field2D {
    pub fn new(grid: BandGrid, values: Vec<Complex>) -> Result<Self> {
        let expected = grid.nx() * grid.ny();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: BandGrid, f: impl Fn(f64, f64) -> Complex) -> Self {
        let mut values = Vec::with_capacity(grid.nx() * grid.ny());
        for i in 0..grid.nx() {
            let x = grid.x.x(i);
            for j in 0..grid.ny() {
                values.push(f(x, grid.y(j)));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &BandGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex {
        self.values[ix * self.grid.ny + iy]
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

fn twiddles(ny: usize) -> Vec<Complex> {
    (0..ny)
        .map(|l| {
            let a = 2.0 * PI * l as f64 / ny as f64;
            Complex::new(libm::cos(a), libm::sin(a))
        })
        .collect()
}

/// Transverse coefficients `ĉ_m(x_i) = (1/ny) Σ_j Ψ(x_i, y_j) e^{-2πi mj/ny}`,
/// one vector over `x` per mode.
pub fn transverse_spectrum(field: &Field2D) -> Vec<Vec<Complex>> {
    let (nx, ny) = (field.grid.nx(), field.grid.ny());
    let tw = twiddles(ny);
    let mut modes = alloc::vec![alloc::vec![Complex::new(0.0, 0.0); nx]; ny];
    for i in 0..nx {
        let row = &field.values[i * ny..(i + 1) * ny];
        for (m, mode) in modes.iter_mut().enumerate() {
            let mut acc = Complex::new(0.0, 0.0);
            for (j, v) in row.iter().enumerate() {
                acc += v * tw[(m * j) % ny].conj();
            }
            mode[i] = acc / ny as f64;
        }
    }
    modes
}

/// Peak spectral amplitude at the Nyquist edge relative to the overall peak.
pub fn aliasing_ratio(grid: &BandGrid, spectrum: &[Vec<Complex>]) -> f64 {
    let peak = spectrum
        .iter()
        .flat_map(|m| m.iter())
        .fold(0.0_f64, |a, v| a.max(v.norm()));
    if peak == 0.0 {
        return 0.0;
    }
    let edge = grid
        .nyquist_modes()
        .into_iter()
        .flat_map(|m| spectrum[m].iter())
        .fold(0.0_f64, |a, v| a.max(v.norm()));
    edge / peak
}

/// Splits `field` into transverse modes, refusing spectra that are not
/// decayed below `tolerance` at the Nyquist edge.
pub fn decompose(field: &Field2D, tolerance: f64) -> Result<Vec<ComplexField>> {
    let spectrum = transverse_spectrum(field);
    let ratio = aliasing_ratio(&field.grid, &spectrum);
    if ratio > tolerance {
        return Err(Error::Aliasing { ratio });
    }
    spectrum
        .into_iter()
        .map(|v| ComplexField::new(field.grid.x.clone(), v))
        .collect()
}

/// Inverse of [`transverse_spectrum`]; `modes[m][i]` is `ĉ_m(x_i)`.
pub fn recombine<M: AsRef<[Complex]>>(grid: &BandGrid, modes: &[M]) -> Result<Field2D> {
    let (nx, ny) = (grid.nx(), grid.ny());
    if modes.len() != ny {
        return Err(Error::LengthMismatch {
            expected: ny,
            found: modes.len(),
        });
    }
    if let Some(bad) = modes.iter().find(|m| m.as_ref().len() != nx) {
        return Err(Error::LengthMismatch {
            expected: nx,
            found: bad.as_ref().len(),
        });
    }
    let tw = twiddles(ny);
    let mut values = alloc::vec![Complex::new(0.0, 0.0); nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            let mut acc = Complex::new(0.0, 0.0);
            for (m, mode) in modes.iter().enumerate() {
                acc += mode.as_ref()[i] * tw[(m * j) % ny];
            }
            values[i * ny + j] = acc;
        }
    }
    Field2D::new(grid.clone(), values)
}

/// One 1D stepper per transverse mode.
#[derive(Debug, Clone)]
pub struct ModeSet {
    grid: BandGrid,
    steppers: Vec<Stepper>,
}

impl ModeSet {
    /// Decomposes `initial` and sets up every mode with its shifted kernel.
    /// Modes sharing `k_y²` share one kernel.
    pub fn new(
        initial: &Field2D,
        scheme: &TimeScheme,
        potential: PotentialSpec,
        closure: ClosureKind,
        aliasing_tolerance: f64,
    ) -> Result<Self> {
        let grid = initial.grid.clone();
        let modes = decompose(initial, aliasing_tolerance)?;
        let dx = grid.x.dx();
        let mut shifts: Vec<f64> = grid.ky.iter().map(|k| k * k).collect();
        let mut table = KernelTable::new(scheme.mu2(), scheme.n_steps())?;
        if closure == ClosureKind::Continuum {
            let points: Vec<(f64, f64)> = shifts.iter().map(|&s| (0.0, s)).collect();
            table = table.with_points(&points);
        }
        let mut kernels: BTreeMap<u64, Arc<BoundaryKernel>> = BTreeMap::new();
        let mut steppers = Vec::with_capacity(grid.ny());
        for (mode, shift) in modes.into_iter().zip(shifts.drain(..)) {
            let kernel = match kernels.get(&shift.to_bits()) {
                Some(k) => k.clone(),
                None => {
                    let k = Arc::new(BoundaryKernel::build(closure, &table, dx, shift)?);
                    kernels.insert(shift.to_bits(), k.clone());
                    k
                }
            };
            steppers.push(Stepper::with_energy_shift(
                mode,
                scheme.clone(),
                potential,
                kernel,
                shift,
            )?);
        }
        Ok(Self { grid, steppers })
    }

    pub fn grid(&self) -> &BandGrid {
        &self.grid
    }

    pub fn steppers(&self) -> &[Stepper] {
        &self.steppers
    }

    /// Direct access for callers that advance the modes in parallel.
    pub fn steppers_mut(&mut self) -> &mut [Stepper] {
        &mut self.steppers
    }

    /// Completed steps of the slowest mode.
    pub fn n(&self) -> usize {
        self.steppers.iter().map(Stepper::n).min().unwrap_or(0)
    }

    /// Advances every mode by one step.
    pub fn step_modes(&mut self) -> Result<()> {
        for s in &mut self.steppers {
            s.step()?;
        }
        Ok(())
    }

    pub fn field(&self) -> Result<Field2D> {
        let modes: Vec<&[Complex]> = self.steppers.iter().map(Stepper::psi).collect();
        recombine(&self.grid, &modes)
    }

    /// `∫∫|Ψ|²` over the box and the window (trapezoid in `x`, periodic in `y`).
    pub fn interior_norm(&self) -> f64 {
        let n = self.n();
        self.grid.ly * self.steppers.iter().map(|s| s.ledger().interior()[n]).sum::<f64>()
    }

    /// Interior norm plus the probability that left through `x = ±a`.
    pub fn ledger_total(&self) -> f64 {
        let n = self.n();
        self.grid.ly * self.steppers.iter().map(|s| s.ledger().total(n)).sum::<f64>()
    }
}
