//! Discrete-time free propagator and the boundary convolution kernels built
//! from it.
//!
//! Everything here is a coefficient of a generating function in the
//! backward-shift variable `w` (`Ψ_{n-1} ↔ w Ψ̂`). The free Crank-Nicolson
//! step maps a plane wave `e^{ikx}` to `(μ²-k²)⁻¹(μ²+k²)` times itself, so
//! the effective energy seen by the exterior is
//!
//! ```text
//! κ(w) = μ² (1 - w) / (1 + w)
//! ```
//!
//! and the sum of two successive propagators has generating function
//! `2μ²/(1+w) · G₀⁺(κ(w) - k_y², X)`. At `X = 0` and `k_y = 0` this collapses
//! to `-iμ (1 - w²)^{-1/2}`, whose coefficients are `-iμ C_q` at even
//! powers and zero at odd ones.
//!
//! Coefficients without a closed form are extracted numerically by an
//! inverse z-transform on the circle `|w| = e^{-η}`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::{Complex, I};

/// Principal square root of `μ²`; for `μ² = i|μ²|` it lies in the first
/// quadrant. Every module derives `μ` through this function.
pub fn principal_mu(mu2: Complex) -> Complex {
    mu2.sqrt()
}

/// `C_q = (2q)! / (2^q q!)²`, by the recurrence `C_q = C_{q-1} (2q-1)/(2q)`.
pub fn cq_coefficient(q: usize) -> f64 {
    (1..=q).fold(1.0, |c, j| c * (2 * j - 1) as f64 / (2 * j) as f64)
}

/// `C_0 ..= C_{q_max}`.
pub fn cq_table(q_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(q_max + 1);
    let mut c = 1.0;
    out.push(c);
    for j in 1..=q_max {
        c *= (2 * j - 1) as f64 / (2 * j) as f64;
        out.push(c);
    }
    out
}

/// Closed form of `K_p(0) + K_{p+1}(0)` in one dimension.
pub fn kernel_sum_origin(p: usize, mu: Complex) -> Complex {
    if p % 2 == 1 {
        Complex::new(0.0, 0.0)
    } else {
        -I * mu * cq_coefficient(p / 2)
    }
}

/// Outgoing wavenumber `√E` with non-negative imaginary part.
pub fn outgoing_wavenumber(energy: Complex) -> Complex {
    let k = energy.sqrt();
    if k.im < 0.0 {
        -k
    } else {
        k
    }
}

/// Free 1D Green function `e^{i√E|x|} / (2i√E)`.
pub fn free_green_1d(energy: Complex, x: f64) -> Complex {
    let k = outgoing_wavenumber(energy);
    (I * k * libm::fabs(x)).exp() / (2.0 * I * k)
}

/// `d/dd` of [`free_green_1d`] at distance `d ≥ 0`: `e^{i√E d} / 2`.
fn free_green_1d_slope(energy: Complex, d: f64) -> Complex {
    let k = outgoing_wavenumber(energy);
    (I * k * d).exp() * 0.5
}

/// Effective exterior energy `κ(w) = μ²(1-w)/(1+w)`.
pub fn effective_energy(mu2: Complex, w: Complex) -> Complex {
    mu2 * (1.0 - w) / (1.0 + w)
}

/// Size and damping of the inverse z-transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DftParams {
    pub size: usize,
    pub eta: f64,
}

/// `N_dft · η` for the default damping; `e^{-30} ≈ 9.4e-14`.
pub const DEFAULT_DAMPING_EXPONENT: f64 = 30.0;

impl DftParams {
    /// Smallest power of two `≥ 4·n_steps` with `η = 30 / N_dft`.
    pub fn for_steps(n_steps: usize) -> Self {
        let size = (4 * n_steps.max(1)).next_power_of_two().max(16);
        Self {
            size,
            eta: DEFAULT_DAMPING_EXPONENT / size as f64,
        }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }
}

/// Coefficients `c_0 ..= c_{n_coeffs-1}` of `f(w) = Σ c_p w^p`, from
///
/// ```text
/// c_p = (1/N) Σ_l f(e^{iφ_l}) e^{-ipφ_l},   φ_l = 2πl/N + iη.
/// ```
///
/// Aliased terms enter with weight `e^{-Nη}`. The sum is evaluated
/// directly: `N·n_coeffs` stays in the millions for every use here.
pub fn inverse_z_transform<F>(f: F, n_coeffs: usize, params: DftParams) -> Vec<Complex>
where
    F: Fn(Complex) -> Complex,
{
    let n = params.size;
    assert!(n_coeffs <= n, "requested more coefficients than DFT points");
    let roots: Vec<Complex> = (0..n)
        .map(|l| {
            let angle = 2.0 * PI * l as f64 / n as f64;
            Complex::new(libm::cos(angle), libm::sin(angle))
        })
        .collect();
    let radius = libm::exp(-params.eta);
    let samples: Vec<Complex> = roots.iter().map(|r| f(r * radius)).collect();
    (0..n_coeffs)
        .map(|p| {
            let mut acc = Complex::new(0.0, 0.0);
            for (l, s) in samples.iter().enumerate() {
                // e^{-2πi lp/N}
                let idx = (n - (l * p) % n) % n;
                acc += s * roots[idx];
            }
            acc * (libm::exp(p as f64 * params.eta) / n as f64)
        })
        .collect()
}

/// Key of a cached kernel-sum series: distance `|x|` and transverse `k_y²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct SumKey {
    x_bin: i64,
    ky2_bin: i64,
}

/// Width of the cache bins in `|x|` and `k_y²`.
const KEY_QUANTUM: f64 = 1e-9;

impl SumKey {
    fn new(x: f64, ky2: f64) -> Self {
        let bin = |v: f64| libm::round(v / KEY_QUANTUM) as i64;
        Self {
            x_bin: bin(libm::fabs(x)),
            ky2_bin: bin(ky2),
        }
    }
}

/// `K_p(x) + K_{p+1}(x)` and its derivative with respect to `|x|`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSums {
    pub values: Vec<Complex>,
    pub slopes: Vec<Complex>,
}

/// Tolerance of the mandatory DFT/closed-form check at the origin.
pub const ORIGIN_CHECK_TOLERANCE: f64 = 1e-9;

/// Precomputed propagator-sum coefficients for one `μ²`.
///
/// Everything is computed on construction, so a finished table is read-only
/// and can be shared between simulations and threads.
#[derive(Debug, Clone)]
pub struct KernelTable {
    mu2: Complex,
    mu: Complex,
    n_steps: usize,
    cq: Vec<f64>,
    dft: DftParams,
    sums: BTreeMap<SumKey, KernelSums>,
}

impl KernelTable {
    /// Table for `n_steps` steps with the default DFT parameters.
    pub fn new(mu2: Complex, n_steps: usize) -> Result<Self> {
        Self::with_params(mu2, n_steps, DftParams::for_steps(n_steps))
    }

    pub fn with_params(mu2: Complex, n_steps: usize, dft: DftParams) -> Result<Self> {
        if n_steps + 1 > dft.size {
            return Err(Error::InvalidParameter {
                name: "dft_size",
                reason: "must exceed the number of steps",
            });
        }
        if dft.eta.is_nan() || dft.eta <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: "damping must be positive",
            });
        }
        let mu = principal_mu(mu2);
        let mut table = Self {
            mu2,
            mu,
            n_steps,
            cq: cq_table(n_steps / 2 + 1),
            dft,
            sums: BTreeMap::new(),
        };
        table.insert(0.0, 0.0);
        table.check_origin()?;
        Ok(table)
    }

    /// Adds kernel sums at the given `(x, k_y²)` pairs.
    pub fn with_points(mut self, points: &[(f64, f64)]) -> Self {
        for &(x, ky2) in points {
            self.insert(x, ky2);
        }
        self
    }

    fn insert(&mut self, x: f64, ky2: f64) {
        let key = SumKey::new(x, ky2);
        if self.sums.contains_key(&key) {
            return;
        }
        let sums = compute_kernel_sums(self.mu2, x, ky2, self.n_steps + 1, self.dft);
        self.sums.insert(key, sums);
    }

    fn check_origin(&self) -> Result<()> {
        let sums = &self.sums[&SumKey::new(0.0, 0.0)];
        let scale = self.mu.norm();
        for (p, value) in sums.values.iter().enumerate().take(self.n_steps.max(1)) {
            let exact = self.kernel_sum_origin(p);
            let rel_err = (value - exact).norm() / exact.norm().max(scale);
            if rel_err > ORIGIN_CHECK_TOLERANCE {
                log::error!("kernel sum p={p}: dft {value} vs closed form {exact}");
                return Err(Error::KernelDivergence { p, rel_err });
            }
        }
        Ok(())
    }

    pub fn mu2(&self) -> Complex {
        self.mu2
    }

    pub fn mu(&self) -> Complex {
        self.mu
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dft(&self) -> DftParams {
        self.dft
    }

    pub fn cq(&self) -> &[f64] {
        &self.cq
    }

    pub fn kernel_sum_origin(&self, p: usize) -> Complex {
        if p % 2 == 1 {
            Complex::new(0.0, 0.0)
        } else {
            -I * self.mu * self.cq[p / 2]
        }
    }

    /// Cached series of `K_p(x) + K_{p+1}(x)` with `k² → k² + k_y²`.
    pub fn sums(&self, x: f64, ky2: f64) -> Result<&KernelSums> {
        self.sums
            .get(&SumKey::new(x, ky2))
            .ok_or(Error::KernelNotCached { x, ky2 })
    }

    pub fn kernel_sum_dft(&self, p: usize, x: f64, ky2: f64) -> Result<Complex> {
        let sums = self.sums(x, ky2)?;
        sums.values
            .get(p)
            .copied()
            .ok_or(Error::KernelExhausted {
                available: sums.values.len() - 1,
                requested: p,
            })
    }

    /// Cached `(x, k_y²)` pairs, in key order.
    pub fn cached_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.sums
            .keys()
            .map(|k| (k.x_bin as f64 * KEY_QUANTUM, k.ky2_bin as f64 * KEY_QUANTUM))
    }
}

/// Direct evaluation of the kernel-sum series, bypassing any cache.
pub fn compute_kernel_sums(
    mu2: Complex,
    x: f64,
    ky2: f64,
    n_coeffs: usize,
    dft: DftParams,
) -> KernelSums {
    let d = libm::fabs(x);
    let values = inverse_z_transform(
        |w| {
            let energy = effective_energy(mu2, w) - ky2;
            mu2 * 2.0 / (1.0 + w) * free_green_1d(energy, d)
        },
        n_coeffs,
        dft,
    );
    let slopes = inverse_z_transform(
        |w| {
            let energy = effective_energy(mu2, w) - ky2;
            mu2 * 2.0 / (1.0 + w) * free_green_1d_slope(energy, d)
        },
        n_coeffs,
        dft,
    );
    KernelSums { values, slopes }
}

/// Weights `B_p` of the continuum boundary relation
/// `Ψ_n(b) = Σ_p B_p ∂ₙ[Ψ_{n-p} + Ψ_{n-p-1}](b)`, i.e.
/// `B_p = (K_p(0) + K_{p+1}(0)) / μ²`.
///
/// For `k_y = 0` this is the closed form `B_{2q} = -(i/μ) C_q`, `B_{2q+1} = 0`.
pub fn continuum_boundary_weights(table: &KernelTable, ky2: f64) -> Result<Vec<Complex>> {
    let n = table.n_steps() + 1;
    if ky2 == 0.0 {
        return Ok((0..n).map(|p| table.kernel_sum_origin(p) / table.mu2()).collect());
    }
    let sums = table.sums(0.0, ky2)?;
    Ok(sums.values.iter().map(|v| v / table.mu2()).collect())
}

/// Decaying root `r(w)` of `r + 1/r = 2 - dx² (κ(w) - k_y²)`.
fn lattice_decay_root(mu2: Complex, dx: f64, ky2: f64, w: Complex) -> Complex {
    let b = 2.0 - (effective_energy(mu2, w) - ky2) * (dx * dx);
    let s = (b * b - 4.0).sqrt();
    let (plus, minus) = ((b + s) * 0.5, (b - s) * 0.5);
    // The product of the two roots is 1; invert the larger one for accuracy.
    if plus.norm() >= minus.norm() {
        1.0 / plus
    } else {
        1.0 / minus
    }
}

/// Exterior ghost kernel of the three-point lattice: with zero initial data
/// outside the box, the first exterior node obeys
/// `Ψ_n(b ± dx) = Σ_{p=0}^{n} ρ_p Ψ_{n-p}(b)`.
///
/// This is the exact closure of the finite-difference scheme itself (the
/// continuum weights close the semi-discrete equation instead).
pub fn lattice_ghost_kernel(
    mu2: Complex,
    dx: f64,
    ky2: f64,
    n_coeffs: usize,
    dft: DftParams,
) -> Vec<Complex> {
    inverse_z_transform(|w| lattice_decay_root(mu2, dx, ky2, w), n_coeffs, dft)
}
