//! Driven delta potential `V = -λ(t) δ(x)` in closed form.
//!
//! The state starts in the bound state `Φ₀ = √(λ₀/2) e^{-λ₀|x|/2}` of the
//! unperturbed strength `λ₀`, energy `-ω₀ = -λ₀²/4`. Under Crank-Nicolson
//! the unperturbed state only picks up the phase `e^{-iθ} = (μ²-ω₀)/(μ²+ω₀)`
//! per step, so `Ψ_n = e^{-inθ} Φ₀ + χ_n` and `χ` is driven by the source
//! `(λ_n - λ₀) δ`. With `S_m = f_m + f_{m-1}` the jump of `∂ₓS χ` at the
//! origin is
//!
//! ```text
//! J_m = -λ_m Sχ_m(0) - (λ_m - λ₀) SΦ_m(0)
//! ```
//!
//! and `χ_n(x) = (1/2μ²) Σ_{p=0}^{n-1} (K_p + K_{p+1})(|x|) J_{n-p}`. At the
//! origin the kernel sums are `-iμ C_q` at even `p`, which gives the
//! explicit recurrence
//!
//! ```text
//! (-2iμ - λ_n) χ_n = λ_n χ_{n-1} + (λ_n - λ₀) SΦ_n
//!                  + Σ_{q=1}^{⌊(n-1)/2⌋} C_q [λ_{n-2q} Sχ_{n-2q} + (λ_{n-2q} - λ₀) SΦ_{n-2q}].
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{Potential, PotentialSpec, TimeScheme};
use crate::kernel::{cq_table, principal_mu, KernelTable};
use crate::observables::{overlap_exterior_step, BoundaryPair};
use crate::Complex;

/// `e^{-iθ} = (μ² - ω₀)/(μ² + ω₀)`, the per-step phase of the bound state.
pub fn bound_phase(mu2: Complex, omega0: f64) -> Complex {
    (mu2 - omega0) / (mu2 + omega0)
}

/// Normalised bound state `√(λ₀/2) e^{-λ₀|x|/2}`.
pub fn bound_state(lambda0: f64, x: f64) -> f64 {
    libm::sqrt(0.5 * lambda0) * libm::exp(-0.5 * lambda0 * libm::fabs(x))
}

/// `λ(t) = λ₀ + (A/2)(1 - cos(r ω₀ t))` with `ω₀ = λ₀²/4`, `t` in the
/// physical units of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaDrive {
    pub lambda0: f64,
    pub amplitude: f64,
    pub drive_ratio: f64,
}

impl DeltaDrive {
    pub fn new(lambda0: f64, amplitude: f64, drive_ratio: f64) -> Result<Self> {
        if !(lambda0.is_finite() && lambda0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda0",
                reason: "must be positive",
            });
        }
        if !amplitude.is_finite() || !(drive_ratio.is_finite() && drive_ratio >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                reason: "drive parameters must be finite, ratio non-negative",
            });
        }
        Ok(Self {
            lambda0,
            amplitude,
            drive_ratio,
        })
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        match *spec {
            PotentialSpec::DrivenDelta {
                strength,
                amplitude,
                drive_ratio,
            } => Self::new(strength, amplitude, drive_ratio),
            _ => Err(Error::InvalidParameter {
                name: "potential",
                reason: "delta model needs a DrivenDelta potential",
            }),
        }
    }

    pub fn omega0(&self) -> f64 {
        0.25 * self.lambda0 * self.lambda0
    }

    /// One drive period `2π/(r ω₀)`; infinite for an undriven setup.
    pub fn period(&self) -> f64 {
        2.0 * PI / (self.drive_ratio * self.omega0())
    }

    pub fn lambda_at(&self, t: f64) -> f64 {
        let phase = self.drive_ratio * self.omega0() * t;
        self.lambda0 + 0.5 * self.amplitude * (1.0 - libm::cos(phase))
    }

    /// Scheme with `n_steps` steps covering `pulses` drive periods.
    pub fn scheme(&self, n_steps: usize, pulses: f64) -> Result<TimeScheme> {
        let total = pulses * self.period();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidParameter {
                name: "pulses",
                reason: "needs a positive count and a nonzero drive ratio",
            });
        }
        TimeScheme::physical(n_steps, total / n_steps as f64)
    }

    /// `λ_n` for `n = 1..=N`, sampled at mid-step; entry 0 holds `λ₀`.
    pub fn strengths(&self, scheme: &TimeScheme) -> Vec<f64> {
        let mut out = Vec::with_capacity(scheme.n_steps() + 1);
        out.push(self.lambda0);
        out.extend((1..=scheme.n_steps()).map(|n| self.lambda_at(scheme.mid_time(n))));
        out
    }
}

/// Gaussian stand-in `-λ(t) e^{-x²/b²} / (b√π)` for the delta, for grid runs.
/// Time is read as physical time, so pair it with [`TimeScheme::physical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedDelta {
    pub drive: DeltaDrive,
    pub width: f64,
}

impl Potential for RegularizedDelta {
    fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let u = x / self.width;
        let shape = libm::exp(-u * u) / (self.width * libm::sqrt(PI));
        Ok(-self.drive.lambda_at(t) * shape)
    }
}

/// One row of the exported time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSample {
    pub step: usize,
    pub chi2: f64,
    pub origin_density: f64,
    pub autocorrelation2: f64,
}

/// State of the recurrence after `n` steps.
#[derive(Debug, Clone)]
pub struct DeltaRun {
    lambda0: f64,
    omega0: f64,
    mu2: Complex,
    mu: Complex,
    phase: Complex,
    phi0_at_origin: f64,
    lambdas: Vec<f64>,
    cq: Vec<f64>,
    chi: Vec<Complex>,
    jumps: Vec<Complex>,
    overlap: Vec<Complex>,
}

impl DeltaRun {
    /// `lambdas[n]` is the strength between steps `n-1` and `n`; `lambdas[0]`
    /// is ignored and `λ₀` is the unperturbed strength.
    pub fn new(lambda0: f64, mu2: Complex, mut lambdas: Vec<f64>) -> Result<Self> {
        if !(lambda0.is_finite() && lambda0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda0",
                reason: "must be positive",
            });
        }
        if lambdas.is_empty() {
            lambdas.push(lambda0);
        }
        lambdas[0] = lambda0;
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: "strengths must be finite",
            });
        }
        let omega0 = 0.25 * lambda0 * lambda0;
        let n_max = lambdas.len() - 1;
        let zero = Complex::new(0.0, 0.0);
        Ok(Self {
            lambda0,
            omega0,
            mu2,
            mu: principal_mu(mu2),
            phase: bound_phase(mu2, omega0),
            phi0_at_origin: bound_state(lambda0, 0.0),
            cq: cq_table(n_max / 2 + 1),
            lambdas,
            chi: alloc::vec![zero],
            jumps: alloc::vec![zero],
            overlap: alloc::vec![Complex::new(1.0, 0.0)],
        })
    }

    pub fn driven(drive: &DeltaDrive, scheme: &TimeScheme) -> Result<Self> {
        Self::new(drive.lambda0, scheme.mu2(), drive.strengths(scheme))
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `e^{-iθ}`.
    pub fn phase(&self) -> Complex {
        self.phase
    }

    /// `θ`, the discrete Bohr phase per step (`≈ -ω₀ dt`).
    pub fn theta(&self) -> f64 {
        -self.phase.arg()
    }

    pub fn mu2(&self) -> Complex {
        self.mu2
    }

    /// Completed steps.
    pub fn n(&self) -> usize {
        self.chi.len() - 1
    }

    pub fn max_steps(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambdas[n]
    }

    /// `χ_0 ..= χ_n` at the origin.
    pub fn chi(&self) -> &[Complex] {
        &self.chi
    }

    /// `Φ_n(0) = e^{-inθ} Φ₀(0)`.
    pub fn phi_origin(&self, n: usize) -> Complex {
        self.phase.powu(n as u32) * self.phi0_at_origin
    }

    fn phi_pair_origin(&self, m: usize) -> Complex {
        self.phi_origin(m) + self.phi_origin(m - 1)
    }

    pub fn psi_origin(&self, n: usize) -> Complex {
        self.phi_origin(n) + self.chi[n]
    }

    /// `χ_n` for the next `n`; also records the jump and the overlap.
    pub fn recurrence_step(&mut self) -> Result<Complex> {
        let n = self.n() + 1;
        if n > self.max_steps() {
            return Err(Error::KernelExhausted {
                available: self.max_steps(),
                requested: n,
            });
        }
        let lam = self.lambdas[n];
        let l0 = self.lambda0;
        let mut rhs = self.chi[n - 1] * lam + self.phi_pair_origin(n) * (lam - l0);
        for q in 1..=(n - 1) / 2 {
            let m = n - 2 * q;
            let lm = self.lambdas[m];
            let s_chi = self.chi[m] + self.chi[m - 1];
            rhs += (s_chi * lm + self.phi_pair_origin(m) * (lm - l0)) * self.cq[q];
        }
        let chi = rhs / (-2.0 * crate::I * self.mu - lam);
        self.chi.push(chi);

        let s_chi = chi + self.chi[n - 1];
        let s_phi = self.phi_pair_origin(n);
        self.jumps.push(-s_chi * lam - s_phi * (lam - l0));

        // Overlap change through the two faces of the origin: the outward
        // derivative on either side is half the jump.
        let s_psi = s_phi + s_chi;
        let phi = BoundaryPair {
            sum: s_phi,
            normal_derivative: -s_phi * (0.5 * l0),
        };
        let psi = BoundaryPair {
            sum: s_psi,
            normal_derivative: -s_psi * (0.5 * lam),
        };
        let inc = overlap_exterior_step(phi, psi, self.mu2) * 2.0;
        let last = *self.overlap.last().expect("overlap starts at 1");
        self.overlap.push(last + inc);
        Ok(chi)
    }

    /// Runs the recurrence to the end of the strength series.
    pub fn simulate(&mut self) -> Result<()> {
        while self.n() < self.max_steps() {
            self.recurrence_step()?;
        }
        Ok(())
    }

    /// `⟨Φ_n|Ψ_n⟩` with `Φ_n` the unperturbed evolution.
    pub fn autocorrelation(&self, n: usize) -> Complex {
        self.overlap[n]
    }

    /// `|Ψ_n(0)|² / |Φ₀(0)|²`.
    pub fn normalized_origin_density(&self, n: usize) -> f64 {
        self.psi_origin(n).norm_sqr() / (self.phi0_at_origin * self.phi0_at_origin)
    }

    /// `Ψ_n(x)` away from the origin. The table must hold sums at `(|x|, 0)`.
    pub fn offorigin(&self, x: f64, n: usize, table: &KernelTable) -> Result<Complex> {
        if n > self.n() {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "step not yet computed",
            });
        }
        let sums = table.sums(libm::fabs(x), 0.0)?;
        if n > sums.values.len() {
            return Err(Error::KernelExhausted {
                available: sums.values.len(),
                requested: n,
            });
        }
        let mut acc = Complex::new(0.0, 0.0);
        for p in 0..n {
            acc += sums.values[p] * self.jumps[n - p];
        }
        let bound = self.phase.powu(n as u32) * bound_state(self.lambda0, x);
        Ok(bound + acc / (self.mu2 * 2.0))
    }

    pub fn sample(&self, n: usize) -> DeltaSample {
        DeltaSample {
            step: n,
            chi2: self.chi[n].norm_sqr(),
            origin_density: self.normalized_origin_density(n),
            autocorrelation2: self.autocorrelation(n).norm_sqr(),
        }
    }

    pub fn time_series(&self) -> Vec<DeltaSample> {
        (0..=self.n()).map(|n| self.sample(n)).collect()
    }
}
