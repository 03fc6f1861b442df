//! Grids, fields, time discretisation and potentials in scaled units.
//!
//! Lengths are measured so that the integration domain is `[-a, a]` (usually
//! `a = 1`). Times come in two flavours: the physical time `t` of the
//! equation `i∂ₜΨ = (-∂² + V)Ψ`, and the dimensionless time `t̃ = 2t/σ₀²`
//! attached to a reference packet width `σ₀`. Scenario parameters (total
//! duration, packet velocity, drive frequency) are quoted in `t̃`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::{Complex, I};

/// Uniform grid on `[-a, a]` with `nx` nodes, both endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    half_width: f64,
    nx: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(half_width: f64, nx: usize) -> Result<Self> {
        if nx < 3 {
            return Err(Error::InvalidGrid("need at least 3 nodes"));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid("half-width must be positive and finite"));
        }
        Ok(Self {
            half_width,
            nx,
            dx: 2.0 * half_width / (nx - 1) as f64,
        })
    }

    /// Grid on `[-half_width, half_width]` whose spacing equals `dx`.
    ///
    /// `2 * half_width / dx` must be (numerically) an integer; this is how the
    /// wide-domain reference runs reuse the spacing of a smaller grid.
    pub fn with_spacing(half_width: f64, dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid("spacing must be positive"));
        }
        let cells = 2.0 * half_width / dx;
        let rounded = libm::round(cells);
        if libm::fabs(cells - rounded) > 1e-6 * rounded.max(1.0) {
            return Err(Error::InvalidGrid("domain width is not a multiple of the spacing"));
        }
        let grid = Self::new(half_width, rounded as usize + 1)?;
        Ok(grid)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Node coordinate. Computed from a symmetric integer offset so that
    /// `x(i) == -x(nx - 1 - i)` holds bit for bit.
    pub fn x(&self, i: usize) -> f64 {
        let offset = 2 * i as i64 - (self.nx as i64 - 1);
        offset as f64 * (self.half_width / (self.nx - 1) as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(|i| self.x(i))
    }
}

/// Wavefunction samples on a [`Grid1D`] at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex>) -> Result<Self> {
        if values.len() != grid.nx() {
            return Err(Error::LengthMismatch {
                expected: grid.nx(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "field entries must be finite",
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        let values = alloc::vec![Complex::new(0.0, 0.0); grid.nx()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex> {
        self.values
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Largest `|Ψ(±a)|` relative to `max |Ψ|`; zero for the zero field.
    pub fn boundary_leak(&self) -> f64 {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self.values[0].norm().max(self.values[self.values.len() - 1].norm());
        edge / peak
    }
}

/// Crank-Nicolson time discretisation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScheme {
    n_steps: usize,
    total_time: f64,
    time_unit: f64,
    dt: f64,
    mu2: Complex,
}

impl TimeScheme {
    /// `n_steps` steps spanning `total_time` in units of `t̃ = 2t/σ_ref²`.
    pub fn scaled(n_steps: usize, total_time: f64, sigma_ref: f64) -> Result<Self> {
        if !(sigma_ref.is_finite() && sigma_ref > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma_ref",
                reason: "must be positive",
            });
        }
        Self::build(n_steps, total_time, 0.5 * sigma_ref * sigma_ref)
    }

    /// `n_steps` steps of physical length `dt`; scaled and physical time agree.
    pub fn physical(n_steps: usize, dt: f64) -> Result<Self> {
        Self::build(n_steps, dt * n_steps as f64, 1.0)
    }

    fn build(n_steps: usize, total_time: f64, time_unit: f64) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                reason: "must be at least 1",
            });
        }
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::InvalidParameter {
                name: "total_time",
                reason: "must be positive",
            });
        }
        let dt = total_time * time_unit / n_steps as f64;
        let mu2 = Complex::new(0.0, 2.0 / dt);
        // μ² = 4im/(ħ dt) with m = 1/2, ħ = 1.
        debug_assert!((mu2 - I * 4.0 * 0.5 / (1.0 * dt)).norm() <= 1e-12 * mu2.norm());
        Ok(Self {
            n_steps,
            total_time,
            time_unit,
            dt,
            mu2,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Total duration in scaled units.
    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// Physical step length.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Step length in scaled units.
    pub fn dt_scaled(&self) -> f64 {
        self.total_time / self.n_steps as f64
    }

    /// Physical time per unit of scaled time.
    pub fn time_unit(&self) -> f64 {
        self.time_unit
    }

    pub fn mu2(&self) -> Complex {
        self.mu2
    }

    pub fn mu(&self) -> Complex {
        crate::kernel::principal_mu(self.mu2)
    }

    /// Scaled time at the middle of step `n` (the step from `n-1` to `n`).
    pub fn mid_time(&self, n: usize) -> f64 {
        (n as f64 - 0.5) * self.dt_scaled()
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt_scaled()
    }
}

/// Gaussian packet `π^{-1/4} σ₀^{-1/2} e^{ik(x-x₀)} e^{-(x-x₀)²/2σ₀²}`.
///
/// `velocity` is the displacement of the centre per unit of `t̃ = 2t/σ₀²`,
/// which makes the carrier wavenumber `k = velocity / σ₀²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketSpec {
    pub x0: f64,
    pub sigma0: f64,
    pub velocity: f64,
}

impl WavePacketSpec {
    pub fn new(x0: f64, sigma0: f64, velocity: f64) -> Result<Self> {
        if !(sigma0.is_finite() && sigma0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma0",
                reason: "must be positive",
            });
        }
        if !(x0.is_finite() && velocity.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "x0/velocity",
                reason: "must be finite",
            });
        }
        Ok(Self {
            x0,
            sigma0,
            velocity,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.velocity / (self.sigma0 * self.sigma0)
    }

    fn prefactor(&self) -> f64 {
        1.0 / (libm::pow(PI, 0.25) * libm::sqrt(self.sigma0))
    }

    /// Value of the initial packet at `x`.
    pub fn value(&self, x: f64) -> Complex {
        let xi = x - self.x0;
        let envelope = libm::exp(-xi * xi / (2.0 * self.sigma0 * self.sigma0));
        let phase = self.wavenumber() * xi;
        Complex::new(libm::cos(phase), libm::sin(phase)) * (self.prefactor() * envelope)
    }

    /// Width of the freely evolved density at scaled time `t̃`.
    pub fn width_at(&self, t_scaled: f64) -> f64 {
        self.sigma0 * libm::sqrt(1.0 + t_scaled * t_scaled)
    }
}

/// Samples the packet on the grid.
///
/// Logs a warning when the packet is not numerically contained in the
/// domain: the boundary closure assumes nothing starts outside it.
pub fn make_gaussian(grid: &Grid1D, spec: &WavePacketSpec) -> ComplexField {
    let values = grid.points().map(|x| spec.value(x)).collect();
    let field = ComplexField {
        grid: grid.clone(),
        values,
    };
    let leak = field.boundary_leak();
    if leak > SUPPORT_LEAK_TOLERANCE {
        log::warn!(
            "initial packet leaks outside the domain: |psi(+-a)|/max|psi| = {leak:e}"
        );
    }
    field
}

/// Relative boundary amplitude above which an initial state counts as
/// extending outside the integration domain (`1e-8` in density).
pub const SUPPORT_LEAK_TOLERANCE: f64 = 1e-4;

/// Density of the freely evolving packet, `|Ψ(x, t̃)|²`.
pub fn analytic_free_density(spec: &WavePacketSpec, x: f64, t_scaled: f64) -> f64 {
    let sigma = spec.width_at(t_scaled);
    let d = x - spec.x0 - spec.velocity * t_scaled;
    libm::exp(-d * d / (sigma * sigma)) / (libm::sqrt(PI) * sigma)
}

/// Freely evolving packet including its phase.
pub fn analytic_free_wave(spec: &WavePacketSpec, x: f64, t_scaled: f64) -> Complex {
    let s2 = spec.sigma0 * spec.sigma0;
    let k = spec.wavenumber();
    let xi = x - spec.x0;
    let spread = Complex::new(1.0, t_scaled);
    let d = xi - spec.velocity * t_scaled;
    // Physical time is t = σ₀² t̃ / 2, so k² t = k² σ₀² t̃ / 2.
    let exponent = -Complex::new(d * d, 0.0) / (spread * (2.0 * s2))
        + I * (k * xi - 0.5 * k * k * s2 * t_scaled);
    exponent.exp() * spec.prefactor() / spread.sqrt()
}

/// Interaction potential, in the same units as the Hamiltonian `-∂² + V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    None,
    /// `V₀ exp(-x²/b²)`.
    StaticGaussian { depth: f64, width: f64 },
    /// `V₀ (1 + sin 2πω t̃) exp(-x²/b²)`.
    DrivenGaussian {
        depth: f64,
        width: f64,
        frequency: f64,
    },
    /// `V₀ [exp(-(x-a₀)²/b²) + exp(-(x+a₀)²/b²)]`.
    DoubleWell {
        height: f64,
        width: f64,
        offset: f64,
    },
    /// `-λ(t) δ(x)` with `λ(t) = λ₀ + (A/2)(1 - cos(r ω₀ t))`, `ω₀ = λ₀²/4`.
    /// Only the closed-form delta model handles this variant.
    DrivenDelta {
        strength: f64,
        amplitude: f64,
        drive_ratio: f64,
    },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let width = match *self {
            Self::None => return Ok(()),
            Self::StaticGaussian { width, .. }
            | Self::DrivenGaussian { width, .. }
            | Self::DoubleWell { width, .. } => width,
            Self::DrivenDelta { strength, .. } => {
                if !(strength.is_finite() && strength > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "lambda0",
                        reason: "must be positive",
                    });
                }
                return Ok(());
            }
        };
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "b",
                reason: "must be positive",
            });
        }
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        !matches!(self, Self::DrivenGaussian { .. } | Self::DrivenDelta { .. })
    }

    /// `V(x, t̃)`; `t_scaled` is normally the mid-step time.
    pub fn eval(&self, x: f64, t_scaled: f64) -> Result<f64> {
        let gauss = |c: f64, b: f64| {
            let u = (x - c) / b;
            libm::exp(-u * u)
        };
        Ok(match *self {
            Self::None => 0.0,
            Self::StaticGaussian { depth, width } => depth * gauss(0.0, width),
            Self::DrivenGaussian {
                depth,
                width,
                frequency,
            } => {
                let drive = 1.0 + libm::sin(2.0 * PI * frequency * t_scaled);
                depth * drive * gauss(0.0, width)
            }
            Self::DoubleWell {
                height,
                width,
                offset,
            } => height * (gauss(offset, width) + gauss(-offset, width)),
            Self::DrivenDelta { .. } => return Err(Error::NotGridRepresentable),
        })
    }
}

/// Anything the stepper can sample as `V(x, t̃)`.
pub trait Potential: core::fmt::Debug + Send + Sync {
    fn eval(&self, x: f64, t_scaled: f64) -> Result<f64>;

    fn is_static(&self) -> bool {
        false
    }
}

impl Potential for PotentialSpec {
    fn eval(&self, x: f64, t_scaled: f64) -> Result<f64> {
        PotentialSpec::eval(self, x, t_scaled)
    }

    fn is_static(&self) -> bool {
        PotentialSpec::is_static(self)
    }
}

/// Free-function form of [`PotentialSpec::eval`].
pub fn eval_potential(spec: &PotentialSpec, x: f64, t_mid: f64) -> Result<f64> {
    spec.eval(x, t_mid)
}
