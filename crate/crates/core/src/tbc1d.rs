//! Crank-Nicolson stepping on `[-a, a]` with transparent boundary closure.
//!
//! Each step solves `(μ² - H) Ψ_n = (μ² + H) Ψ_{n-1}` with the three-point
//! Laplacian. The rows at `±a` need one ghost value outside the box; the
//! closure expresses that ghost through the current boundary values and the
//! recorded boundary history, which keeps the system tridiagonal.
//!
//! Two closures are available:
//!
//! * [`ClosureKind::Lattice`]: the exterior is the same three-point lattice
//!   as the interior, so the ghost is a convolution of past boundary values
//!   with the lattice kernel. The result coincides with a run on an
//!   unbounded grid.
//! * [`ClosureKind::Continuum`]: the exterior is the continuous free
//!   equation, `Ψ_n(b) = Σ_p B_p ∂ₙ[Ψ_{n-p} + Ψ_{n-p-1}](b)` with
//!   `B_{2q} = -(i/μ) C_q`, and the normal derivative is the centred
//!   difference through the ghost node.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{ComplexField, Grid1D, Potential, PotentialSpec, TimeScheme, SUPPORT_LEAK_TOLERANCE};
use crate::kernel::{continuum_boundary_weights, lattice_ghost_kernel, KernelTable};
use crate::observables::{flux_increment, trapezoid_norm, FluxLedger};
use crate::tridiag::Tridiagonal;
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosureKind {
    #[default]
    Lattice,
    Continuum,
}

impl ClosureKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lattice => "lattice",
            Self::Continuum => "continuum",
        }
    }
}

impl core::str::FromStr for ClosureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Self::Lattice),
            "continuum" => Ok(Self::Continuum),
            _ => Err(Error::InvalidParameter {
                name: "closure",
                reason: "expected `lattice` or `continuum`",
            }),
        }
    }
}

/// Convolution weights of one boundary closure.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKernel {
    /// `ghost_n = Σ_{p=0}^{n} ghost[p] Ψ_{n-p}(b) - start[n] Ψ_0(b)`.
    ///
    /// `ghost` holds the coefficients of the decaying lattice root `r(w)`,
    /// `start` those of `r(w)/(1+w)`: a nonzero initial boundary value acts
    /// as a source on the first exterior node at step one.
    Lattice {
        ghost: Vec<Complex>,
        start: Vec<Complex>,
    },
    /// `Ψ_n(b) = Σ_{p=0}^{n-1} weights[p] ∂ₙ[Ψ_{n-p} + Ψ_{n-p-1}](b)`.
    Continuum { weights: Vec<Complex> },
}

impl BoundaryKernel {
    pub fn build(kind: ClosureKind, table: &KernelTable, dx: f64, ky2: f64) -> Result<Self> {
        match kind {
            ClosureKind::Lattice => Ok(Self::lattice(table, dx, ky2)),
            ClosureKind::Continuum => Self::continuum(table, ky2),
        }
    }

    pub fn lattice(table: &KernelTable, dx: f64, ky2: f64) -> Self {
        let ghost = lattice_ghost_kernel(table.mu2(), dx, ky2, table.n_steps() + 1, table.dft());
        let mut start = Vec::with_capacity(ghost.len());
        let mut prev = Complex::new(0.0, 0.0);
        for g in &ghost {
            prev = g - prev;
            start.push(prev);
        }
        Self::Lattice { ghost, start }
    }

    /// Needs the `(0, ky2)` sums in `table` unless `ky2 == 0`.
    pub fn continuum(table: &KernelTable, ky2: f64) -> Result<Self> {
        Ok(Self::Continuum {
            weights: continuum_boundary_weights(table, ky2)?,
        })
    }

    pub fn kind(&self) -> ClosureKind {
        match self {
            Self::Lattice { .. } => ClosureKind::Lattice,
            Self::Continuum { .. } => ClosureKind::Continuum,
        }
    }

    /// Last step the kernel covers.
    pub fn max_steps(&self) -> usize {
        match self {
            Self::Lattice { ghost, .. } => ghost.len() - 1,
            Self::Continuum { weights } => weights.len() - 1,
        }
    }

    pub fn coefficients(&self) -> &[Complex] {
        match self {
            Self::Lattice { ghost, .. } => ghost,
            Self::Continuum { weights } => weights,
        }
    }
}

/// Past boundary values at one side, one entry per completed time level.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryHistory {
    side: Side,
    dx: f64,
    values: Vec<Complex>,
    inner: Vec<Complex>,
    ghosts: Vec<Complex>,
    derivs: Vec<Complex>,
}

impl BoundaryHistory {
    pub fn new(side: Side, dx: f64) -> Self {
        Self {
            side,
            dx,
            values: Vec::new(),
            inner: Vec::new(),
            ghosts: Vec::new(),
            derivs: Vec::new(),
        }
    }

    pub fn push(&mut self, value: Complex, inner: Complex, ghost: Complex) {
        let outward = (ghost - inner) / (2.0 * self.dx);
        let deriv = match self.side {
            Side::Right => outward,
            Side::Left => -outward,
        };
        self.values.push(value);
        self.inner.push(inner);
        self.ghosts.push(ghost);
        self.derivs.push(deriv);
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Ψ_m` at the boundary node.
    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    /// Centred `∂ₓΨ_m` at the boundary node.
    pub fn derivs(&self) -> &[Complex] {
        &self.derivs
    }

    pub fn ghosts(&self) -> &[Complex] {
        &self.ghosts
    }

    /// Centred derivative along the outward normal.
    pub fn normal_derivative(&self, m: usize) -> Complex {
        match self.side {
            Side::Right => self.derivs[m],
            Side::Left => -self.derivs[m],
        }
    }

    /// `Ψ_m + Ψ_{m-1}` and its outward derivative; `m = 0` gives `Ψ_0` alone.
    pub fn pair_sum(&self, m: usize) -> (Complex, Complex) {
        if m == 0 {
            (self.values[0], self.normal_derivative(0))
        } else {
            (
                self.values[m] + self.values[m - 1],
                self.normal_derivative(m) + self.normal_derivative(m - 1),
            )
        }
    }
}

/// `ghost_n = boundary·Ψ_n(b) + inner·Ψ_n(b∓dx) + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostRelation {
    pub boundary: Complex,
    pub inner: Complex,
    pub offset: Complex,
}

impl GhostRelation {
    pub fn ghost(&self, boundary: Complex, inner: Complex) -> Complex {
        self.boundary * boundary + self.inner * inner + self.offset
    }
}

/// `Ψ_n(b) = alpha·∂ₙΨ_n(b) + gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinRelation {
    pub alpha: Complex,
    pub gamma: Complex,
}

impl RobinRelation {
    /// Eliminates the ghost through `∂ₙΨ = (ghost - inner) / 2dx`.
    pub fn to_ghost(&self, dx: f64) -> GhostRelation {
        let scale = 2.0 * dx / self.alpha;
        GhostRelation {
            boundary: scale,
            inner: Complex::new(1.0, 0.0),
            offset: -scale * self.gamma,
        }
    }
}

/// Continuum boundary relation for step `n` from the history of steps `< n`.
pub fn robin_relation(history: &BoundaryHistory, weights: &[Complex], n: usize) -> RobinRelation {
    debug_assert!(n >= 1 && history.len() >= n);
    let alpha = weights[0];
    let mut gamma = alpha * history.normal_derivative(n - 1);
    for (p, w) in weights.iter().enumerate().take(n).skip(1) {
        gamma += w * history.pair_sum(n - p).1;
    }
    RobinRelation { alpha, gamma }
}

/// Ghost elimination for step `n` at either side.
pub fn boundary_closure(
    history: &BoundaryHistory,
    kernel: &BoundaryKernel,
    dx: f64,
    n: usize,
) -> Result<GhostRelation> {
    if n == 0 || history.len() < n {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "closure needs n >= 1 and n recorded steps",
        });
    }
    if n > kernel.max_steps() {
        return Err(Error::KernelExhausted {
            available: kernel.max_steps(),
            requested: n,
        });
    }
    Ok(match kernel {
        BoundaryKernel::Lattice { ghost, start } => {
            let offset = (1..=n)
                .map(|p| ghost[p] * history.values[n - p])
                .sum::<Complex>()
                - start[n] * history.values[0];
            GhostRelation {
                boundary: ghost[0],
                inner: Complex::new(0.0, 0.0),
                offset,
            }
        }
        BoundaryKernel::Continuum { weights } => robin_relation(history, weights, n).to_ghost(dx),
    })
}

pub fn boundary_closure_right(
    history: &BoundaryHistory,
    kernel: &BoundaryKernel,
    dx: f64,
    n: usize,
) -> Result<GhostRelation> {
    debug_assert_eq!(history.side(), Side::Right);
    boundary_closure(history, kernel, dx, n)
}

pub fn boundary_closure_left(
    history: &BoundaryHistory,
    kernel: &BoundaryKernel,
    dx: f64,
    n: usize,
) -> Result<GhostRelation> {
    debug_assert_eq!(history.side(), Side::Left);
    boundary_closure(history, kernel, dx, n)
}

/// One 1D simulation: the current field plus everything the closure needs.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid1D,
    scheme: TimeScheme,
    potential: Arc<dyn Potential>,
    energy_shift: f64,
    kernel: Arc<BoundaryKernel>,
    n: usize,
    psi: Vec<Complex>,
    left: BoundaryHistory,
    right: BoundaryHistory,
    ledger: FluxLedger,
    closure_ops: u64,
}

impl Stepper {
    pub fn new(
        initial: ComplexField,
        scheme: TimeScheme,
        potential: PotentialSpec,
        kernel: Arc<BoundaryKernel>,
    ) -> Result<Self> {
        Self::with_energy_shift(initial, scheme, potential, kernel, 0.0)
    }

    /// Adds the constant `shift` to the Hamiltonian everywhere, inside and
    /// outside the box; `kernel` must be built for the same shift.
    pub fn with_energy_shift(
        initial: ComplexField,
        scheme: TimeScheme,
        potential: PotentialSpec,
        kernel: Arc<BoundaryKernel>,
        shift: f64,
    ) -> Result<Self> {
        potential.validate()?;
        if matches!(potential, PotentialSpec::DrivenDelta { .. }) {
            return Err(Error::NotGridRepresentable);
        }
        Self::with_potential(initial, scheme, Arc::new(potential), kernel, shift)
    }

    /// General form taking any sampled potential.
    pub fn with_potential(
        initial: ComplexField,
        scheme: TimeScheme,
        potential: Arc<dyn Potential>,
        kernel: Arc<BoundaryKernel>,
        shift: f64,
    ) -> Result<Self> {
        if !shift.is_finite() {
            return Err(Error::InvalidParameter {
                name: "energy_shift",
                reason: "must be finite",
            });
        }
        let grid = initial.grid().clone();
        let a = grid.half_width();
        let edge = libm::fabs(potential.eval(a, 0.0)?).max(libm::fabs(potential.eval(-a, 0.0)?));
        if edge > 1e-10 {
            log::warn!("potential does not vanish at the boundary (|V(+-a)| = {edge:e})");
        }
        let leak = initial.boundary_leak();
        if leak > SUPPORT_LEAK_TOLERANCE {
            log::warn!("initial state not contained in the domain (leak {leak:e}); the closure ignores exterior initial data");
        }
        let psi = initial.into_values();
        let dx = grid.dx();
        let nx = grid.nx();
        let zero = Complex::new(0.0, 0.0);
        let mut left = BoundaryHistory::new(Side::Left, dx);
        let mut right = BoundaryHistory::new(Side::Right, dx);
        // The exterior starts empty, so the initial ghosts vanish.
        left.push(psi[0], psi[1], zero);
        right.push(psi[nx - 1], psi[nx - 2], zero);
        let ledger = FluxLedger::new(trapezoid_norm(&psi, dx));
        Ok(Self {
            grid,
            scheme,
            potential,
            energy_shift: shift,
            kernel,
            n: 0,
            psi,
            left,
            right,
            ledger,
            closure_ops: 0,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn scheme(&self) -> &TimeScheme {
        &self.scheme
    }

    pub fn potential(&self) -> &dyn Potential {
        &*self.potential
    }

    pub fn energy_shift(&self) -> f64 {
        self.energy_shift
    }

    pub fn kernel(&self) -> &BoundaryKernel {
        &self.kernel
    }

    /// Number of completed steps.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn psi(&self) -> &[Complex] {
        &self.psi
    }

    pub fn field(&self) -> ComplexField {
        ComplexField::new(self.grid.clone(), self.psi.clone()).expect("stepper field stays finite")
    }

    pub fn history(&self, side: Side) -> &BoundaryHistory {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn ledger(&self) -> &FluxLedger {
        &self.ledger
    }

    /// Kernel terms evaluated by the boundary closures so far.
    pub fn closure_ops(&self) -> u64 {
        self.closure_ops
    }

    fn potential_row(&self, t_mid: f64) -> Result<Vec<f64>> {
        self.grid
            .points()
            .map(|x| Ok(self.potential.eval(x, t_mid)? + self.energy_shift))
            .collect()
    }

    fn closures(&self, m: usize) -> Result<(GhostRelation, GhostRelation)> {
        let dx = self.grid.dx();
        Ok((
            boundary_closure_left(&self.left, &self.kernel, dx, m)?,
            boundary_closure_right(&self.right, &self.kernel, dx, m)?,
        ))
    }

    fn assemble_with(&self, left: &GhostRelation, right: &GhostRelation) -> Result<Tridiagonal> {
        let m = self.n + 1;
        let nx = self.grid.nx();
        let inv_h2 = 1.0 / (self.grid.dx() * self.grid.dx());
        let mu2 = self.scheme.mu2();
        let v = self.potential_row(self.scheme.mid_time(m))?;
        let psi = &self.psi;
        let off = Complex::new(inv_h2, 0.0);

        let mut lower = alloc::vec![off; nx];
        let mut upper = alloc::vec![off; nx];
        lower[0] = Complex::new(0.0, 0.0);
        upper[nx - 1] = Complex::new(0.0, 0.0);
        let diag: Vec<Complex> = v.iter().map(|&vj| mu2 - vj - 2.0 * inv_h2).collect();

        // (μ² + H)Ψ_{n-1} with the ghosts of the previous level.
        let ghost_left = *self.left.ghosts.last().expect("history is never empty");
        let ghost_right = *self.right.ghosts.last().expect("history is never empty");
        let at = |j: isize| -> Complex {
            if j < 0 {
                ghost_left
            } else if j as usize >= nx {
                ghost_right
            } else {
                psi[j as usize]
            }
        };
        let mut rhs: Vec<Complex> = (0..nx)
            .map(|j| {
                let lap = (at(j as isize + 1) - psi[j] * 2.0 + at(j as isize - 1)) * inv_h2;
                psi[j] * (mu2 + v[j]) - lap
            })
            .collect();

        let mut diag = diag;
        diag[0] += left.boundary * inv_h2;
        upper[0] += left.inner * inv_h2;
        rhs[0] -= left.offset * inv_h2;
        diag[nx - 1] += right.boundary * inv_h2;
        lower[nx - 1] += right.inner * inv_h2;
        rhs[nx - 1] -= right.offset * inv_h2;

        Ok(Tridiagonal {
            lower,
            diag,
            upper,
            rhs,
        })
    }

    /// Linear system for the next step, ghosts already eliminated.
    pub fn assemble_step(&self) -> Result<Tridiagonal> {
        let (left, right) = self.closures(self.n + 1)?;
        self.assemble_with(&left, &right)
    }

    /// Advances one step.
    pub fn step(&mut self) -> Result<()> {
        let m = self.n + 1;
        let (left_rel, right_rel) = self.closures(m)?;
        let system = self.assemble_with(&left_rel, &right_rel)?;
        if m == 1 {
            let weak = system.non_dominant_rows();
            if !weak.is_empty() {
                log::warn!("{} rows are not diagonally dominant (first: {})", weak.len(), weak[0]);
            }
        }
        let new = system.solve()?;
        let nx = self.grid.nx();
        // Each side convolves m history terms.
        self.closure_ops += 2 * m as u64;

        let ghost_left = left_rel.ghost(new[0], new[1]);
        let ghost_right = right_rel.ghost(new[nx - 1], new[nx - 2]);
        self.left.push(new[0], new[1], ghost_left);
        self.right.push(new[nx - 1], new[nx - 2], ghost_right);
        self.psi = new;
        self.n = m;

        let mu2 = self.scheme.mu2();
        let flux = |h: &BoundaryHistory| {
            flux_increment(
                h.values[m],
                h.values[m - 1],
                h.normal_derivative(m),
                h.normal_derivative(m - 1),
                mu2,
            )
        };
        let (fl, fr) = (flux(&self.left), flux(&self.right));
        let interior = trapezoid_norm(&self.psi, self.grid.dx());
        self.ledger.record(fl, fr, interior);
        Ok(())
    }

    pub fn run(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    /// Mismatch of the boundary relation at the last completed step,
    /// re-evaluated from the stored history.
    pub fn closure_residual(&self) -> Result<f64> {
        let m = self.n;
        if m == 0 {
            return Ok(0.0);
        }
        let dx = self.grid.dx();
        let mut worst: f64 = 0.0;
        for h in [&self.left, &self.right] {
            let residual = match &*self.kernel {
                BoundaryKernel::Continuum { weights } => {
                    let rel = robin_relation(h, weights, m);
                    (h.values[m] - rel.alpha * h.normal_derivative(m) - rel.gamma).norm()
                }
                kernel @ BoundaryKernel::Lattice { .. } => {
                    let rel = boundary_closure(h, kernel, dx, m)?;
                    (h.ghosts[m] - rel.ghost(h.values[m], h.inner[m])).norm()
                }
            };
            worst = worst.max(residual);
        }
        Ok(worst)
    }
}

/// Wavefunction at `x0` outside the box from the boundary history alone.
///
/// Uses the continuum Green representation
/// `Ψ_n(x₀) = (1/2μ²) Σ_p [(K_p+K_{p+1})(d) ∂ₙS_{n-p} + ∂_d(K_p+K_{p+1})(d) S_{n-p}]`
/// with `d = |x₀| - a` and `S_m = Ψ_m + Ψ_{m-1}` at the nearer boundary.
/// The table must hold the sums at `(d, ky2)`.
pub fn exterior_reconstruct(
    history: &BoundaryHistory,
    table: &KernelTable,
    half_width: f64,
    x0: f64,
    n: usize,
    ky2: f64,
) -> Result<Complex> {
    let expected_side = if x0 > 0.0 { Side::Right } else { Side::Left };
    if libm::fabs(x0) <= half_width || history.side() != expected_side {
        return Err(Error::InvalidParameter {
            name: "x0",
            reason: "must lie outside the box on the side of the given history",
        });
    }
    if n >= history.len() {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "step not yet recorded",
        });
    }
    let d = libm::fabs(x0) - half_width;
    let sums = table.sums(d, ky2)?;
    if n >= sums.values.len() {
        return Err(Error::KernelExhausted {
            available: sums.values.len() - 1,
            requested: n,
        });
    }
    let mut acc = Complex::new(0.0, 0.0);
    for p in 0..=n {
        let (s, ds) = history.pair_sum(n - p);
        acc += sums.values[p] * ds + sums.slopes[p] * s;
    }
    Ok(acc / (table.mu2() * 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_gaussian, WavePacketSpec};
    use crate::kernel::KernelTable;
    use crate::I;

    fn setup(kind: ClosureKind, n_steps: usize, v: f64) -> Stepper {
        let grid = Grid1D::new(1.0, 201).unwrap();
        let scheme = TimeScheme::scaled(n_steps, 4.0 * n_steps as f64 / 40.0, 0.2).unwrap();
        let table = KernelTable::new(scheme.mu2(), n_steps).unwrap();
        let kernel = Arc::new(BoundaryKernel::build(kind, &table, grid.dx(), 0.0).unwrap());
        let spec = WavePacketSpec::new(0.0, 0.2, v).unwrap();
        Stepper::new(make_gaussian(&grid, &spec), scheme, PotentialSpec::None, kernel).unwrap()
    }

    #[test]
    fn zero_field_stays_zero() {
        let grid = Grid1D::new(1.0, 51).unwrap();
        let scheme = TimeScheme::scaled(10, 1.0, 0.2).unwrap();
        let table = KernelTable::new(scheme.mu2(), 10).unwrap();
        for kind in [ClosureKind::Lattice, ClosureKind::Continuum] {
            let kernel = Arc::new(BoundaryKernel::build(kind, &table, grid.dx(), 0.0).unwrap());
            let mut s = Stepper::new(
                ComplexField::zeros(grid.clone()),
                scheme.clone(),
                PotentialSpec::None,
                kernel,
            )
            .unwrap();
            let sys = s.assemble_step().unwrap();
            assert!(sys.rhs.iter().all(|r| r.norm() == 0.0));
            s.run(10).unwrap();
            assert!(s.psi().iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn static_matrix_is_step_independent() {
        let grid = Grid1D::new(1.0, 101).unwrap();
        let scheme = TimeScheme::scaled(60, 6.0, 0.2).unwrap();
        let table = KernelTable::new(scheme.mu2(), 60).unwrap();
        let spec = WavePacketSpec::new(-0.2, 0.15, 0.3).unwrap();
        let well = PotentialSpec::StaticGaussian {
            depth: -150.0,
            width: 0.05,
        };
        for kind in [ClosureKind::Lattice, ClosureKind::Continuum] {
            let kernel = Arc::new(BoundaryKernel::build(kind, &table, grid.dx(), 0.0).unwrap());
            let mut s =
                Stepper::new(make_gaussian(&grid, &spec), scheme.clone(), well, kernel).unwrap();
            s.run(5).unwrap();
            let a5 = s.assemble_step().unwrap();
            s.run(45).unwrap();
            let a50 = s.assemble_step().unwrap();
            assert_eq!(a5.diag, a50.diag);
            assert_eq!(a5.lower, a50.lower);
            assert_eq!(a5.upper, a50.upper);
        }
    }

    #[test]
    fn interior_row_matches_hand_expansion() {
        let s = setup(ClosureKind::Lattice, 40, 0.25);
        let sys = s.assemble_step().unwrap();
        let h = s.grid().dx();
        let mu2 = s.scheme().mu2();
        let j = 73;
        // (μ² - V)Ψ + Ψ'' on the left; (μ² + V)Ψ - Ψ'' on the right, V = 0.
        assert_eq!(sys.lower[j], Complex::new(1.0 / (h * h), 0.0));
        assert_eq!(sys.upper[j], Complex::new(1.0 / (h * h), 0.0));
        assert!((sys.diag[j] - (mu2 - 2.0 / (h * h))).norm() < 1e-9);
        let psi = s.psi();
        let expect = psi[j] * mu2 - (psi[j + 1] - psi[j] * 2.0 + psi[j - 1]) / (h * h);
        assert!((sys.rhs[j] - expect).norm() < 1e-9 * expect.norm());
    }

    #[test]
    fn first_step_closure_is_pure_robin() {
        let mut h = BoundaryHistory::new(Side::Right, 0.01);
        let z = Complex::new(0.0, 0.0);
        h.push(z, z, z);
        let table = KernelTable::new(Complex::new(0.0, 1000.0), 4).unwrap();
        let weights = continuum_boundary_weights(&table, 0.0).unwrap();
        let rel = robin_relation(&h, &weights, 1);
        assert_eq!(rel.gamma, z);
        assert!((rel.alpha - (-I / table.mu())).norm() < 1e-15);
        let kernel = BoundaryKernel::lattice(&table, 0.01, 0.0);
        let g = boundary_closure_right(&h, &kernel, 0.01, 1).unwrap();
        assert_eq!(g.offset, z);
    }

    #[test]
    fn symmetric_packet_stays_even() {
        for kind in [ClosureKind::Lattice, ClosureKind::Continuum] {
            let mut s = setup(kind, 40, 0.0);
            for _ in 0..40 {
                s.step().unwrap();
                let psi = s.psi();
                let nx = psi.len();
                for i in 0..nx / 2 {
                    let (a, b) = (psi[i], psi[nx - 1 - i]);
                    assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300), "{kind:?} step {}", s.n());
                }
            }
        }
    }

    #[test]
    fn conservation_ledger_closes() {
        for kind in [ClosureKind::Lattice, ClosureKind::Continuum] {
            let mut s = setup(kind, 40, 0.25);
            s.run(40).unwrap();
            let drift = s.ledger().max_drift(1.0);
            assert!(drift < 1e-10, "{kind:?}: {drift}");
            assert!(s.closure_residual().unwrap() < 1e-9);
            assert!(s.ledger().right() > s.ledger().left());
        }
    }

    #[test]
    fn kernel_exhaustion_is_reported() {
        let mut s = setup(ClosureKind::Lattice, 5, 0.0);
        s.run(5).unwrap();
        assert!(matches!(s.step(), Err(Error::KernelExhausted { .. })));
    }

    #[test]
    fn reflected_run_mirrors() {
        for kind in [ClosureKind::Lattice, ClosureKind::Continuum] {
            let mut fwd = setup(kind, 40, 0.25);
            let mut back = setup(kind, 40, -0.25);
            fwd.run(30).unwrap();
            back.run(30).unwrap();
            let nx = fwd.psi().len();
            for i in 0..nx {
                let (a, b) = (fwd.psi()[i], back.psi()[nx - 1 - i]);
                assert!((a - b).norm() < 1e-12);
            }
            assert!((fwd.ledger().right() - back.ledger().left()).abs() < 1e-13);
        }
    }

    #[test]
    fn exterior_rejects_interior_points() {
        let s = setup(ClosureKind::Lattice, 4, 0.0);
        let table = KernelTable::new(s.scheme().mu2(), 4).unwrap();
        assert!(exterior_reconstruct(s.history(Side::Right), &table, 1.0, 0.5, 0, 0.0).is_err());
        assert!(exterior_reconstruct(s.history(Side::Left), &table, 1.0, 1.5, 0, 0.0).is_err());
    }

    #[test]
    fn exterior_zero_history_is_zero() {
        let mut h = BoundaryHistory::new(Side::Right, 0.01);
        let z = Complex::new(0.0, 0.0);
        for _ in 0..4 {
            h.push(z, z, z);
        }
        let table = KernelTable::new(Complex::new(0.0, 1000.0), 4)
            .unwrap()
            .with_points(&[(0.25, 0.0)]);
        assert_eq!(exterior_reconstruct(&h, &table, 1.0, 1.25, 3, 0.0).unwrap(), z);
    }
}
