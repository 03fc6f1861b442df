//! Brute-force reference: the same Crank-Nicolson scheme on a much wider
//! grid with `Ψ = 0` walls, compared inside the small box until waves
//! reflected by the walls can come back.

use std::sync::Arc;

use tbc_core::field::{Grid1D, Potential, TimeScheme};
use tbc_core::tbc1d::Stepper;
use tbc_core::tridiag::Tridiagonal;
use tbc_core::Complex;

/// Crank-Nicolson with zero Dirichlet walls just outside the grid.
#[derive(Debug, Clone)]
pub struct DirichletRun {
    grid: Grid1D,
    scheme: TimeScheme,
    potential: Arc<dyn Potential>,
    psi: Vec<Complex>,
    n: usize,
}

impl DirichletRun {
    pub fn new(grid: Grid1D, scheme: TimeScheme, potential: Arc<dyn Potential>, psi: Vec<Complex>) -> Self {
        assert_eq!(grid.nx(), psi.len());
        Self {
            grid,
            scheme,
            potential,
            psi,
            n: 0,
        }
    }

    pub fn psi(&self) -> &[Complex] {
        &self.psi
    }

    pub fn step(&mut self) -> tbc_core::Result<()> {
        let nx = self.grid.nx();
        let inv_h2 = 1.0 / (self.grid.dx() * self.grid.dx());
        let mu2 = self.scheme.mu2();
        let t = self.scheme.mid_time(self.n + 1);
        let v = self
            .grid
            .points()
            .map(|x| self.potential.eval(x, t))
            .collect::<tbc_core::Result<Vec<f64>>>()?;
        let zero = Complex::new(0.0, 0.0);
        let psi = &self.psi;
        let rhs = (0..nx)
            .map(|j| {
                let l = if j > 0 { psi[j - 1] } else { zero };
                let r = if j + 1 < nx { psi[j + 1] } else { zero };
                psi[j] * (mu2 + v[j]) - (l - psi[j] * 2.0 + r) * inv_h2
            })
            .collect();
        let off = Complex::new(inv_h2, 0.0);
        let mut lower = vec![off; nx];
        let mut upper = vec![off; nx];
        lower[0] = zero;
        upper[nx - 1] = zero;
        let diag = v.iter().map(|&vj| mu2 - vj - 2.0 * inv_h2).collect();
        self.psi = Tridiagonal {
            lower,
            diag,
            upper,
            rhs,
        }
        .solve()?;
        self.n += 1;
        Ok(())
    }
}

/// Steps before anything that left `[-a, a]` can return from walls at
/// `±wide`. Speeds are bounded by `2 k_max` with `k_max = |k0| + 6/σ0`.
pub fn reflection_free_steps(k0: f64, sigma0: f64, half_width: f64, wide: f64, dt: f64) -> usize {
    let k_max = k0.abs() + 6.0 / sigma0;
    let travel = 2.0 * (wide - half_width);
    (travel / (2.0 * k_max * dt)).floor() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub steps: usize,
    pub max_rel_l2: f64,
    pub worst_step: usize,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.max_rel_l2 < self.tolerance
    }
}

/// Advances `tbc` and a wide Dirichlet copy of its current state side by side
/// for up to `max_steps` steps, limited by the reflection-free window.
///
/// `tbc` must be at step 0; the reference starts from the same box values
/// and zeros outside, which is the initial-value problem the closure solves.
pub fn compare(
    tbc: &mut Stepper,
    potential: Arc<dyn Potential>,
    k0: f64,
    sigma0: f64,
    wide: f64,
    max_steps: usize,
    tolerance: f64,
) -> tbc_core::Result<OracleReport> {
    assert_eq!(tbc.n(), 0, "oracle comparison starts from the initial state");
    let grid = tbc.grid().clone();
    let dx = grid.dx();
    let a = grid.half_width();
    let pad = ((wide - a) / dx).round() as usize;
    let wide_grid = Grid1D::new(a + pad as f64 * dx, grid.nx() + 2 * pad)?;
    let mut init = vec![Complex::new(0.0, 0.0); wide_grid.nx()];
    init[pad..pad + grid.nx()].copy_from_slice(tbc.psi());
    let mut reference = DirichletRun::new(wide_grid.clone(), tbc.scheme().clone(), potential, init);

    let window = reflection_free_steps(k0, sigma0, a, wide_grid.half_width(), tbc.scheme().dt());
    let steps = window.min(max_steps);
    let mut report = OracleReport {
        steps,
        max_rel_l2: 0.0,
        worst_step: 0,
        tolerance,
    };
    for n in 1..=steps {
        tbc.step()?;
        reference.step()?;
        let inside = &reference.psi()[pad..pad + grid.nx()];
        let num: f64 = tbc.psi().iter().zip(inside).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = inside.iter().map(|b| b.norm_sqr()).sum();
        let rel = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
        if rel > report.max_rel_l2 {
            report.max_rel_l2 = rel;
            report.worst_step = n;
        }
    }
    log::info!(
        "oracle: {} steps, max relative L2 {:.3e} at step {}",
        report.steps,
        report.max_rel_l2,
        report.worst_step
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tbc_core::field::PotentialSpec;

    #[test]
    fn window_scales_with_speed_and_distance() {
        let a = reflection_free_steps(6.25, 0.2, 1.0, 8.0, 0.002);
        assert_eq!(a, (14.0 / (2.0 * 36.25 * 0.002)) as usize);
        assert!(reflection_free_steps(0.0, 0.2, 1.0, 16.0, 0.002) > 2 * a);
    }

    #[test]
    fn dirichlet_run_is_unitary_away_from_walls() {
        let grid = Grid1D::new(2.0, 201).unwrap();
        let scheme = TimeScheme::scaled(20, 1.0, 0.2).unwrap();
        let packet = tbc_core::field::WavePacketSpec::new(0.0, 0.2, 0.1).unwrap();
        let psi = tbc_core::field::make_gaussian(&grid, &packet).into_values();
        let norm = |p: &[Complex]| p.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let n0 = norm(&psi);
        let mut run = DirichletRun::new(grid, scheme, Arc::new(PotentialSpec::None), psi);
        for _ in 0..20 {
            run.step().unwrap();
        }
        assert!((norm(run.psi()) - n0).abs() < 1e-12 * n0);
    }
}
