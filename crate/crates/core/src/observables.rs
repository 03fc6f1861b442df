//! Norms, boundary fluxes and overlaps computed from boundary data.
//!
//! For two solutions of the free discrete equation outside the box, the
//! exterior overlap changes per step by
//!
//! ```text
//! ⟨Φ|Ψ⟩ₑⁿ - ⟨Φ|Ψ⟩ₑⁿ⁻¹ = (1/2μ²) [S̄_Φ ∂ₙS_Ψ - ∂ₙS̄_Φ S_Ψ]
//! ```
//!
//! with `S = Ψ_n + Ψ_{n-1}` and `∂ₙ` the derivative along the outward
//! normal. Setting `Φ = Ψ` gives the probability leaving through that side.

use alloc::vec::Vec;

use crate::field::ComplexField;
use crate::Complex;

/// Trapezoidal `∫|Ψ|² dx` over the grid.
pub fn interior_norm(field: &ComplexField) -> f64 {
    trapezoid_norm(field.values(), field.grid().dx())
}

pub fn trapezoid_norm(values: &[Complex], dx: f64) -> f64 {
    match values {
        [] => 0.0,
        [only] => only.norm_sqr() * dx,
        [first, .., last] => {
            let total: f64 = values.iter().map(|v| v.norm_sqr()).sum();
            dx * (total - 0.5 * (first.norm_sqr() + last.norm_sqr()))
        }
    }
}

/// Boundary data of two consecutive steps at one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPair {
    /// `Ψ_n + Ψ_{n-1}` at the boundary.
    pub sum: Complex,
    /// Outward normal derivative of `Ψ_n + Ψ_{n-1}`.
    pub normal_derivative: Complex,
}

/// Complex increment of the exterior overlap `⟨Φ|Ψ⟩ₑ` through one side.
pub fn overlap_exterior_step(phi: BoundaryPair, psi: BoundaryPair, mu2: Complex) -> Complex {
    (phi.sum.conj() * psi.normal_derivative - phi.normal_derivative.conj() * psi.sum)
        / (mu2 * 2.0)
}

/// Probability entering the exterior through one side during one step.
pub fn flux_increment(
    psi_now: Complex,
    psi_prev: Complex,
    dn_psi_now: Complex,
    dn_psi_prev: Complex,
    mu2: Complex,
) -> f64 {
    let pair = BoundaryPair {
        sum: psi_now + psi_prev,
        normal_derivative: dn_psi_now + dn_psi_prev,
    };
    let inc = overlap_exterior_step(pair, pair, mu2);
    debug_assert!(
        inc.im.abs() <= 1e-12 * inc.re.abs().max(1e-300) || inc.im.abs() < 1e-300,
        "flux increment has imaginary residue {}",
        inc.im
    );
    inc.re
}

/// Running probability budget of one simulation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FluxLedger {
    left_increments: Vec<f64>,
    right_increments: Vec<f64>,
    left_cumulative: Vec<f64>,
    right_cumulative: Vec<f64>,
    interior: Vec<f64>,
}

impl FluxLedger {
    pub fn new(initial_norm: f64) -> Self {
        Self {
            left_increments: alloc::vec![0.0],
            right_increments: alloc::vec![0.0],
            left_cumulative: alloc::vec![0.0],
            right_cumulative: alloc::vec![0.0],
            interior: alloc::vec![initial_norm],
        }
    }

    pub fn record(&mut self, left: f64, right: f64, interior: f64) {
        let l = self.left() + left;
        let r = self.right() + right;
        self.left_increments.push(left);
        self.right_increments.push(right);
        self.left_cumulative.push(l);
        self.right_cumulative.push(r);
        self.interior.push(interior);
    }

    /// Number of recorded steps (the initial state is not a step).
    pub fn steps(&self) -> usize {
        self.interior.len() - 1
    }

    pub fn left(&self) -> f64 {
        *self.left_cumulative.last().unwrap_or(&0.0)
    }

    pub fn right(&self) -> f64 {
        *self.right_cumulative.last().unwrap_or(&0.0)
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    pub fn left_cumulative(&self) -> &[f64] {
        &self.left_cumulative
    }

    pub fn right_cumulative(&self) -> &[f64] {
        &self.right_cumulative
    }

    pub fn left_increments(&self) -> &[f64] {
        &self.left_increments
    }

    pub fn right_increments(&self) -> &[f64] {
        &self.right_increments
    }

    /// Interior norm plus exterior probability at step `n`.
    pub fn total(&self, n: usize) -> f64 {
        self.interior[n] + self.left_cumulative[n] + self.right_cumulative[n]
    }

    /// Largest `|total(n) - reference|` over all recorded steps.
    pub fn max_drift(&self, reference: f64) -> f64 {
        (0..self.interior.len())
            .map(|n| libm::fabs(self.total(n) - reference))
            .fold(0.0, f64::max)
    }
}
