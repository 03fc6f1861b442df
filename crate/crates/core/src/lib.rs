//! Time-dependent Schrödinger equation on a finite box closed by exact
//! discrete transparent boundary conditions.
//!
//! Units are fixed to `ħ = 2m = 1`, so the free Hamiltonian is `-∂²` and a
//! Crank-Nicolson step of size `dt` becomes the complex-energy problem
//! `(μ² - H) Ψ_n = (μ² + H) Ψ_{n-1}` with `μ² = 2i/dt`.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration and the CLI
//! live in the companion `tbc-sim` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod band2d;
pub mod delta;
pub mod error;
pub mod field;
pub mod kernel;
pub mod observables;
pub mod tbc1d;
pub mod tridiag;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;

/// The imaginary unit.
pub const I: Complex = Complex::new(0.0, 1.0);
