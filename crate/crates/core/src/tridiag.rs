//! Complex tridiagonal systems and their direct (Thomas) solution.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::Complex;

/// `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<Complex>,
    pub diag: Vec<Complex>,
    pub upper: Vec<Complex>,
    pub rhs: Vec<Complex>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Row indices where `|diag| < |lower| + |upper|`.
    pub fn non_dominant_rows(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|&i| {
                let off = if i > 0 { self.lower[i].norm() } else { 0.0 }
                    + if i + 1 < n { self.upper[i].norm() } else { 0.0 };
                self.diag[i].norm() < off
            })
            .collect()
    }

    /// Matrix-vector product, ignoring the right-hand side.
    pub fn apply(&self, x: &[Complex]) -> Vec<Complex> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn solve(&self) -> Result<Vec<Complex>> {
        solve(&self.lower, &self.diag, &self.upper, &self.rhs)
    }
}

/// Thomas elimination without pivoting.
pub fn solve(
    lower: &[Complex],
    diag: &[Complex],
    upper: &[Complex],
    rhs: &[Complex],
) -> Result<Vec<Complex>> {
    let n = diag.len();
    for len in [lower.len(), upper.len(), rhs.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: len,
            });
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    let mut pivot = diag[0];
    if pivot.norm() == 0.0 {
        return Err(Error::ZeroPivot { row: 0 });
    }
    c.push(upper[0] / pivot);
    d.push(rhs[0] / pivot);
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot.norm() == 0.0 || !pivot.re.is_finite() || !pivot.im.is_finite() {
            return Err(Error::ZeroPivot { row: i });
        }
        c.push(upper[i] / pivot);
        d.push((rhs[i] - lower[i] * d[i - 1]) / pivot);
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Ok(x)
}
