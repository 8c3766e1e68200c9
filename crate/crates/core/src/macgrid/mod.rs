//! Periodic MAC (staggered) grid: field containers, discrete vector calculus
//! and FFT-based solvers.
//!
//! Index conventions, with `h = L / N` and all indices taken modulo `N`:
//!
//! | centering | location of `(i, j)` |
//! |-----------|----------------------|
//! | cell      | `((i + 1/2) h, (j + 1/2) h)` |
//! | x-edge    | `(i h, (j + 1/2) h)` |
//! | y-edge    | `((i + 1/2) h, j h)` |
//! | node      | `(i h, j h)` |

mod field;
mod ops;
mod spectral;

pub use field::{Cell, Centering, Field, Node, XEdge, YEdge};
pub use field::{CellField, EdgeVectorField, NodeField};
pub use ops::{convective, curl, div, grad, laplacian, mean_flow, perp_grad};
pub use spectral::SpectralSolver;

use crate::error::{Error, Result};

/// Geometry of a periodic `N x N` grid on `[0, L)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    l: f64,
    h: f64,
}

impl GridSpec {
    /// `n` must be a power of two no smaller than 8.
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Parameter {
                name: "domain_l",
                reason: format!("must be positive, got {l}"),
            });
        }
        Ok(Self { n, l, h: l / n as f64 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn area(&self) -> f64 {
        self.l * self.l
    }
}
