//! FFT solvers for the periodic five-point Laplacian and the
//! Crank–Nicolson Stokes update.
//!
//! Every stencil in [`super::ops`] is translation invariant, so each scalar
//! component diagonalizes under the 2D DFT of its own index grid. The
//! five-point Laplacian has symbol `-lambda(k, l)` with
//! `lambda = (4/h^2)(sin^2(pi k/N) + sin^2(pi l/N))` at every centering.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{Centering, EdgeVectorField, Field};
use super::ops::{div, grad, laplacian};
use super::{CellField, GridSpec};
use crate::error::{Error, Result};

/// Relative tolerance on the mean of a Poisson right-hand side.
pub const POISSON_COMPAT_TOL: f64 = 1e-10;

#[derive(Clone)]
pub struct SpectralSolver {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    lambda: Vec<f64>,
}

impl std::fmt::Debug for SpectralSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolver").field("grid", &self.grid).finish()
    }
}

impl SpectralSolver {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let h = grid.h();
        let s: Vec<f64> = (0..n)
            .map(|k| (std::f64::consts::PI * k as f64 / n as f64).sin().powi(2) * 4.0 / (h * h))
            .collect();
        let mut lambda = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                lambda.push(s[a] + s[b]);
            }
        }
        Self {
            grid,
            forward,
            inverse,
            lambda,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Magnitude of the discrete Laplacian eigenvalue for wavenumbers
    /// `(k, l)`, i.e. `laplacian` multiplies that mode by `-eigenvalue`.
    pub fn eigenvalue(&self, k: usize, l: usize) -> f64 {
        self.lambda[l * self.grid.n() + k]
    }

    fn transpose(n: usize, data: &mut [Complex64]) {
        for j in 0..n {
            for i in (j + 1)..n {
                data.swap(j * n + i, i * n + j);
            }
        }
    }

    /// Forward 2D transform. The spectrum is left in transposed layout,
    /// which is harmless because the multipliers are symmetric in `(k, l)`.
    fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        Self::transpose(n, &mut buf);
        self.forward.process(&mut buf);
        buf
    }

    fn inverse(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        let n = self.grid.n();
        self.inverse.process(&mut buf);
        Self::transpose(n, &mut buf);
        self.inverse.process(&mut buf);
        let scale = 1.0 / (n * n) as f64;
        buf.into_iter().map(|c| c.re * scale).collect()
    }

    fn apply_symbol<C: Centering>(&self, rhs: &Field<C>, symbol: impl Fn(f64) -> f64) -> Field<C> {
        let mut spec = self.forward(rhs.data());
        for (c, &lam) in spec.iter_mut().zip(&self.lambda) {
            *c *= symbol(lam);
        }
        Field::from_vec(self.grid.n(), self.inverse(spec))
    }

    /// Mean-zero solution of `laplacian(phi) = rhs`.
    ///
    /// The right-hand side must have (numerically) zero mean.
    pub fn poisson_solve<C: Centering>(&self, rhs: &Field<C>) -> Result<Field<C>> {
        let mean = rhs.mean();
        let norm = rhs.max_abs();
        if mean.abs() > POISSON_COMPAT_TOL * norm {
            return Err(Error::IncompatibleRhs { mean, norm });
        }
        Ok(self.apply_symbol(rhs, |lam| if lam == 0.0 { 0.0 } else { -1.0 / lam }))
    }

    /// Solution of `(alpha - beta * laplacian) x = rhs` for `alpha > 0`,
    /// `beta >= 0`.
    pub fn helmholtz_solve<C: Centering>(&self, alpha: f64, beta: f64, rhs: &Field<C>) -> Field<C> {
        self.apply_symbol(rhs, |lam| 1.0 / (alpha + beta * lam))
    }

    /// One Crank–Nicolson step of the forced Stokes system
    ///
    /// `rho (u1 - u0)/dt + rho adv = -grad p + (mu/2) lap (u1 + u0) + f`,
    /// `div u1 = 0`,
    ///
    /// returning `(u1, p)` with `p` mean-zero.
    pub fn stokes_step(
        &self,
        u_n: &EdgeVectorField,
        f_mid: &EdgeVectorField,
        adv_mid: &EdgeVectorField,
        rho: f64,
        mu: f64,
        dt: f64,
    ) -> Result<(EdgeVectorField, CellField)> {
        if !(rho > 0.0) {
            return Err(Error::Parameter {
                name: "rho",
                reason: format!("must be positive, got {rho}"),
            });
        }
        if !(mu >= 0.0) {
            return Err(Error::Parameter {
                name: "mu",
                reason: format!("must be non-negative, got {mu}"),
            });
        }
        if !(dt > 0.0) {
            return Err(Error::Parameter {
                name: "dt",
                reason: format!("must be positive, got {dt}"),
            });
        }
        let g = &self.grid;
        let alpha = rho / dt;
        let half_mu = 0.5 * mu;
        let mut rhs = u_n.scaled(alpha);
        rhs.u.axpy(half_mu, &laplacian(g, &u_n.u));
        rhs.v.axpy(half_mu, &laplacian(g, &u_n.v));
        rhs.axpy(-rho, adv_mid);
        rhs.axpy(1.0, f_mid);

        // div and the Helmholtz operator commute, so div u1 = 0 reduces to
        // a pressure Poisson problem on the explicit right-hand side.
        let mut d = div(g, &rhs);
        d.subtract_mean();
        let p = self.poisson_solve(&d)?;
        rhs.axpy(-1.0, &grad(g, &p));
        let u1 = EdgeVectorField {
            u: self.helmholtz_solve(alpha, half_mu, &rhs.u),
            v: self.helmholtz_solve(alpha, half_mu, &rhs.v),
        };
        Ok((u1, p))
    }
}
