//! Time integration of the coupled fluid–structure system and the
//! experiment drivers built on it.

mod config;
mod experiments;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::*;

use std::f64::consts::PI;

use crate::coupling::Coupler;
use crate::error::{Error, Result};
use crate::macgrid::{convective, div, EdgeVectorField, GridSpec};
use crate::structure::{spring_force, Curve, SpringModel, Vec2};

/// Relative bound on the discrete divergence after every step.
pub const DIV_TOL: f64 = 1e-10;
/// Relative bound on the in-run energy pairing `sum u.f h^2 = sum U.F ds`.
pub const PAIRING_TOL: f64 = 1e-11;

/// Everything that evolves during a run.
#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub step: usize,
    pub u: EdgeVectorField,
    pub curve: Curve,
    /// Force-free area tracers; may be empty.
    pub tracers: Vec<Vec2>,
    /// Convective term of the previous step, absent before the first step.
    pub prev_adv: Option<EdgeVectorField>,
    pub rho: f64,
    pub mu: f64,
    pub dt: f64,
}

impl SimState {
    /// Fluid at rest around `curve`.
    pub fn at_rest(grid: &GridSpec, curve: Curve, tracers: Vec<Vec2>, rho: f64, mu: f64, dt: f64) -> Result<Self> {
        for (name, v) in [("rho", rho), ("dt", dt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::Parameter {
                name: "mu",
                reason: format!("must be non-negative, got {mu}"),
            });
        }
        Ok(Self {
            t: 0.0,
            step: 0,
            u: EdgeVectorField::zeros(grid.n()),
            curve,
            tracers,
            prev_adv: None,
            rho,
            mu,
            dt,
        })
    }
}

/// Diagnostics of one completed step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    /// `max |div u| h` after the step, relative to the larger of `max |u|`
    /// (old and new) and `dt max |f| / rho`.
    pub divergence: f64,
    /// Relative mismatch of `sum (u^{n+1} + u^n).f h^2` and the
    /// corresponding Lagrangian sum.
    pub pairing: f64,
    /// Largest marker displacement in the step.
    pub max_displacement: f64,
}

fn advance(base: &[Vec2], vel: &[Vec2], scale: f64) -> Vec<Vec2> {
    base.iter().zip(vel).map(|(&x, &u)| x + u * scale).collect()
}

/// One step of the semi-implicit scheme: midpoint marker predictor,
/// force spreading at the midpoint, Crank–Nicolson/AB2 fluid solve (a
/// Heun-type RK2 bootstrap on the first step) and midpoint corrector.
pub fn fsi_step(state: &mut SimState, coupler: &Coupler, spring: &SpringModel) -> Result<StepReport> {
    let grid = *coupler.grid();
    let dt = state.dt;
    let (rho, mu) = (state.rho, state.mu);
    let ds = state.curve.ds();
    let fail = |step: usize, t: f64, reason: String| Error::Unstable { step, t, reason };

    let interp_n = coupler.interpolant(&state.u)?;
    let x_half = advance(&state.curve.positions, &interp_n.at(&state.curve.positions), 0.5 * dt);
    let tr_half = advance(&state.tracers, &interp_n.at(&state.tracers), 0.5 * dt);

    let forces = spring_force(&x_half, spring.kappa(state.t + 0.5 * dt), ds);
    let f = coupler.spread(&forces, &x_half, ds)?;

    let solver = coupler.solver();
    let adv_n = convective(&grid, &state.u);
    let adv_mid = match &state.prev_adv {
        Some(prev) => {
            let mut a = adv_n.scaled(1.5);
            a.axpy(-0.5, prev);
            a
        }
        None => {
            let (provisional, _) = solver.stokes_step(&state.u, &f, &adv_n, rho, mu, dt)?;
            let mut a = adv_n.scaled(0.5);
            a.axpy(0.5, &convective(&grid, &provisional));
            a
        }
    };
    let (u_next, _p) = solver.stokes_step(&state.u, &f, &adv_mid, rho, mu, dt)?;
    if !u_next.is_finite() {
        return Err(fail(state.step + 1, state.t + dt, "non-finite velocity".into()));
    }

    let sum = &u_next + &state.u;
    let interp_sum = coupler.interpolant(&sum)?;
    let vel_half = interp_sum.at(&x_half);
    let x_next = advance(&state.curve.positions, &vel_half, 0.5 * dt);
    let tr_next = advance(&state.tracers, &interp_sum.at(&tr_half), 0.5 * dt);

    let h2 = grid.h() * grid.h();
    let euler: f64 = sum.dot(&f) * h2;
    let lagr: f64 = vel_half.iter().zip(&forces).map(|(u, f)| u.dot(*f)).sum::<f64>() * ds;
    let scale = (sum
        .u
        .data()
        .iter()
        .zip(f.u.data())
        .map(|(a, b)| (a * b).abs())
        .sum::<f64>()
        + sum
            .v
            .data()
            .iter()
            .zip(f.v.data())
            .map(|(a, b)| (a * b).abs())
            .sum::<f64>())
        * h2;
    let pairing = if scale > 0.0 { (euler - lagr).abs() / scale } else { 0.0 };

    // roundoff in the projection scales with the size of the update, which
    // can dwarf a nearly quiescent velocity
    let vscale = u_next.max_abs().max(state.u.max_abs()).max(dt * f.max_abs() / rho);
    let divergence = if vscale > 0.0 {
        div(&grid, &u_next).max_abs() * grid.h() / vscale
    } else {
        0.0
    };

    let mut max_disp: f64 = 0.0;
    for (a, b) in x_next.iter().zip(&state.curve.positions) {
        if !a.is_finite() {
            return Err(fail(state.step + 1, state.t + dt, "non-finite marker position".into()));
        }
        max_disp = max_disp.max((*a - *b).norm());
    }
    if max_disp > grid.l() {
        return Err(fail(
            state.step + 1,
            state.t + dt,
            format!("marker moved {max_disp} in one step"),
        ));
    }
    if tr_next.iter().any(|p| !p.is_finite()) {
        return Err(fail(state.step + 1, state.t + dt, "non-finite tracer position".into()));
    }
    if divergence > DIV_TOL {
        return Err(Error::Invariant {
            step: state.step + 1,
            what: format!("relative divergence {divergence:e}"),
        });
    }
    if pairing > PAIRING_TOL {
        return Err(Error::Invariant {
            step: state.step + 1,
            what: format!("energy pairing mismatch {pairing:e}"),
        });
    }

    state.prev_adv = Some(adv_n);
    state.u = u_next;
    state.curve.positions = x_next;
    state.tracers = tr_next;
    state.step += 1;
    state.t = state.step as f64 * dt;
    Ok(StepReport {
        divergence,
        pairing,
        max_displacement: max_disp,
    })
}

/// Taylor-Green velocity with mean flow `(1, 1)` and viscous decay rate
/// `nu = mu / rho`, sampled at the MAC edges.
pub fn taylor_green(grid: &GridSpec, t: f64, nu: f64) -> EdgeVectorField {
    let n = grid.n();
    let h = grid.h();
    let amp = 2.0 * (-8.0 * PI * PI * nu * t).exp();
    let phase = |z: f64| 2.0 * PI * (z - t);
    let cos_node: Vec<f64> = (0..n).map(|i| phase(i as f64 * h).cos()).collect();
    let sin_mid: Vec<f64> = (0..n).map(|i| phase((i as f64 + 0.5) * h).sin()).collect();
    let mut w = EdgeVectorField::zeros(n);
    for j in 0..n {
        for i in 0..n {
            // u at (i h, (j+1/2) h), v at ((i+1/2) h, j h)
            w.u[(i, j)] = 1.0 + amp * sin_mid[j] * cos_node[i];
            w.v[(i, j)] = 1.0 - amp * cos_node[j] * sin_mid[i];
        }
    }
    w
}

/// Continuous Taylor-Green velocity at a point.
pub fn taylor_green_at(p: Vec2, t: f64, nu: f64) -> Vec2 {
    let amp = 2.0 * (-8.0 * PI * PI * nu * t).exp();
    let (x, y) = (2.0 * PI * (p.x - t), 2.0 * PI * (p.y - t));
    Vec2::new(1.0 + amp * y.sin() * x.cos(), 1.0 - amp * y.cos() * x.sin())
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points");
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Thread pool for parameter sweeps, sized by `IBKIT_THREADS` when set.
pub fn sweep_pool() -> rayon::ThreadPool {
    let threads = std::env::var("IBKIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction")
}
