//! Experiment drivers. Each returns its diagnostic series; writing them to
//! disk is left to the caller.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{fsi_step, sweep_pool, taylor_green, ExperimentConfig, SimState};
use crate::coupling::{dfib_curl_source, Coupler, Method};
use crate::error::{Error, Result};
use crate::kernels::KernelChoice;
use crate::macgrid::{curl, EdgeVectorField, Field, GridSpec, XEdge, YEdge};
use crate::structure::{
    area_green, circle_points, force_error_norms, init_circle, marker_count, perturbed_circle_area,
    perturbed_circle_points, spring_force, AreaAudit, Curve, SpringModel, TracerSet, Vec2,
};

fn coupler_for(cfg: &ExperimentConfig) -> Result<Coupler> {
    cfg.validate()?;
    Coupler::new(cfg.method_kind()?, cfg.kernel_choice()?, cfg.grid()?)
}

fn step_count(t_final: f64, dt: f64) -> usize {
    (t_final / dt).round() as usize
}

fn tracers_for(cfg: &ExperimentConfig, markers: usize, exact: f64, sample: impl Fn(usize) -> Vec<Vec2>) -> Vec<Vec2> {
    match cfg.tracer_multiplier {
        None => TracerSet::select(markers, exact, sample).positions,
        Some(0) => Vec::new(),
        Some(k) => sample(k * markers),
    }
}

// ---------------------------------------------------------------------------
// advection

/// `dt_frac` ladder of the advection study, `dt = h/8 ... h/512`.
pub const ADVECT_DT_FRACS: [f64; 7] = [8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0];

/// Area history of tracers advected through the Taylor-Green flow.
#[derive(Clone, Debug)]
pub struct AdvectionResult {
    pub audit: AreaAudit,
    /// Mean relative area error over `t in [0, 1]`.
    pub mean_error: f64,
    pub tracer_count: usize,
}

/// Advect tracers on a circle through the sampled Taylor-Green field with
/// the explicit midpoint rule and the configured interpolation.
pub fn run_advection_test(cfg: &ExperimentConfig) -> Result<AdvectionResult> {
    let coupler = coupler_for(cfg)?;
    let grid = *coupler.grid();
    let dt = cfg.dt()?;
    let nu = cfg.mu / cfg.rho;
    let r = cfg.radius;
    let center = Vec2::new(0.5 * grid.l(), 0.5 * grid.l());
    let exact = PI * r * r;
    let markers = marker_count(r, cfg.mfac, grid.h());
    let mut x = tracers_for(cfg, markers, exact, |n| circle_points(center, r, n));
    if x.is_empty() {
        return Err(Error::Config("advection test needs tracers".into()));
    }
    let mut audit = AreaAudit::new(exact);
    audit.record(0.0, area_green(&x));
    let steps = step_count(cfg.t_final, dt);
    for k in 0..steps {
        let t = k as f64 * dt;
        let u0 = coupler.interpolant(&taylor_green(&grid, t, nu))?.at(&x);
        let mid: Vec<Vec2> = x.iter().zip(&u0).map(|(&p, &u)| p + u * (0.5 * dt)).collect();
        let u1 = coupler.interpolant(&taylor_green(&grid, t + 0.5 * dt, nu))?.at(&mid);
        for (p, u) in x.iter_mut().zip(&u1) {
            *p += *u * dt;
        }
        audit.record((k + 1) as f64 * dt, area_green(&x));
    }
    let mean_error = audit.mean_relative_area_error(0.0, 1.0);
    Ok(AdvectionResult {
        audit,
        mean_error,
        tracer_count: x.len(),
    })
}

// ---------------------------------------------------------------------------
// membranes

/// One row of the membrane diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembraneRow {
    pub step: usize,
    pub t: f64,
    pub rel_area_err: f64,
    pub max_vorticity: f64,
    pub max_velocity: f64,
    pub force_l2_err: f64,
}

#[derive(Clone, Debug)]
pub struct MembraneResult {
    pub rows: Vec<MembraneRow>,
    /// `max |curl f|` of the force spread at `t = 0`.
    pub initial_max_curl_f: f64,
    /// Pointwise force errors against `-kappa r n` at the final time.
    pub final_force_errors: Vec<f64>,
    pub final_force_l2: f64,
    pub final_state: SimState,
    pub tracer_count: usize,
}

impl MembraneResult {
    pub fn final_rel_area_err(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.rel_area_err)
    }

    pub fn max_rel_area_err(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.rel_area_err))
    }
}

struct MembraneSetup {
    curve: Curve,
    tracers: Vec<Vec2>,
    exact_area: f64,
    spring: SpringModel,
    /// equilibrium force reference `(kappa, r)`, if any
    reference: Option<(f64, f64)>,
}

fn run_membrane(cfg: &ExperimentConfig, setup: MembraneSetup) -> Result<MembraneResult> {
    let coupler = coupler_for(cfg)?;
    let grid = *coupler.grid();
    let dt = cfg.dt()?;
    let MembraneSetup {
        curve,
        tracers,
        exact_area,
        spring,
        reference,
    } = setup;

    let f0 = coupler.spread(
        &spring_force(&curve.positions, spring.kappa(0.0), curve.ds()),
        &curve.positions,
        curve.ds(),
    )?;
    let initial_max_curl_f = curl(&grid, &f0).max_abs();

    let tracer_count = tracers.len();
    let mut state = SimState::at_rest(&grid, curve, tracers, cfg.rho, cfg.mu, dt)?;
    let audit = AreaAudit::new(exact_area);
    let row = |s: &SimState| -> MembraneRow {
        let rel_area_err = if s.tracers.is_empty() {
            f64::NAN
        } else {
            audit.relative_area_error(area_green(&s.tracers))
        };
        let force_l2_err = match reference {
            Some((kappa, r)) => force_error_norms(&spring_force(&s.curve.positions, kappa, s.curve.ds()), kappa, r).1,
            None => f64::NAN,
        };
        MembraneRow {
            step: s.step,
            t: s.t,
            rel_area_err,
            max_vorticity: curl(&grid, &s.u).max_abs(),
            max_velocity: s.u.max_magnitude(),
            force_l2_err,
        }
    };
    let mut rows = vec![row(&state)];
    for _ in 0..step_count(cfg.t_final, dt) {
        fsi_step(&mut state, &coupler, &spring)?;
        rows.push(row(&state));
    }
    let (final_force_errors, final_force_l2) = match reference {
        Some((kappa, r)) => force_error_norms(&spring_force(&state.curve.positions, kappa, state.curve.ds()), kappa, r),
        None => (Vec::new(), f64::NAN),
    };
    Ok(MembraneResult {
        rows,
        initial_max_curl_f,
        final_force_errors,
        final_force_l2,
        final_state: state,
        tracer_count,
    })
}

/// Pressurized circular membrane started at its equilibrium, fluid at rest.
pub fn run_equilibrium_membrane(cfg: &ExperimentConfig) -> Result<MembraneResult> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let r = cfg.radius;
    let center = Vec2::new(0.5 * grid.l(), 0.5 * grid.l());
    let m = marker_count(r, cfg.mfac, grid.h());
    let exact_area = PI * r * r;
    let tracers = tracers_for(cfg, m, exact_area, |n| circle_points(center, r, n));
    let setup = MembraneSetup {
        curve: init_circle(center, r, m)?,
        tracers,
        exact_area,
        spring: SpringModel::constant(cfg.kappa0)?,
        reference: Some((cfg.kappa0, r)),
    };
    run_membrane(cfg, setup)
}

/// Membrane with time-modulated stiffness started from a perturbed circle.
pub fn run_parametric_membrane(cfg: &ExperimentConfig) -> Result<MembraneResult> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let (l, r, eps, p) = (grid.l(), cfg.radius, cfg.eps, cfg.mode_p);
    let m = marker_count(r, cfg.mfac, grid.h());
    let exact_area = perturbed_circle_area(r, eps, p as f64);
    let tracers = tracers_for(cfg, m, exact_area, |n| perturbed_circle_points(l, r, eps, p, n));
    let setup = MembraneSetup {
        curve: Curve::new(perturbed_circle_points(l, r, eps, p, m))?,
        tracers,
        exact_area,
        spring: SpringModel::new(cfg.kappa0, cfg.tau, cfg.omega0)?,
        reference: None,
    };
    run_membrane(cfg, setup)
}

// ---------------------------------------------------------------------------
// curl of the spread force

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurlRow {
    pub mfac: f64,
    pub ds: f64,
    pub max_curl_f: f64,
}

/// Mesh-factor ladder of the curl-of-force study.
pub const CURL_LADDER: [f64; 6] = [2.0, 1.0, 0.5, 0.25, 0.125, 0.0625];

/// Mesh-factor ladder of the force-convergence study.
pub const FORCE_LADDER: [f64; 4] = [2.0, 1.0, 0.5, 0.25];

fn equilibrium_markers(grid: &GridSpec, r: f64, mfac: f64) -> Result<Curve> {
    let c = Vec2::new(0.5 * grid.l(), 0.5 * grid.l());
    init_circle(c, r, marker_count(r, mfac, grid.h()))
}

/// Spread the spring force of the exact equilibrium circle once for each
/// mesh factor and record the largest nodal curl of the result.
pub fn curl_of_spread_force(cfg: &ExperimentConfig, mfacs: &[f64]) -> Result<Vec<CurlRow>> {
    let coupler = coupler_for(cfg)?;
    let grid = *coupler.grid();
    mfacs
        .iter()
        .map(|&mfac| {
            let curve = equilibrium_markers(&grid, cfg.radius, mfac)?;
            let ds = curve.ds();
            let forces = spring_force(&curve.positions, cfg.kappa0, ds);
            let f = coupler.spread(&forces, &curve.positions, ds)?;
            Ok(CurlRow {
                mfac,
                ds,
                max_curl_f: curl(&grid, &f).max_abs(),
            })
        })
        .collect()
}

/// `max |curl(f) - R|` for the DFIB spread of the equilibrium force, which
/// vanishes by construction.
pub fn dfib_curl_residual(cfg: &ExperimentConfig, mfac: f64) -> Result<f64> {
    let coupler = coupler_for(cfg)?;
    if coupler.method() != Method::Dfib {
        return Err(Error::Config("curl residual is defined for dfib only".into()));
    }
    let grid = *coupler.grid();
    let curve = equilibrium_markers(&grid, cfg.radius, mfac)?;
    let ds = curve.ds();
    let forces = spring_force(&curve.positions, cfg.kappa0, ds);
    let f = coupler.spread(&forces, &curve.positions, ds)?;
    let r = dfib_curl_source(&forces, &curve.positions, ds, &coupler.delta().normal, &grid);
    Ok((&curl(&grid, &f) - &r).max_abs())
}

// ---------------------------------------------------------------------------
// force convergence

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForceRow {
    pub mfac: f64,
    pub ds: f64,
    pub force_l2_err: f64,
}

/// Final-time Lagrangian force error of the equilibrium membrane for each
/// mesh factor, run concurrently.
pub fn run_force_convergence(cfg: &ExperimentConfig, mfacs: &[f64]) -> Result<Vec<ForceRow>> {
    let pool = sweep_pool();
    pool.install(|| {
        mfacs
            .par_iter()
            .map(|&mfac| {
                let c = ExperimentConfig {
                    mfac,
                    tracer_multiplier: Some(0),
                    ..cfg.clone()
                };
                let res = run_equilibrium_membrane(&c)?;
                Ok(ForceRow {
                    mfac,
                    ds: res.final_state.curve.ds(),
                    force_l2_err: res.final_force_l2,
                })
            })
            .collect()
    })
}

// ---------------------------------------------------------------------------
// spurious flow

/// Parameter varied in a spurious-flow sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpuriousSweep {
    /// values are grid sizes `N` on the unit square; reported as `h`
    MeshWidth,
    Stiffness,
    Viscosity,
}

impl SpuriousSweep {
    pub const ALL: [SpuriousSweep; 3] = [
        SpuriousSweep::MeshWidth,
        SpuriousSweep::Stiffness,
        SpuriousSweep::Viscosity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpuriousSweep::MeshWidth => "h",
            SpuriousSweep::Stiffness => "kappa",
            SpuriousSweep::Viscosity => "mu",
        }
    }

    pub fn default_values(&self) -> &'static [f64] {
        match self {
            SpuriousSweep::MeshWidth => &SPURIOUS_GRID_SIZES,
            SpuriousSweep::Stiffness => &SPURIOUS_STIFFNESS,
            SpuriousSweep::Viscosity => &SPURIOUS_VISCOSITY,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpuriousRow {
    pub value: f64,
    pub max_velocity: f64,
    pub max_vorticity: f64,
}

/// Grid sizes of the mesh-width sweep.
pub const SPURIOUS_GRID_SIZES: [f64; 3] = [32.0, 64.0, 128.0];
/// Stiffness values of the stiffness sweep.
pub const SPURIOUS_STIFFNESS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
/// Viscosities of the viscosity sweep.
pub const SPURIOUS_VISCOSITY: [f64; 4] = [0.05, 0.1, 0.2, 0.4];

/// Peak spurious velocity and vorticity of the equilibrium membrane at
/// `cfg.t_final` while one parameter is varied.
pub fn run_spurious_flow_study(
    cfg: &ExperimentConfig,
    sweep: SpuriousSweep,
    values: &[f64],
) -> Result<Vec<SpuriousRow>> {
    let pool = sweep_pool();
    pool.install(|| {
        values
            .par_iter()
            .map(|&v| {
                let mut c = ExperimentConfig {
                    tracer_multiplier: Some(0),
                    ..cfg.clone()
                };
                let value = match sweep {
                    SpuriousSweep::MeshWidth => {
                        c.grid_n = v as usize;
                        c.domain_l / c.grid_n as f64
                    }
                    SpuriousSweep::Stiffness => {
                        c.kappa0 = v;
                        v
                    }
                    SpuriousSweep::Viscosity => {
                        c.mu = v;
                        v
                    }
                };
                let res = run_equilibrium_membrane(&c)?;
                let last = res.rows.last().expect("at least the initial row");
                Ok(SpuriousRow {
                    value,
                    max_velocity: last.max_velocity,
                    max_vorticity: last.max_vorticity,
                })
            })
            .collect()
    })
}

// ---------------------------------------------------------------------------
// local truncation error

/// Single-step integrators for the LTE study.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    ForwardEuler,
    ExplicitMidpoint,
}

impl Integrator {
    pub fn name(&self) -> &'static str {
        match self {
            Integrator::ForwardEuler => "forward-euler",
            Integrator::ExplicitMidpoint => "midpoint",
        }
    }
}

/// Tracer count of the LTE study. A multiple of four, so the circle's
/// extreme points sit on grid lines.
pub const LTE_TRACERS: usize = 1024;

/// Half-decade time-step ladder `1e-1 ... 1e-7` of the LTE study.
pub fn lte_dt_ladder() -> Vec<f64> {
    (0..13).map(|i| 10f64.powf(-1.0 - 0.5 * i as f64)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LteRow {
    pub h: f64,
    pub dt: f64,
    pub area_error: f64,
}

/// Static field `(3 cos(4 pi (y - pi/4)), 2 sin(2 pi (x - pi/4)))` sampled
/// on the MAC grid; discretely divergence-free since `u` depends only on
/// `y` and `v` only on `x`.
pub fn lte_velocity(grid: &GridSpec) -> EdgeVectorField {
    let q = PI / 4.0;
    EdgeVectorField {
        u: Field::<XEdge>::from_fn(grid, |_, y| 3.0 * (4.0 * PI * (y - q)).cos()),
        v: Field::<YEdge>::from_fn(grid, |x, _| 2.0 * (2.0 * PI * (x - q)).sin()),
    }
}

/// Relative area change after one step of `integrator` through the static
/// field interpolated with `kernel`, for every `(N, dt)` pair. The reference
/// is the area of the same tracers before the step.
pub fn run_lte_study(
    integrator: Integrator,
    kernel: KernelChoice,
    grid_sizes: &[usize],
    dts: &[f64],
    tracers: usize,
) -> Result<Vec<LteRow>> {
    let center = Vec2::new(0.5, 0.5);
    let x0 = circle_points(center, 0.25, tracers);
    let a0 = area_green(&x0);
    let mut rows = Vec::new();
    for &n in grid_sizes {
        let grid = GridSpec::new(n, 1.0)?;
        let coupler = Coupler::new(Method::StandardIb, kernel, grid)?;
        let it = coupler.interpolant(&lte_velocity(&grid))?;
        let u0 = it.at(&x0);
        for &dt in dts {
            let x1: Vec<Vec2> = match integrator {
                Integrator::ForwardEuler => x0.iter().zip(&u0).map(|(&p, &u)| p + u * dt).collect(),
                Integrator::ExplicitMidpoint => {
                    let mid: Vec<Vec2> = x0.iter().zip(&u0).map(|(&p, &u)| p + u * (0.5 * dt)).collect();
                    x0.iter().zip(it.at(&mid)).map(|(&p, u)| p + u * dt).collect()
                }
            };
            rows.push(LteRow {
                h: grid.h(),
                dt,
                area_error: ((area_green(&x1) - a0) / a0).abs(),
            });
        }
    }
    Ok(rows)
}
