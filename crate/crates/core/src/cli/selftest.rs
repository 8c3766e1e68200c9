//! Quick invariant suite behind `ibkit selftest`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coupling::{Coupler, Method};
use crate::error::Result;
use crate::kernels::KernelChoice;
use crate::macgrid::{
    curl, div, grad, laplacian, perp_grad, CellField, EdgeVectorField, Field, GridSpec, NodeField, SpectralSolver,
};
use crate::simulation::{fsi_step, taylor_green, SimState};
use crate::structure::{area_green, circle_points, init_circle, Curve, SpringModel, Vec2};

/// Outcome of one self-test check.
#[derive(Clone, Debug)]
pub struct SelftestCase {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn case(name: &'static str, value: Result<f64>, tol: f64) -> SelftestCase {
    match value {
        Ok(v) => SelftestCase {
            name,
            passed: v <= tol,
            detail: format!("{v:.3e} (tolerance {tol:.0e})"),
        },
        Err(e) => SelftestCase {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_edge(rng: &mut ChaCha8Rng, n: usize) -> EdgeVectorField {
    EdgeVectorField {
        u: Field::from_vec(n, random_vec(rng, n * n)),
        v: Field::from_vec(n, random_vec(rng, n * n)),
    }
}

fn random_markers(rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec2> {
    (0..count)
        .map(|_| Vec2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
        .collect()
}

fn operator_identities(rng: &mut ChaCha8Rng) -> Result<f64> {
    let g = GridSpec::new(32, 1.0)?;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let p = CellField::from_vec(32, random_vec(rng, 32 * 32));
        let a = NodeField::from_vec(32, random_vec(rng, 32 * 32));
        worst = worst.max(curl(&g, &grad(&g, &p)).max_abs());
        worst = worst.max(div(&g, &perp_grad(&g, &a)).max_abs());
        worst = worst.max((&curl(&g, &perp_grad(&g, &a)) - &laplacian(&g, &a)).max_abs() * g.h() * g.h());
    }
    Ok(worst)
}

fn adjointness(rng: &mut ChaCha8Rng) -> Result<f64> {
    let g = GridSpec::new(32, 1.0)?;
    let mut schemes: Vec<(Method, KernelChoice)> = KernelChoice::ALL.iter().map(|&k| (Method::StandardIb, k)).collect();
    schemes.push((Method::Dfib, KernelChoice::Ib6));
    let mut worst: f64 = 0.0;
    for (method, choice) in schemes {
        let c = Coupler::new(method, choice, g)?;
        let markers = random_markers(rng, 40);
        let forces: Vec<Vec2> = random_markers(rng, 40)
            .into_iter()
            .map(|p| p - Vec2::new(0.5, 0.5))
            .collect();
        let ds = 2.0 * PI / 40.0;
        let mut w = random_edge(rng, 32);
        if method == Method::Dfib {
            let a = NodeField::from_vec(32, random_vec(rng, 32 * 32));
            w = perp_grad(&g, &a);
        }
        let lhs = w.dot(&c.spread(&forces, &markers, ds)?) * g.h() * g.h();
        let rhs: f64 = c
            .interpolate(&w, &markers)?
            .iter()
            .zip(&forces)
            .map(|(u, f)| u.dot(*f))
            .sum::<f64>()
            * ds;
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
    }
    Ok(worst)
}

fn composite_divergence(rng: &mut ChaCha8Rng) -> Result<f64> {
    let g = GridSpec::new(32, 1.0)?;
    let w = taylor_green(&g, 0.1, 0.1);
    let mut worst: f64 = 0.0;
    for k in 2..=5 {
        let c = Coupler::new(Method::StandardIb, KernelChoice::Composite(k), g)?;
        let it = c.interpolant(&w)?;
        for p in random_markers(rng, 100) {
            worst = worst.max(it.divergence_at(p).abs());
        }
    }
    Ok(worst)
}

fn poisson_round_trip(rng: &mut ChaCha8Rng) -> Result<f64> {
    let g = GridSpec::new(32, 1.0)?;
    let solver = SpectralSolver::new(g);
    let mut p = CellField::from_vec(32, random_vec(rng, 32 * 32));
    p.subtract_mean();
    let back = solver.poisson_solve(&laplacian(&g, &p))?;
    Ok((&back - &p).max_abs())
}

fn spline_area() -> Result<f64> {
    let a = area_green(&circle_points(Vec2::new(0.5, 0.5), 0.25, 4096));
    Ok((a - PI / 16.0).abs() / (PI / 16.0))
}

fn membrane_steps() -> Result<f64> {
    let g = GridSpec::new(32, 1.0)?;
    let c = Coupler::new(Method::Dfib, KernelChoice::Ib6, g)?;
    let center = Vec2::new(0.5, 0.5);
    let tracers = circle_points(center, 0.25, 1024);
    let a0 = area_green(&tracers);
    let mut s = SimState::at_rest(&g, init_circle(center, 0.25, 64)?, tracers, 1.0, 0.1, g.h() / 8.0)?;
    let spring = SpringModel::constant(1.0)?;
    for _ in 0..10 {
        fsi_step(&mut s, &c, &spring)?;
    }
    Ok((area_green(&s.tracers) - a0).abs() / a0)
}

fn rest_is_steady() -> Result<f64> {
    let g = GridSpec::new(16, 1.0)?;
    let c = Coupler::new(Method::StandardIb, KernelChoice::Composite(3), g)?;
    // coincident markers carry no spring force
    let curve = Curve::new(vec![Vec2::new(0.3, 0.4); 8])?;
    let tracers = circle_points(Vec2::new(0.5, 0.5), 0.25, 128);
    let mut s = SimState::at_rest(&g, curve, tracers.clone(), 1.0, 0.1, g.h() / 8.0)?;
    let spring = SpringModel::constant(1.0)?;
    for _ in 0..5 {
        fsi_step(&mut s, &c, &spring)?;
    }
    Ok(s.tracers
        .iter()
        .zip(&tracers)
        .fold(0.0, |m, (a, b)| m.max((*a - *b).norm())))
}

/// Run every check with a fixed seed.
pub fn selftest() -> Vec<SelftestCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    vec![
        case("operator identities", operator_identities(&mut rng), 1e-12),
        case("interpolation/spreading adjointness", adjointness(&mut rng), 1e-11),
        case(
            "composite interpolant divergence",
            composite_divergence(&mut rng),
            1e-11,
        ),
        case("spectral Poisson round trip", poisson_round_trip(&mut rng), 1e-12),
        case("spline area of a circle", spline_area(), 1e-13),
        case("DFIB membrane area over ten steps", membrane_steps(), 1e-11),
        case("markers at rest without force", rest_is_steady(), 1e-12),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_cases_pass() {
        for c in selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
