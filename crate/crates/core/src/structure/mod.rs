//! Lagrangian curves, elastic forces, tracers and area auditing.

mod area;
mod vec2;

pub use area::{area_green, AreaAudit, PeriodicSpline, TracerSet};
pub use vec2::Vec2;

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Closed chain of `M` markers sampled uniformly in `s in [0, 2 pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub positions: Vec<Vec2>,
}

impl Curve {
    pub fn new(positions: Vec<Vec2>) -> Result<Self> {
        if positions.len() < 4 {
            return Err(Error::Parameter {
                name: "markers",
                reason: format!("need at least 4, got {}", positions.len()),
            });
        }
        Ok(Self { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Parameter increment `2 pi / M`.
    pub fn ds(&self) -> f64 {
        2.0 * PI / self.positions.len() as f64
    }

    /// Parameter samples `s_k = k ds`.
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        let ds = self.ds();
        (0..self.len()).map(move |k| k as f64 * ds)
    }
}

/// Number of markers giving spacing `m_fac * h` on a circle of radius `r`.
pub fn marker_count(r: f64, m_fac: f64, h: f64) -> usize {
    ((2.0 * PI * r / (m_fac * h)).round() as usize).max(4)
}

/// Points `center + r (cos s, sin s)` at `m` uniform parameter values.
pub fn circle_points(center: Vec2, r: f64, m: usize) -> Vec<Vec2> {
    let ds = 2.0 * PI / m as f64;
    (0..m)
        .map(|k| {
            let s = k as f64 * ds;
            center + Vec2::new(s.cos(), s.sin()) * r
        })
        .collect()
}

pub fn init_circle(center: Vec2, r: f64, m: usize) -> Result<Curve> {
    if !(r > 0.0) {
        return Err(Error::Parameter {
            name: "radius",
            reason: format!("must be positive, got {r}"),
        });
    }
    Curve::new(circle_points(center, r, m))
}

/// Points of the curve `(L/2, L/2) + r (1 + eps cos(p s)) (cos s, sin s)`.
pub fn perturbed_circle_points(l: f64, r: f64, eps: f64, p: u32, m: usize) -> Vec<Vec2> {
    let c = Vec2::new(0.5 * l, 0.5 * l);
    let ds = 2.0 * PI / m as f64;
    (0..m)
        .map(|k| {
            let s = k as f64 * ds;
            let rad = r * (1.0 + eps * (p as f64 * s).cos());
            c + Vec2::new(s.cos(), s.sin()) * rad
        })
        .collect()
}

pub fn init_perturbed_circle(l: f64, r: f64, eps: f64, p: u32, m: usize) -> Result<Curve> {
    if !(r > 0.0) {
        return Err(Error::Parameter {
            name: "radius",
            reason: format!("must be positive, got {r}"),
        });
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Parameter {
            name: "eps",
            reason: format!("must lie in [0, 1), got {eps}"),
        });
    }
    if p < 2 {
        return Err(Error::Parameter {
            name: "mode_p",
            reason: format!("must be at least 2, got {p}"),
        });
    }
    Curve::new(perturbed_circle_points(l, r, eps, p, m))
}

/// Exact area enclosed by the perturbed circle.
pub fn perturbed_circle_area(r: f64, eps: f64, p: f64) -> f64 {
    let a = 2.0 * PI * p;
    r * r * (a * (eps * eps + 2.0) + eps * a.sin() * (eps * a.cos() + 4.0)) / (4.0 * p)
}

/// Time-modulated spring stiffness `kappa0 (1 + 2 tau sin(omega0 t))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpringModel {
    pub kappa0: f64,
    pub tau: f64,
    pub omega0: f64,
}

impl SpringModel {
    pub fn new(kappa0: f64, tau: f64, omega0: f64) -> Result<Self> {
        if !(kappa0 > 0.0) {
            return Err(Error::Parameter {
                name: "kappa0",
                reason: format!("must be positive, got {kappa0}"),
            });
        }
        if !(0.0..0.5).contains(&tau) {
            return Err(Error::Parameter {
                name: "tau",
                reason: format!("must lie in [0, 1/2) to keep the stiffness positive, got {tau}"),
            });
        }
        if !omega0.is_finite() {
            return Err(Error::Parameter {
                name: "omega0",
                reason: "must be finite".into(),
            });
        }
        Ok(Self { kappa0, tau, omega0 })
    }

    pub fn constant(kappa: f64) -> Result<Self> {
        Self::new(kappa, 0.0, 0.0)
    }

    pub fn kappa(&self, t: f64) -> f64 {
        self.kappa0 * (1.0 + 2.0 * self.tau * (self.omega0 * t).sin())
    }
}

/// Zero-rest-length spring force density
/// `F_k = kappa / ds^2 (X_{k+1} + X_{k-1} - 2 X_k)`.
pub fn spring_force(positions: &[Vec2], kappa: f64, ds: f64) -> Vec<Vec2> {
    let m = positions.len();
    assert!(m >= 3, "spring force needs at least three markers");
    let c = kappa / (ds * ds);
    (0..m)
        .map(|k| {
            let prev = positions[(k + m - 1) % m];
            let next = positions[(k + 1) % m];
            (next + prev - positions[k] * 2.0) * c
        })
        .collect()
}

/// Pointwise errors and the grid norm `ds * sqrt(sum |F_k - F_exact_k|^2)`
/// against the equilibrium force `-kappa r n(s_k)`.
pub fn force_error_norms(forces: &[Vec2], kappa: f64, r: f64) -> (Vec<f64>, f64) {
    let m = forces.len();
    let ds = 2.0 * PI / m as f64;
    let errs: Vec<f64> = forces
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let s = k as f64 * ds;
            let exact = Vec2::new(s.cos(), s.sin()) * (-kappa * r);
            (f - exact).norm()
        })
        .collect();
    let l2 = ds * errs.iter().map(|e| e * e).sum::<f64>().sqrt();
    (errs, l2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_markers() {
        let c = init_circle(Vec2::ZERO, 1.0, 4).unwrap();
        let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (p, e) in c.positions.iter().zip(expected) {
            assert!((p.x - e.0).abs() < 1e-15 && (p.y - e.1).abs() < 1e-15);
        }
        assert!(init_circle(Vec2::ZERO, 1.0, 3).is_err());
        assert!(init_circle(Vec2::ZERO, 0.0, 8).is_err());
        assert_eq!(marker_count(0.25, 0.5, 1.0 / 64.0), 201);
    }

    #[test]
    fn unperturbed_is_circle() {
        let c = init_perturbed_circle(5.0, 1.0, 0.0, 2, 64).unwrap();
        for p in &c.positions {
            assert!(((*p - Vec2::new(2.5, 2.5)).norm() - 1.0).abs() < 1e-14);
        }
        assert!(init_perturbed_circle(5.0, 1.0, 0.05, 1, 64).is_err());
        assert!(init_perturbed_circle(5.0, 1.0, 1.0, 2, 64).is_err());
    }

    #[test]
    fn perturbed_area_formula() {
        let a = perturbed_circle_area(1.0, 0.05, 2.0);
        assert!((a - PI * (1.0 + 0.05f64.powi(2) / 2.0)).abs() < 1e-14);
        assert!((a - 3.1455197).abs() < 1e-7);
    }

    #[test]
    fn spring_models() {
        let s = SpringModel::new(10.0, 0.4, 10.0).unwrap();
        assert_eq!(s.kappa(0.0), 10.0);
        let t = PI / 20.0;
        assert!((s.kappa(t) - 18.0).abs() < 1e-12);
        assert!(SpringModel::new(10.0, 0.5, 10.0).is_err());
        assert!(SpringModel::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn spring_force_properties() {
        let line: Vec<Vec2> = (0..5).map(|k| Vec2::new(k as f64 * 0.1, 0.2 * k as f64)).collect();
        let f = spring_force(&line, 3.0, 0.1);
        for fk in &f[1..4] {
            assert!(fk.norm() < 1e-12);
        }

        let (r, kappa, m) = (0.25, 1.0, 128);
        let c = init_circle(Vec2::new(0.5, 0.5), r, m).unwrap();
        let ds = c.ds();
        let f = spring_force(&c.positions, kappa, ds);
        let mag = kappa * 2.0 * r / (ds * ds) * (1.0 - ds.cos());
        let mut total = Vec2::ZERO;
        for (k, (fk, s)) in f.iter().zip(c.params()).enumerate() {
            let n = Vec2::new(s.cos(), s.sin());
            assert!((fk.norm() - mag).abs() < 1e-11, "marker {k}");
            assert!(fk.dot(n) < 0.0);
            // the second difference amplifies position roundoff by kappa / ds^2
            assert!(fk.cross(n).abs() < 8.0 * f64::EPSILON * kappa * r / (ds * ds));
            total += *fk * ds;
        }
        assert!(total.norm() < 1e-13);

        let (errs, l2) = force_error_norms(&f, kappa, r);
        let deficit = (mag - kappa * r).abs();
        for e in &errs {
            assert!((e - deficit).abs() < 1e-12);
        }
        assert!((l2 - ds * (m as f64).sqrt() * deficit).abs() < 1e-12);
    }

    #[test]
    fn force_norm_of_exact_and_offset() {
        let m = 32;
        let ds = 2.0 * PI / m as f64;
        let exact: Vec<Vec2> = (0..m)
            .map(|k| Vec2::new((k as f64 * ds).cos(), (k as f64 * ds).sin()) * -0.25)
            .collect();
        let (e, l2) = force_error_norms(&exact, 1.0, 0.25);
        assert!(e.iter().all(|&x| x < 1e-15) && l2 < 1e-15);
        let off = Vec2::new(0.3, -0.4);
        let shifted: Vec<Vec2> = exact.iter().map(|&f| f + off).collect();
        let (e, l2) = force_error_norms(&shifted, 1.0, 0.25);
        assert!(e.iter().all(|&x| (x - 0.5).abs() < 1e-14));
        assert!((l2 - ds * (m as f64).sqrt() * 0.5).abs() < 1e-13);
    }
}
