//! Area of closed tracer curves by Green's theorem on periodic cubic splines.

use super::Vec2;

/// Periodic cubic interpolating spline through equispaced samples at unit
/// parameter spacing.
#[derive(Clone, Debug)]
pub struct PeriodicSpline {
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(y: &[f64]) -> Self {
        let n = y.len();
        assert!(n >= 3, "periodic spline needs at least three knots");
        let rhs: Vec<f64> = (0..n)
            .map(|k| 6.0 * (y[(k + 1) % n] - 2.0 * y[k] + y[(k + n - 1) % n]))
            .collect();
        let m = solve_cyclic_141(&rhs);
        Self { y: y.to_vec(), m }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Value on interval `k` at local coordinate `t in [0, 1]`.
    #[inline]
    pub fn eval(&self, k: usize, t: f64) -> f64 {
        let n = self.y.len();
        let (y0, y1) = (self.y[k], self.y[(k + 1) % n]);
        let (m0, m1) = (self.m[k], self.m[(k + 1) % n]);
        let u = 1.0 - t;
        u * y0 + t * y1 + ((u * u * u - u) * m0 + (t * t * t - t) * m1) / 6.0
    }

    #[inline]
    pub fn deriv(&self, k: usize, t: f64) -> f64 {
        let n = self.y.len();
        let (y0, y1) = (self.y[k], self.y[(k + 1) % n]);
        let (m0, m1) = (self.m[k], self.m[(k + 1) % n]);
        let u = 1.0 - t;
        y1 - y0 + ((1.0 - 3.0 * u * u) * m0 + (3.0 * t * t - 1.0) * m1) / 6.0
    }
}

/// Solve the circulant system `x_{k-1} + 4 x_k + x_{k+1} = d_k`
/// (Thomas algorithm with a Sherman–Morrison corner correction).
fn solve_cyclic_141(d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = 1.0;
    let y = thomas(&diag, d);
    let z = thomas(&diag, &u);
    let vy = y[0] + y[n - 1] / gamma;
    let vz = z[0] + z[n - 1] / gamma;
    let f = vy / (1.0 + vz);
    y.iter().zip(&z).map(|(a, b)| a - f * b).collect()
}

/// Tridiagonal solve with unit off-diagonals.
fn thomas(diag: &[f64], d: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    c[0] = 1.0 / diag[0];
    x[0] = d[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - c[i - 1];
        c[i] = 1.0 / denom;
        x[i] = (d[i] - x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Signed area (positive counterclockwise) enclosed by the periodic cubic
/// spline through `points`, computed as the integral of `X dY`.
pub fn area_green(points: &[Vec2]) -> f64 {
    assert!(points.len() >= 8, "area measurement needs at least eight tracers");
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.x).sum::<f64>() / n;
    let xs: Vec<f64> = points.iter().map(|p| p.x - mean_x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    let sx = PeriodicSpline::new(&xs);
    let sy = PeriodicSpline::new(&ys);
    // three-point Gauss-Legendre on [0, 1] integrates the quintic exactly
    let g = 0.5 * (0.6f64).sqrt();
    let nodes = [0.5 - g, 0.5, 0.5 + g];
    let weights = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let mut area = 0.0;
    for k in 0..points.len() {
        for (t, w) in nodes.iter().zip(weights) {
            area += w * sx.eval(k, *t) * sy.deriv(k, *t);
        }
    }
    area
}

/// Force-free markers used only to measure enclosed area.
#[derive(Clone, Debug, PartialEq)]
pub struct TracerSet {
    pub positions: Vec<Vec2>,
    pub multiplier: usize,
}

impl TracerSet {
    pub const START_MULTIPLIER: usize = 4;
    pub const MAX_MULTIPLIER: usize = 64;
    pub const AREA_TOL: f64 = 1e-13;

    /// Choose the smallest multiplier (starting at 4 and doubling, at most
    /// 64) such that the measured initial area matches `exact_area`.
    /// `sample(count)` must return `count` points on the initial curve.
    pub fn select(markers: usize, exact_area: f64, sample: impl Fn(usize) -> Vec<Vec2>) -> Self {
        let mut mult = Self::START_MULTIPLIER;
        loop {
            let positions = sample(mult * markers);
            let err = ((area_green(&positions) - exact_area) / exact_area).abs();
            if err <= Self::AREA_TOL || mult >= Self::MAX_MULTIPLIER {
                return Self {
                    positions,
                    multiplier: mult,
                };
            }
            mult *= 2;
        }
    }

    pub fn area(&self) -> f64 {
        area_green(&self.positions)
    }
}

/// Area history relative to the exact initial area.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaAudit {
    pub a_initial: f64,
    /// `(t, A, dA)` rows
    pub samples: Vec<(f64, f64, f64)>,
}

impl AreaAudit {
    pub fn new(a_initial: f64) -> Self {
        assert!(a_initial > 0.0, "initial area must be positive");
        Self {
            a_initial,
            samples: Vec::new(),
        }
    }

    pub fn relative_area_error(&self, area: f64) -> f64 {
        (area - self.a_initial).abs() / self.a_initial
    }

    /// Record a measurement and return its relative error.
    pub fn record(&mut self, t: f64, area: f64) -> f64 {
        let e = self.relative_area_error(area);
        self.samples.push((t, area, e));
        e
    }

    /// Arithmetic mean of the relative error over samples with `t` in
    /// `[t0, t1]`.
    pub fn mean_relative_area_error(&self, t0: f64, t1: f64) -> f64 {
        let sel: Vec<f64> = self
            .samples
            .iter()
            .filter(|s| s.0 >= t0 && s.0 <= t1)
            .map(|s| s.2)
            .collect();
        if sel.is_empty() {
            return 0.0;
        }
        sel.iter().sum::<f64>() / sel.len() as f64
    }

    pub fn max_relative_area_error(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.2))
    }

    pub fn last_relative_area_error(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.2)
    }
}
