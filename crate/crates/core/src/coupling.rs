//! Transfer between Eulerian MAC fields and Lagrangian markers.
//!
//! Two adjoint interpolation/spreading pairs are provided:
//!
//! * the standard (local) immersed-boundary pair, where each velocity
//!   component is read through its own tensor-product delta, and
//! * the divergence-free pair (DFIB), which interpolates a node-centered
//!   scalar potential `a` with `perp_grad(a) + u0 = w` and spreads through
//!   the curl of the force.
//!
//! Marker positions are never wrapped; grid indices are reduced modulo `N`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::{Component, CompositeDelta, Kernel1D, KernelChoice};
use crate::macgrid::{
    curl, div, perp_grad, Centering, EdgeVectorField, Field, GridSpec, Node, NodeField, SpectralSolver, XEdge, YEdge,
};
use crate::structure::Vec2;

/// Relative tolerance for the discrete divergence accepted by DFIB.
pub const DFIB_DIV_TOL: f64 = 1e-10;

const MAX_STENCIL: usize = 8;

/// Interpolation/spreading method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    StandardIb,
    Dfib,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::StandardIb => "ib",
            Method::Dfib => "dfib",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ib" => Ok(Method::StandardIb),
            "dfib" => Ok(Method::Dfib),
            other => Err(Error::Config(format!("unknown method `{other}` (expected ib or dfib)"))),
        }
    }
}

/// Check that a kernel/method pair is admissible.
pub fn validate_scheme(method: Method, choice: KernelChoice) -> Result<()> {
    if method == Method::Dfib {
        if !choice.is_isotropic() {
            return Err(Error::NotIsotropic(choice.to_string()));
        }
        if choice.smoothness() < 2 {
            return Err(Error::InsufficientSmoothness {
                kernel: choice.to_string(),
                smoothness: choice.smoothness(),
            });
        }
    }
    Ok(())
}

/// One-dimensional stencil: weights `w[m]` for grid index `start + m`.
#[derive(Clone, Copy)]
struct Stencil {
    start: isize,
    len: usize,
    w: [f64; MAX_STENCIL],
    dw: [f64; MAX_STENCIL],
}

impl Stencil {
    /// Weights `kernel(i - s)` and `kernel'(i - s)` for all `i` in the support.
    #[inline]
    fn new(kernel: &Kernel1D, s: f64, with_deriv: bool) -> Self {
        let hw = kernel.support_half_width();
        let start = (s - hw).floor() as isize;
        let len = ((2.0 * hw).ceil() as usize + 1).min(MAX_STENCIL);
        let mut w = [0.0; MAX_STENCIL];
        let mut dw = [0.0; MAX_STENCIL];
        for m in 0..len {
            let r = (start + m as isize) as f64 - s;
            w[m] = kernel.eval(r);
            if with_deriv {
                dw[m] = kernel.deriv(r);
            }
        }
        Self { start, len, w, dw }
    }
}

/// Index-space coordinate of `p` relative to the grid of centering `C`.
#[inline]
fn grid_coords<C: Centering>(h: f64, p: Vec2) -> (f64, f64) {
    (p.x / h - C::OFFSET.0, p.y / h - C::OFFSET.1)
}

/// Wrapped grid indices of a stencil.
#[inline]
fn wrapped(st: &Stencil, n: isize) -> [usize; MAX_STENCIL] {
    let mut idx = [0; MAX_STENCIL];
    for (m, slot) in idx.iter_mut().enumerate().take(st.len) {
        *slot = (st.start + m as isize).rem_euclid(n) as usize;
    }
    idx
}

/// `sum_ij field_ij kx(i - sx) ky(j - sy)`, with optional derivative
/// factors selected per axis.
#[inline]
fn contract<C>(field: &Field<C>, sx: &Stencil, dx: bool, sy: &Stencil, dy: bool) -> f64
where
    C: Centering,
{
    let n = field.n();
    let data = field.data();
    let cols = wrapped(sx, n as isize);
    let rows = wrapped(sy, n as isize);
    let wxs = if dx { &sx.dw } else { &sx.w };
    let mut acc = 0.0;
    for b in 0..sy.len {
        let wy = if dy { sy.dw[b] } else { sy.w[b] };
        if wy == 0.0 {
            continue;
        }
        let row = &data[rows[b] * n..(rows[b] + 1) * n];
        let mut racc = 0.0;
        for a in 0..sx.len {
            racc += wxs[a] * row[cols[a]];
        }
        acc += wy * racc;
    }
    acc
}

#[inline]
fn scatter<C: Centering>(field: &mut Field<C>, sx: &Stencil, dx: bool, sy: &Stencil, dy: bool, value: f64) {
    let n = field.n();
    let cols = wrapped(sx, n as isize);
    let rows = wrapped(sy, n as isize);
    let wxs = if dx { &sx.dw } else { &sx.w };
    let data = field.data_mut();
    for b in 0..sy.len {
        let wy = if dy { sy.dw[b] } else { sy.w[b] } * value;
        if wy == 0.0 {
            continue;
        }
        let row = &mut data[rows[b] * n..(rows[b] + 1) * n];
        for a in 0..sx.len {
            row[cols[a]] += wxs[a] * wy;
        }
    }
}

/// Standard IB interpolation `U_k = sum u_ij delta_h(x_ij - X_k) h^2`.
pub fn ib_interpolate(w: &EdgeVectorField, markers: &[Vec2], delta: &CompositeDelta) -> Vec<Vec2> {
    let h = delta.h;
    let (ux, uy) = delta.axes(Component::X);
    let (vx, vy) = delta.axes(Component::Y);
    markers
        .iter()
        .map(|&p| {
            let (sx, sy) = grid_coords::<XEdge>(h, p);
            let u = contract(
                &w.u,
                &Stencil::new(ux, sx, false),
                false,
                &Stencil::new(uy, sy, false),
                false,
            );
            let (sx, sy) = grid_coords::<YEdge>(h, p);
            let v = contract(
                &w.v,
                &Stencil::new(vx, sx, false),
                false,
                &Stencil::new(vy, sy, false),
                false,
            );
            Vec2::new(u, v)
        })
        .collect()
}

/// Standard IB spreading `f_ij = sum_k F_k delta_h(x_ij - X_k) ds`.
pub fn ib_spread(forces: &[Vec2], markers: &[Vec2], ds: f64, delta: &CompositeDelta, n: usize) -> EdgeVectorField {
    assert_eq!(forces.len(), markers.len(), "one force per marker");
    let h = delta.h;
    let scale = ds / (h * h);
    let (ux, uy) = delta.axes(Component::X);
    let (vx, vy) = delta.axes(Component::Y);
    let mut out = EdgeVectorField::zeros(n);
    for (&p, &f) in markers.iter().zip(forces) {
        let (sx, sy) = grid_coords::<XEdge>(h, p);
        scatter(
            &mut out.u,
            &Stencil::new(ux, sx, false),
            false,
            &Stencil::new(uy, sy, false),
            false,
            f.x * scale,
        );
        let (sx, sy) = grid_coords::<YEdge>(h, p);
        scatter(
            &mut out.v,
            &Stencil::new(vx, sx, false),
            false,
            &Stencil::new(vy, sy, false),
            false,
            f.y * scale,
        );
    }
    out
}

/// Analytic divergence of the standard IB interpolant at `p`.
pub fn ib_interpolant_divergence(w: &EdgeVectorField, p: Vec2, delta: &CompositeDelta) -> f64 {
    let h = delta.h;
    let (ux, uy) = delta.axes(Component::X);
    let (vx, vy) = delta.axes(Component::Y);
    // d/dX kernel(i - X/h) = -kernel'(i - X/h) / h
    let (sx, sy) = grid_coords::<XEdge>(h, p);
    let du = contract(
        &w.u,
        &Stencil::new(ux, sx, true),
        true,
        &Stencil::new(uy, sy, false),
        false,
    );
    let (sx, sy) = grid_coords::<YEdge>(h, p);
    let dv = contract(
        &w.v,
        &Stencil::new(vx, sx, false),
        false,
        &Stencil::new(vy, sy, true),
        true,
    );
    -(du + dv) / h
}

/// Scalar potential of a discretely divergence-free field.
///
/// Returns mean-zero `a` at nodes and the mean flow `u0` with
/// `perp_grad(a) + u0 = w`.
pub fn dfib_potential(grid: &GridSpec, solver: &SpectralSolver, w: &EdgeVectorField) -> Result<(NodeField, Vec2)> {
    let d = div(grid, w).max_abs() * grid.h();
    let scale = w.max_abs();
    if d > DFIB_DIV_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotDivergenceFree(d / scale));
    }
    let omega = curl(grid, w);
    let a = solver.poisson_solve(&omega)?;
    Ok((a, Vec2::new(w.u.mean(), w.v.mean())))
}

/// DFIB interpolation from a precomputed potential:
/// `U_k = u0 + sum a_ij perp_grad_X delta_h(X_k - x_ij) h^2`.
pub fn dfib_interpolate_potential(a: &NodeField, u0: Vec2, markers: &[Vec2], kernel: &Kernel1D, h: f64) -> Vec<Vec2> {
    markers
        .iter()
        .map(|&p| {
            let (sx, sy) = grid_coords::<Node>(h, p);
            let kx = Stencil::new(kernel, sx, true);
            let ky = Stencil::new(kernel, sy, true);
            // with r = (x_ij - X)/h: dA/dY = -sum a k(rx) k'(ry) / h
            let ux = contract(a, &kx, false, &ky, true) / h;
            let uy = -contract(a, &kx, true, &ky, false) / h;
            u0 + Vec2::new(ux, uy)
        })
        .collect()
}

/// DFIB interpolation of a discretely divergence-free field.
pub fn dfib_interpolate(
    grid: &GridSpec,
    solver: &SpectralSolver,
    w: &EdgeVectorField,
    markers: &[Vec2],
    kernel: &Kernel1D,
) -> Result<Vec<Vec2>> {
    check_dfib_kernel(kernel)?;
    let (a, u0) = dfib_potential(grid, solver, w)?;
    Ok(dfib_interpolate_potential(&a, u0, markers, kernel, grid.h()))
}

/// Node field `R = sum_k grad delta_h(x_ij - X_k) x F_k ds`.
pub fn dfib_curl_source(forces: &[Vec2], markers: &[Vec2], ds: f64, kernel: &Kernel1D, grid: &GridSpec) -> NodeField {
    assert_eq!(forces.len(), markers.len(), "one force per marker");
    let h = grid.h();
    let scale = ds / (h * h * h);
    let mut r = NodeField::zeros(grid.n());
    for (&p, &f) in markers.iter().zip(forces) {
        let (sx, sy) = grid_coords::<Node>(h, p);
        let kx = Stencil::new(kernel, sx, true);
        let ky = Stencil::new(kernel, sy, true);
        scatter(&mut r, &kx, true, &ky, false, f.y * scale);
        scatter(&mut r, &kx, false, &ky, true, -f.x * scale);
    }
    r
}

/// DFIB spreading: the divergence-free field with `curl(f) = R` and mean
/// `sum_k F_k ds / |Omega|`.
pub fn dfib_spread(
    forces: &[Vec2],
    markers: &[Vec2],
    ds: f64,
    kernel: &Kernel1D,
    grid: &GridSpec,
    solver: &SpectralSolver,
) -> Result<EdgeVectorField> {
    check_dfib_kernel(kernel)?;
    let mut r = dfib_curl_source(forces, markers, ds, kernel, grid);
    // sum of R h^2 vanishes up to roundoff in the per-marker contributions;
    // drop the residue before solving
    let h = grid.h();
    let contributions = forces.iter().map(|f| f.x.abs() + f.y.abs()).sum::<f64>() * ds / (h * h * h);
    let mean = r.mean();
    if mean.abs() > 1e-10 * contributions {
        return Err(Error::IncompatibleRhs {
            mean,
            norm: contributions,
        });
    }
    r.subtract_mean();
    let psi = solver.poisson_solve(&r)?;
    let mut f = perp_grad(grid, &psi);
    let total = forces.iter().fold(Vec2::ZERO, |acc, &v| acc + v) * ds;
    let f0 = total * (1.0 / grid.area());
    f.u.data_mut().iter_mut().for_each(|x| *x += f0.x);
    f.v.data_mut().iter_mut().for_each(|x| *x += f0.y);
    Ok(f)
}

/// Analytic divergence of the DFIB interpolant at `p`, as the difference of
/// the two mixed partials of the interpolated potential.
pub fn dfib_interpolant_divergence(a: &NodeField, p: Vec2, kernel: &Kernel1D, h: f64) -> f64 {
    let (sx, sy) = grid_coords::<Node>(h, p);
    let kx = Stencil::new(kernel, sx, true);
    let ky = Stencil::new(kernel, sy, true);
    let axy = contract(a, &kx, true, &ky, true);
    let ayx = {
        let mut acc = 0.0;
        let n = a.n() as isize;
        for i in 0..kx.len {
            let col = (kx.start + i as isize).rem_euclid(n);
            let mut cacc = 0.0;
            for j in 0..ky.len {
                let row = (ky.start + j as isize).rem_euclid(n);
                cacc += ky.dw[j] * a.data()[(row * n + col) as usize];
            }
            acc += kx.dw[i] * cacc;
        }
        acc
    };
    // dU_x/dX = -axy / h^2, dU_y/dY = +ayx / h^2
    (ayx - axy) / (h * h)
}

fn check_dfib_kernel(kernel: &Kernel1D) -> Result<()> {
    if kernel.smoothness() < 2 {
        return Err(Error::InsufficientSmoothness {
            kernel: kernel.name(),
            smoothness: kernel.smoothness(),
        });
    }
    Ok(())
}

/// A configured interpolation/spreading pair on a fixed grid.
#[derive(Clone, Debug)]
pub struct Coupler {
    method: Method,
    delta: CompositeDelta,
    grid: GridSpec,
    solver: SpectralSolver,
}

impl Coupler {
    pub fn new(method: Method, choice: KernelChoice, grid: GridSpec) -> Result<Self> {
        validate_scheme(method, choice)?;
        let delta = CompositeDelta::new(choice, grid.h())?;
        Ok(Self {
            method,
            delta,
            grid,
            solver: SpectralSolver::new(grid),
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn delta(&self) -> &CompositeDelta {
        &self.delta
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn solver(&self) -> &SpectralSolver {
        &self.solver
    }

    /// Prepare `w` for repeated interpolation.
    pub fn interpolant(&self, w: &EdgeVectorField) -> Result<Interpolant<'_>> {
        let kind = match self.method {
            Method::StandardIb => Kind::Local(w.clone()),
            Method::Dfib => {
                let (a, u0) = dfib_potential(&self.grid, &self.solver, w)?;
                Kind::Potential(a, u0)
            }
        };
        Ok(Interpolant { coupler: self, kind })
    }

    pub fn interpolate(&self, w: &EdgeVectorField, markers: &[Vec2]) -> Result<Vec<Vec2>> {
        Ok(self.interpolant(w)?.at(markers))
    }

    pub fn spread(&self, forces: &[Vec2], markers: &[Vec2], ds: f64) -> Result<EdgeVectorField> {
        match self.method {
            Method::StandardIb => Ok(ib_spread(forces, markers, ds, &self.delta, self.grid.n())),
            Method::Dfib => dfib_spread(forces, markers, ds, &self.delta.normal, &self.grid, &self.solver),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Local(EdgeVectorField),
    Potential(NodeField, Vec2),
}

/// Continuous velocity field reconstructed from grid data.
#[derive(Clone, Debug)]
pub struct Interpolant<'a> {
    coupler: &'a Coupler,
    kind: Kind,
}

impl Interpolant<'_> {
    pub fn at(&self, markers: &[Vec2]) -> Vec<Vec2> {
        let c = self.coupler;
        match &self.kind {
            Kind::Local(w) => ib_interpolate(w, markers, &c.delta),
            Kind::Potential(a, u0) => dfib_interpolate_potential(a, *u0, markers, &c.delta.normal, c.grid.h()),
        }
    }

    pub fn divergence_at(&self, p: Vec2) -> f64 {
        let c = self.coupler;
        match &self.kind {
            Kind::Local(w) => ib_interpolant_divergence(w, p, &c.delta),
            Kind::Potential(a, _) => dfib_interpolant_divergence(a, p, &c.delta.normal, c.grid.h()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::IbKernel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_markers(rng: &mut ChaCha8Rng, m: usize, l: f64) -> Vec<Vec2> {
        (0..m)
            .map(|_| Vec2::new(rng.gen_range(-l..2.0 * l), rng.gen_range(-l..2.0 * l)))
            .collect()
    }

    fn random_div_free(rng: &mut ChaCha8Rng, g: &GridSpec) -> EdgeVectorField {
        let n = g.n();
        let a = NodeField::from_vec(n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let mut w = perp_grad(g, &a);
        let (u0, v0) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        w.u.data_mut().iter_mut().for_each(|x| *x += u0);
        w.v.data_mut().iter_mut().for_each(|x| *x += v0);
        w
    }

    #[test]
    fn method_parsing_and_validation() {
        assert_eq!("DFIB".parse::<Method>().unwrap(), Method::Dfib);
        assert!("foo".parse::<Method>().is_err());
        assert!(validate_scheme(Method::Dfib, KernelChoice::Ib6).is_ok());
        let e = validate_scheme(Method::Dfib, KernelChoice::Ib4).unwrap_err();
        assert!(e.to_string().contains("DFIB requires C² kernel"));
        assert!(validate_scheme(Method::Dfib, KernelChoice::Composite(4)).is_err());
        for c in KernelChoice::ALL {
            assert!(validate_scheme(Method::StandardIb, c).is_ok());
        }
    }

    #[test]
    fn constants_reproduced() {
        let g = GridSpec::new(16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = EdgeVectorField::constant(16, 0.25, -0.5);
        let markers = random_markers(&mut rng, 20, 1.0);
        for c in KernelChoice::ALL {
            let cp = Coupler::new(Method::StandardIb, c, g).unwrap();
            for u in cp.interpolate(&w, &markers).unwrap() {
                assert!((u.x - 0.25).abs() < 1e-14 && (u.y + 0.5).abs() < 1e-14, "{c}");
            }
        }
        let cp = Coupler::new(Method::Dfib, KernelChoice::Ib6, g).unwrap();
        for u in cp.interpolate(&w, &markers).unwrap() {
            assert!((u.x - 0.25).abs() < 1e-14 && (u.y + 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn marker_on_edge_reads_edge_value() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let h = g.h();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let w = random_div_free(&mut rng, &g);
        let d = CompositeDelta::new(KernelChoice::Composite(1), h).unwrap();
        let p = Vec2::new(3.0 * h, 5.5 * h);
        let u = ib_interpolate(&w, &[p], &d)[0];
        assert!((u.x - w.u[(3, 5)]).abs() < 1e-15);

        let f = ib_spread(&[Vec2::new(1.0, 0.0)], &[p], 0.1, &d, 8);
        let nonzero: Vec<f64> = f.u.data().iter().copied().filter(|&x| x != 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((f.u[(3, 5)] - 0.1 / (h * h)).abs() < 1e-12);
    }

    #[test]
    fn linear_fields_reproduced() {
        let g = GridSpec::new(32, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // linear in x away from the seam
        let w = EdgeVectorField::from_fn(&g, |x, y| (2.0 * x - 0.3, 0.5 * y + 0.1));
        for k in 2..=5 {
            let d = CompositeDelta::new(KernelChoice::Composite(k), g.h()).unwrap();
            for _ in 0..50 {
                let p = Vec2::new(rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7));
                let u = ib_interpolate(&w, &[p], &d)[0];
                assert!((u.x - (2.0 * p.x - 0.3)).abs() < 1e-12);
                assert!((u.y - (0.5 * p.y + 0.1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn standard_pair_is_adjoint_and_conserves_force() {
        let g = GridSpec::new(16, 1.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for c in KernelChoice::ALL {
            let cp = Coupler::new(Method::StandardIb, c, g).unwrap();
            let markers = random_markers(&mut rng, 30, g.l());
            let forces: Vec<Vec2> = (0..30)
                .map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let ds = 0.05;
            let w = EdgeVectorField {
                u: Field::from_vec(16, (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect()),
                v: Field::from_vec(16, (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect()),
            };
            let f = cp.spread(&forces, &markers, ds).unwrap();
            let h2 = g.h() * g.h();
            let lhs = w.dot(&f) * h2;
            let rhs: f64 = cp
                .interpolate(&w, &markers)
                .unwrap()
                .iter()
                .zip(&forces)
                .map(|(u, f)| u.dot(*f))
                .sum::<f64>()
                * ds;
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{c}");
            let total = forces.iter().fold(Vec2::ZERO, |a, &b| a + b) * ds;
            assert!((f.u.data().iter().sum::<f64>() * h2 - total.x).abs() < 1e-12);
            assert!((f.v.data().iter().sum::<f64>() * h2 - total.y).abs() < 1e-12);
        }
    }

    #[test]
    fn dfib_potential_reconstructs_field() {
        let g = GridSpec::new(16, 1.0).unwrap();
        let s = SpectralSolver::new(g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = random_div_free(&mut rng, &g);
        let (a, u0) = dfib_potential(&g, &s, &w).unwrap();
        let mut back = perp_grad(&g, &a);
        back.u.data_mut().iter_mut().for_each(|x| *x += u0.x);
        back.v.data_mut().iter_mut().for_each(|x| *x += u0.y);
        assert!((&back - &w).max_abs() <= 1e-11 * w.max_abs());
        assert!(a.mean().abs() < 1e-13);

        let bad = EdgeVectorField::from_fn(&g, |x, _| ((2.0 * PI * x).sin(), 0.0));
        assert!(matches!(dfib_potential(&g, &s, &bad), Err(Error::NotDivergenceFree(_))));
    }

    #[test]
    fn dfib_spread_is_curl_consistent_and_adjoint() {
        let g = GridSpec::new(32, 1.0).unwrap();
        let s = SpectralSolver::new(g);
        let k = Kernel1D::ib(IbKernel::Ib6);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let markers = random_markers(&mut rng, 25, 1.0);
            let forces: Vec<Vec2> = (0..25)
                .map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let ds = 0.03;
            let f = dfib_spread(&forces, &markers, ds, &k, &g, &s).unwrap();
            let r = dfib_curl_source(&forces, &markers, ds, &k, &g);
            let c = curl(&g, &f);
            assert!((&c - &r).max_abs() <= 1e-11 * r.max_abs());
            assert!(div(&g, &f).max_abs() <= 1e-11 * r.max_abs());

            let w = random_div_free(&mut rng, &g);
            let lhs = w.dot(&f) * g.h() * g.h();
            let u = dfib_interpolate(&g, &s, &w, &markers, &k).unwrap();
            let rhs: f64 = u.iter().zip(&forces).map(|(u, f)| u.dot(*f)).sum::<f64>() * ds;
            assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(rhs.abs()));
        }
        let zero = dfib_spread(&[Vec2::ZERO; 3], &random_markers(&mut rng, 3, 1.0), 0.1, &k, &g, &s).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn dfib_rejects_rough_kernels() {
        let g = GridSpec::new(16, 1.0).unwrap();
        let s = SpectralSolver::new(g);
        let k = Kernel1D::ib(IbKernel::Ib4);
        let w = EdgeVectorField::zeros(16);
        assert!(dfib_interpolate(&g, &s, &w, &[Vec2::ZERO], &k).is_err());
        assert!(dfib_spread(&[Vec2::ZERO], &[Vec2::ZERO], 0.1, &k, &g, &s).is_err());
    }

    #[test]
    fn dfib_approximates_smooth_field_at_second_order() {
        // interpolation error against the continuous field under refinement
        let field = |x: f64, y: f64| {
            (
                (2.0 * PI * x).sin() * (2.0 * PI * y).cos(),
                -(2.0 * PI * x).cos() * (2.0 * PI * y).sin(),
            )
        };
        let p = [Vec2::new(0.31, 0.77), Vec2::new(0.52, 0.13), Vec2::new(0.9, 0.45)];
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let g = GridSpec::new(n, 1.0).unwrap();
            let cp = Coupler::new(Method::Dfib, KernelChoice::Ib6, g).unwrap();
            let w = EdgeVectorField::from_fn(&g, field);
            let u = cp.interpolate(&w, &p).unwrap();
            let e = u.iter().zip(&p).map(|(u, q)| {
                let (ex, ey) = field(q.x, q.y);
                (u.x - ex).hypot(u.y - ey)
            });
            errs.push(e.fold(0.0, f64::max));
        }
        for pair in errs.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((3.0..5.0).contains(&ratio), "ratio {ratio} from {errs:?}");
        }
    }

    #[test]
    fn composite_interpolant_is_divergence_free() {
        let g = GridSpec::new(16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let w = random_div_free(&mut rng, &g);
        for k in 2..=5 {
            let cp = Coupler::new(Method::StandardIb, KernelChoice::Composite(k), g).unwrap();
            let it = cp.interpolant(&w).unwrap();
            for _ in 0..200 {
                let p = Vec2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                assert!(it.divergence_at(p).abs() <= 1e-11 * w.max_abs() / g.h());
            }
        }
        let cp = Coupler::new(Method::Dfib, KernelChoice::Ib6, g).unwrap();
        let it = cp.interpolant(&w).unwrap();
        let p = Vec2::new(0.4, 0.6);
        assert!(it.divergence_at(p).abs() <= 1e-10);
    }
}
