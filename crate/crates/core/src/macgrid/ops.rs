//! Discrete vector calculus on the periodic MAC grid.

use super::field::{Centering, EdgeVectorField, Field};
use super::{CellField, GridSpec, NodeField};

#[inline]
fn neighbours(n: usize) -> (Vec<usize>, Vec<usize>) {
    let plus = (0..n).map(|i| (i + 1) % n).collect();
    let minus = (0..n).map(|i| (i + n - 1) % n).collect();
    (plus, minus)
}

/// Backward-difference gradient, cells to edges.
pub fn grad(grid: &GridSpec, p: &CellField) -> EdgeVectorField {
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let (_, m) = neighbours(n);
    let mut out = EdgeVectorField::zeros(n);
    for j in 0..n {
        for i in 0..n {
            let c = p[(i, j)];
            out.u[(i, j)] = (c - p[(m[i], j)]) * inv_h;
            out.v[(i, j)] = (c - p[(i, m[j])]) * inv_h;
        }
    }
    out
}

/// Divergence, edges to cells.
pub fn div(grid: &GridSpec, w: &EdgeVectorField) -> CellField {
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let (p, _) = neighbours(n);
    let mut out = CellField::zeros(n);
    for j in 0..n {
        for i in 0..n {
            out[(i, j)] = (w.u[(p[i], j)] - w.u[(i, j)] + w.v[(i, p[j])] - w.v[(i, j)]) * inv_h;
        }
    }
    out
}

/// Scalar curl `dv/dx - du/dy`, edges to nodes.
pub fn curl(grid: &GridSpec, w: &EdgeVectorField) -> NodeField {
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let (_, m) = neighbours(n);
    let mut out = NodeField::zeros(n);
    for j in 0..n {
        for i in 0..n {
            out[(i, j)] = (w.v[(i, j)] - w.v[(m[i], j)] - w.u[(i, j)] + w.u[(i, m[j])]) * inv_h;
        }
    }
    out
}

/// Perpendicular gradient `(-da/dy, da/dx)`, nodes to edges.
pub fn perp_grad(grid: &GridSpec, a: &NodeField) -> EdgeVectorField {
    let n = grid.n();
    let inv_h = 1.0 / grid.h();
    let (p, _) = neighbours(n);
    let mut out = EdgeVectorField::zeros(n);
    for j in 0..n {
        for i in 0..n {
            let c = a[(i, j)];
            out.u[(i, j)] = (c - a[(i, p[j])]) * inv_h;
            out.v[(i, j)] = (a[(p[i], j)] - c) * inv_h;
        }
    }
    out
}

/// Five-point Laplacian at the field's own centering.
pub fn laplacian<C: Centering>(grid: &GridSpec, f: &Field<C>) -> Field<C> {
    let n = grid.n();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let (p, m) = neighbours(n);
    let mut out = Field::zeros(n);
    for j in 0..n {
        for i in 0..n {
            out[(i, j)] = (f[(p[i], j)] + f[(m[i], j)] + f[(i, p[j])] + f[(i, m[j])] - 4.0 * f[(i, j)]) * inv_h2;
        }
    }
    out
}

/// Advective-form convective term `(u . grad) u` with centered differences
/// and four-point averages for the cross-component velocity.
pub fn convective(grid: &GridSpec, w: &EdgeVectorField) -> EdgeVectorField {
    let n = grid.n();
    let scale = 0.5 / grid.h();
    let (p, m) = neighbours(n);
    let (u, v) = (&w.u, &w.v);
    let mut out = EdgeVectorField::zeros(n);
    for j in 0..n {
        for i in 0..n {
            let v_bar = 0.25 * (v[(m[i], j)] + v[(i, j)] + v[(m[i], p[j])] + v[(i, p[j])]);
            out.u[(i, j)] = scale * (u[(i, j)] * (u[(p[i], j)] - u[(m[i], j)]) + v_bar * (u[(i, p[j])] - u[(i, m[j])]));
            let u_bar = 0.25 * (u[(i, m[j])] + u[(i, j)] + u[(p[i], j)] + u[(p[i], m[j])]);
            out.v[(i, j)] = scale * (u_bar * (v[(p[i], j)] - v[(m[i], j)]) + v[(i, j)] * (v[(i, p[j])] - v[(i, m[j])]));
        }
    }
    out
}

/// Domain-averaged velocity `(1/|Omega|) sum u h^2`.
pub fn mean_flow(w: &EdgeVectorField) -> [f64; 2] {
    [w.u.mean(), w.v.mean()]
}
