//! Discrete vector calculus on the periodic MAC grid and the FFT solvers.

use std::f64::consts::PI;

use ibkit::macgrid::{curl, div, grad, laplacian, perp_grad, CellField, GridSpec, NodeField, SpectralSolver};

fn main() -> ibkit::Result<()> {
    let grid = GridSpec::new(32, 1.0)?;
    let solver = SpectralSolver::new(grid);

    let p = CellField::from_fn(&grid, |x, y| {
        (2.0 * PI * x).sin() * (4.0 * PI * y).cos() + 0.3 * (6.0 * PI * y).sin()
    });
    let a = NodeField::from_fn(&grid, |x, y| (2.0 * PI * (x + y)).cos());

    println!(
        "max |curl grad p|        = {:.3e}",
        curl(&grid, &grad(&grid, &p)).max_abs()
    );
    println!(
        "max |div perp_grad a|    = {:.3e}",
        div(&grid, &perp_grad(&grid, &a)).max_abs()
    );
    let lap = laplacian(&grid, &a);
    println!(
        "max |curl perp_grad a - lap a| = {:.3e}",
        (&curl(&grid, &perp_grad(&grid, &a)) - &lap).max_abs()
    );

    // Poisson round trip on mean-free data
    let back = solver.poisson_solve(&laplacian(&grid, &p))?;
    println!("Poisson round trip error = {:.3e}", (&back - &p).max_abs());

    // one Stokes step from a divergence-free field with no forcing
    let w = perp_grad(&grid, &a);
    let zero = ibkit::macgrid::EdgeVectorField::zeros(grid.n());
    let (u1, _p) = solver.stokes_step(&w, &zero, &zero, 1.0, 0.1, grid.h() / 8.0)?;
    println!(
        "Stokes step: max |u| {:.6} -> {:.6}, max |div u1| = {:.3e}",
        w.max_abs(),
        u1.max_abs(),
        div(&grid, &u1).max_abs()
    );
    Ok(())
}
