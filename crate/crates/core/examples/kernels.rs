//! Evaluate the one-dimensional kernels and check a few of their moments.

use ibkit::kernels::{IbKernel, Kernel1D, KernelChoice};

fn main() -> ibkit::Result<()> {
    let mut kernels: Vec<Kernel1D> = (1..=6).map(Kernel1D::bspline).collect::<ibkit::Result<_>>()?;
    kernels.push(Kernel1D::ib(IbKernel::Ib4));
    kernels.push(Kernel1D::ib(IbKernel::Ib6));

    println!(
        "{:>6} {:>10} {:>10} {:>12} {:>12}",
        "kernel", "phi(0)", "phi(1)", "sum phi", "sum r phi"
    );
    for k in &kernels {
        // integer translates at an arbitrary offset
        let r0 = 0.3;
        let (mut zeroth, mut first) = (0.0, 0.0);
        for i in -5..=5 {
            let r = i as f64 - r0;
            zeroth += k.eval(r);
            first += r * k.eval(r);
        }
        println!(
            "{:>6} {:>10.6} {:>10.6} {:>12.3e} {:>12.3e}",
            k.name(),
            k.eval(0.0),
            k.eval(1.0),
            zeroth - 1.0,
            first
        );
    }

    println!();
    for choice in KernelChoice::ALL {
        println!(
            "{:>7}: isotropic {:<5} smoothness C^{}",
            choice.to_string(),
            choice.is_isotropic(),
            choice.smoothness()
        );
    }
    Ok(())
}
