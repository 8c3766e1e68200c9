//! Composite B-spline kernels interpolate a discretely divergence-free field
//! to a continuously divergence-free one; the isotropic IB4 kernel does not.

use ibkit::coupling::{Coupler, Method};
use ibkit::kernels::KernelChoice;
use ibkit::macgrid::GridSpec;
use ibkit::simulation::taylor_green;
use ibkit::Vec2;

fn main() -> ibkit::Result<()> {
    let grid = GridSpec::new(32, 1.0)?;
    let w = taylor_green(&grid, 0.0, 0.1);
    let probes: Vec<Vec2> = (0..500)
        .map(|k| {
            let t = k as f64 * 0.618_033_988_749_894_9;
            Vec2::new(t.fract(), (t * 0.754_877_666_246_692_7).fract())
        })
        .collect();

    let mut schemes: Vec<(Method, KernelChoice)> = KernelChoice::ALL.iter().map(|&k| (Method::StandardIb, k)).collect();
    schemes.push((Method::Dfib, KernelChoice::Ib6));
    println!("{:>10} {:>14}", "scheme", "max |div U|");
    for (method, choice) in schemes {
        let coupler = Coupler::new(method, choice, grid)?;
        let it = coupler.interpolant(&w)?;
        let worst = probes.iter().fold(0.0f64, |m, &p| m.max(it.divergence_at(p).abs()));
        let name = if method == Method::Dfib {
            format!("dfib-{choice}")
        } else {
            choice.to_string()
        };
        println!("{name:>10} {worst:>14.3e}");
    }
    Ok(())
}
