//! One-step area error of forward Euler and the explicit midpoint rule when
//! the interpolated velocity is discontinuous (BS2BS1).

use ibkit::kernels::KernelChoice;
use ibkit::simulation::{lte_dt_ladder, run_lte_study, Integrator, LTE_TRACERS};

fn main() -> ibkit::Result<()> {
    let dts = lte_dt_ladder();
    for integ in [Integrator::ForwardEuler, Integrator::ExplicitMidpoint] {
        let rows = run_lte_study(integ, KernelChoice::Composite(1), &[32, 64, 128], &dts, LTE_TRACERS)?;
        println!("{}", integ.name());
        for chunk in rows.chunks(dts.len()) {
            let shown: Vec<String> = chunk
                .iter()
                .step_by(2)
                .map(|r| format!("{:.1e}", r.area_error))
                .collect();
            println!("  h = 1/{:<4} {}", (1.0 / chunk[0].h).round(), shown.join(" "));
        }
    }
    Ok(())
}
