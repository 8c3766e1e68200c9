//! Pressurized circular membrane started at equilibrium. Area drift, spurious
//! flow and the Lagrangian force error for several kernels.

use ibkit::simulation::{run_equilibrium_membrane, Experiment, ExperimentConfig};

fn main() -> ibkit::Result<()> {
    println!(
        "{:>12} {:>12} {:>12} {:>12} {:>12}",
        "scheme", "max dA", "max |u|", "max |omega|", "force L2"
    );
    for (kernel, method) in [
        ("ib4", "ib"),
        ("bs2bs1", "ib"),
        ("bs4bs3", "ib"),
        ("bs6bs5", "ib"),
        ("ib6", "dfib"),
    ] {
        let cfg = ExperimentConfig {
            grid_n: 32,
            t_final: 0.5,
            kernel: kernel.into(),
            method: method.into(),
            ..ExperimentConfig::defaults_for(Experiment::MembraneEq)
        };
        let res = run_equilibrium_membrane(&cfg)?;
        let last = res.rows.last().expect("initial row is always present");
        println!(
            "{:>12} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
            format!("{method}:{kernel}"),
            res.max_rel_area_err(),
            last.max_velocity,
            last.max_vorticity,
            res.final_force_l2
        );
    }
    Ok(())
}
