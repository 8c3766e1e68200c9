//! Lagrangian force error of the equilibrium membrane under marker refinement
//! at a fixed Eulerian grid.

use ibkit::simulation::{fit_slope, run_force_convergence, Experiment, ExperimentConfig, FORCE_LADDER};

fn main() -> ibkit::Result<()> {
    for (kernel, method) in [("bs3bs2", "ib"), ("bs4bs3", "ib"), ("ib4", "ib"), ("ib6", "dfib")] {
        let cfg = ExperimentConfig {
            grid_n: 32,
            t_final: 1.0,
            kernel: kernel.into(),
            method: method.into(),
            ..ExperimentConfig::defaults_for(Experiment::MembraneEq)
        };
        let rows = run_force_convergence(&cfg, &FORCE_LADDER)?;
        let ds: Vec<f64> = rows.iter().map(|r| r.ds).collect();
        let e: Vec<f64> = rows.iter().map(|r| r.force_l2_err).collect();
        let shown: Vec<String> = e.iter().map(|v| format!("{v:.2e}")).collect();
        println!(
            "{kernel:>7} {method:>5}: {} slope {:.2}",
            shown.join(" "),
            fit_slope(&ds, &e)
        );
    }
    Ok(())
}
