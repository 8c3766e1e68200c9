//! Spurious velocity and vorticity around the equilibrium membrane as the
//! mesh width, stiffness and viscosity vary.

use ibkit::simulation::{fit_slope, run_spurious_flow_study, Experiment, ExperimentConfig, SpuriousSweep};

fn main() -> ibkit::Result<()> {
    for kernel in ["ib4", "ib6"] {
        let cfg = ExperimentConfig {
            kernel: kernel.into(),
            ..ExperimentConfig::defaults_for(Experiment::Spurious)
        };
        for sweep in SpuriousSweep::ALL {
            let rows = run_spurious_flow_study(&cfg, sweep, sweep.default_values())?;
            let x: Vec<f64> = rows.iter().map(|r| r.value).collect();
            let u: Vec<f64> = rows.iter().map(|r| r.max_velocity).collect();
            let w: Vec<f64> = rows.iter().map(|r| r.max_vorticity).collect();
            println!(
                "{kernel} {:>5}: slope max|u| {:>6.2}, slope max|omega| {:>6.2}",
                sweep.name(),
                fit_slope(&x, &u),
                fit_slope(&x, &w)
            );
        }
    }
    Ok(())
}
