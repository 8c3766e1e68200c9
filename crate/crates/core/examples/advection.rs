//! Tracers on a circle advected through a Taylor-Green flow: mean relative
//! area error against the time step for a few kernels.

use ibkit::simulation::{fit_slope, run_advection_test, Experiment, ExperimentConfig};

fn main() -> ibkit::Result<()> {
    let fracs = [8.0, 16.0, 32.0];
    for (kernel, method) in [("bs2bs1", "ib"), ("bs4bs3", "ib"), ("ib4", "ib"), ("ib6", "dfib")] {
        let mut dts = Vec::new();
        let mut errs = Vec::new();
        for &dt_frac in &fracs {
            let cfg = ExperimentConfig {
                kernel: kernel.into(),
                method: method.into(),
                dt_frac,
                ..ExperimentConfig::defaults_for(Experiment::Advect)
            };
            let res = run_advection_test(&cfg)?;
            dts.push(cfg.dt()?);
            errs.push(res.mean_error);
        }
        let shown: Vec<String> = errs.iter().map(|e| format!("{e:.3e}")).collect();
        println!(
            "{kernel:>7} {method:>5}: {} slope {:.2}",
            shown.join(" "),
            fit_slope(&dts, &errs)
        );
    }
    Ok(())
}
