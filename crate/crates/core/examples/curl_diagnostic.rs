//! Curl of the spread equilibrium force as the marker spacing is refined.

use ibkit::simulation::{
    curl_of_spread_force, dfib_curl_residual, fit_slope, Experiment, ExperimentConfig, CURL_LADDER,
};

fn main() -> ibkit::Result<()> {
    for kernel in ["bs2bs1", "bs3bs2", "bs4bs3", "bs5bs4", "bs6bs5", "ib4"] {
        let cfg = ExperimentConfig {
            kernel: kernel.into(),
            ..ExperimentConfig::defaults_for(Experiment::CurlDiag)
        };
        let rows = curl_of_spread_force(&cfg, &CURL_LADDER)?;
        let ds: Vec<f64> = rows.iter().map(|r| r.ds).collect();
        let c: Vec<f64> = rows.iter().map(|r| r.max_curl_f).collect();
        let shown: Vec<String> = c.iter().map(|v| format!("{v:.2e}")).collect();
        println!("{kernel:>7}: {} slope {:.2}", shown.join(" "), fit_slope(&ds, &c));
    }
    let cfg = ExperimentConfig {
        kernel: "ib6".into(),
        method: "dfib".into(),
        ..ExperimentConfig::defaults_for(Experiment::CurlDiag)
    };
    println!("dfib: max |curl f - R| = {:.3e}", dfib_curl_residual(&cfg, 0.5)?);
    Ok(())
}
