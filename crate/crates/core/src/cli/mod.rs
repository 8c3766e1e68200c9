//! Command-line front end: configuration loading, experiment dispatch and
//! CSV output. The `ibkit` binary only parses arguments and calls [`run`].

mod selftest;

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::coupling::Method;
use crate::error::{Error, Result};
use crate::simulation::{
    curl_of_spread_force, dfib_curl_residual, fit_slope, lte_dt_ladder, run_advection_test, run_equilibrium_membrane,
    run_lte_study, run_parametric_membrane, run_spurious_flow_study, Experiment, ExperimentConfig, Integrator,
    MembraneResult, SpuriousSweep, CURL_LADDER, LTE_TRACERS,
};

pub use selftest::{selftest, SelftestCase};

/// Version tag written into every run manifest.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "ibkit", version, about = "Periodic 2D immersed-boundary experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Advect tracers through a sampled Taylor-Green flow
    Advect(RunArgs),
    /// Pressurized membrane started at equilibrium
    MembraneEq(RunArgs),
    /// Membrane with periodically modulated stiffness
    MembraneParam(RunArgs),
    /// Curl of the spread equilibrium force over a mesh-factor ladder
    CurlDiag(RunArgs),
    /// Spurious-flow sweeps over h, kappa and mu
    Spurious(RunArgs),
    /// Single-step area error of explicit integrators
    Lte(RunArgs),
    /// Run the invariant suite and report pass/fail counts
    Selftest,
}

impl Command {
    pub fn experiment(&self) -> Option<(Experiment, &RunArgs)> {
        match self {
            Command::Advect(a) => Some((Experiment::Advect, a)),
            Command::MembraneEq(a) => Some((Experiment::MembraneEq, a)),
            Command::MembraneParam(a) => Some((Experiment::MembraneParam, a)),
            Command::CurlDiag(a) => Some((Experiment::CurlDiag, a)),
            Command::Spurious(a) => Some((Experiment::Spurious, a)),
            Command::Lte(a) => Some((Experiment::Lte, a)),
            Command::Selftest => None,
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct RunArgs {
    /// TOML file with configuration keys; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Replace existing output files
    #[arg(long)]
    pub overwrite: bool,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Optional configuration values, shared by the flag set and the config
/// file format.
#[derive(Args, Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[arg(skip)]
    pub experiment: Option<Experiment>,
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub domain_l: Option<f64>,
    /// dt = h / dt_frac
    #[arg(long)]
    pub dt_frac: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub mfac: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub kappa0: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub mode_p: Option<u32>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tracers per marker; 0 disables area tracking
    #[arg(long)]
    pub tracer_multiplier: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    cfg.$f = v.clone();
                }
            )*};
        }
        set!(
            kernel, method, grid_n, domain_l, dt_frac, t_final, mfac, rho, mu, kappa0, tau, omega0, mode_p, eps,
            radius, out
        );
        if let Some(k) = self.tracer_multiplier {
            cfg.tracer_multiplier = Some(k);
        }
    }
}

/// Parse a flat TOML document of configuration keys.
pub fn parse_config_file(text: &str) -> Result<Overrides> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Defaults for `experiment`, then the config file, then flags; validated.
pub fn load_config(experiment: Experiment, file: Option<&Path>, flags: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults_for(experiment);
    if let Some(path) = file {
        let text = fs::read_to_string(path)?;
        let o: Overrides = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(e) = o.experiment {
            if e != experiment {
                return Err(Error::Config(format!("config file is for `{e}`, not `{experiment}`")));
            }
        }
        o.apply(&mut cfg);
    }
    flags.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

/// Record of one CLI run, written next to its CSV files.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub output_dir: PathBuf,
    pub schema_version: u32,
    pub files: Vec<String>,
}

/// Full-precision text for a CSV cell.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Run label: the kernel name, prefixed for DFIB.
pub fn run_label(cfg: &ExperimentConfig) -> Result<String> {
    let kernel = cfg.kernel_choice()?.to_string();
    Ok(match cfg.method_kind()? {
        Method::StandardIb => kernel,
        Method::Dfib => format!("dfib-{kernel}"),
    })
}

fn frac_label(f: f64) -> String {
    if f.fract() == 0.0 && f.abs() < 1e15 {
        format!("{}", f as i64)
    } else {
        format!("{f}")
    }
}

/// Output files of one run. Every name is claimed before the experiment
/// starts, so an existing file aborts the run before any work is done.
struct Outputs {
    dir: PathBuf,
    overwrite: bool,
    claimed: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path, overwrite: bool) -> Self {
        Self {
            dir: dir.to_path_buf(),
            overwrite,
            claimed: Vec::new(),
        }
    }

    fn claim(&mut self, names: &[String]) -> Result<()> {
        for name in names {
            let path = self.dir.join(name);
            if path.exists() && !self.overwrite {
                return Err(Error::WouldOverwrite(path));
            }
            self.claimed.push(name.clone());
        }
        Ok(())
    }

    fn write_csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<PathBuf> {
        debug_assert!(self.claimed.iter().any(|c| c == name));
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(path)
    }

    fn write_manifest(&self, name: &str, experiment: Experiment, cfg: &ExperimentConfig) -> Result<PathBuf> {
        let manifest = RunManifest {
            experiment,
            config: cfg.clone(),
            output_dir: self.dir.clone(),
            schema_version: SCHEMA_VERSION,
            files: self.claimed.iter().filter(|c| c.as_str() != name).cloned().collect(),
        };
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        serde_json::to_writer_pretty(File::create(&path)?, &manifest).map_err(|e| Error::Config(e.to_string()))?;
        Ok(path)
    }
}

/// What a run produced, for printing.
#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

/// Dispatch a parsed command line.
pub fn run(cli: &Cli) -> Result<RunReport> {
    let Some((experiment, args)) = cli.command.experiment() else {
        return run_selftest();
    };
    let cfg = load_config(experiment, args.config.as_deref(), &args.overrides)?;
    run_experiment(&cfg, args.overwrite)
}

fn run_selftest() -> Result<RunReport> {
    let cases = selftest();
    let failed = cases.iter().filter(|c| !c.passed).count();
    let mut lines: Vec<String> = cases
        .iter()
        .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect();
    lines.push(format!("{} passed, {} failed", cases.len() - failed, failed));
    if failed > 0 {
        return Err(Error::Invariant {
            step: 0,
            what: lines.join("\n"),
        });
    }
    Ok(RunReport {
        files: Vec::new(),
        lines,
    })
}

/// Run one experiment with a validated configuration and write its output.
pub fn run_experiment(cfg: &ExperimentConfig, overwrite: bool) -> Result<RunReport> {
    cfg.validate()?;
    let mut out = Outputs::new(&cfg.out, overwrite);
    let label = run_label(cfg)?;
    let exp = cfg.experiment;
    let mut report = RunReport::default();
    match exp {
        Experiment::Advect => {
            let stem = format!("advect_{label}_dt{}", frac_label(cfg.dt_frac));
            let csv = format!("{stem}.csv");
            out.claim(&[csv.clone(), format!("{stem}.json")])?;
            let res = run_advection_test(cfg)?;
            let rows = res
                .audit
                .samples
                .iter()
                .enumerate()
                .map(|(k, &(t, a, da))| vec![k.to_string(), num(t), num(a), num(da)]);
            report
                .files
                .push(out.write_csv(&csv, &["step", "t", "area", "rel_area_err"], rows)?);
            report
                .files
                .push(out.write_manifest(&format!("{stem}.json"), exp, cfg)?);
            report.lines.push(format!("tracers: {}", res.tracer_count));
            report
                .lines
                .push(format!("mean relative area error over [0, 1]: {:.6e}", res.mean_error));
        }
        Experiment::MembraneEq => {
            let stem = format!("membrane-eq_{label}");
            let (csv, forces) = (format!("{stem}.csv"), format!("{stem}_forces.csv"));
            out.claim(&[csv.clone(), forces.clone(), format!("{stem}.json")])?;
            let res = run_equilibrium_membrane(cfg)?;
            report.files.push(write_membrane_rows(&out, &csv, &res, true)?);
            let ds = res.final_state.curve.ds();
            let rows = res
                .final_force_errors
                .iter()
                .enumerate()
                .map(|(k, &e)| vec![k.to_string(), num(k as f64 * ds), num(e)]);
            report
                .files
                .push(out.write_csv(&forces, &["k", "s", "force_err"], rows)?);
            report
                .files
                .push(out.write_manifest(&format!("{stem}.json"), exp, cfg)?);
            report.lines.extend(membrane_summary(&res));
            report
                .lines
                .push(format!("final force L2 error: {:.6e}", res.final_force_l2));
        }
        Experiment::MembraneParam => {
            let stem = format!("membrane-param_{label}_dt{}", frac_label(cfg.dt_frac));
            let csv = format!("{stem}.csv");
            out.claim(&[csv.clone(), format!("{stem}.json")])?;
            let res = run_parametric_membrane(cfg)?;
            report.files.push(write_membrane_rows(&out, &csv, &res, false)?);
            report
                .files
                .push(out.write_manifest(&format!("{stem}.json"), exp, cfg)?);
            report.lines.extend(membrane_summary(&res));
        }
        Experiment::CurlDiag => {
            let stem = format!("curl-diag_{label}");
            let csv = format!("{stem}.csv");
            out.claim(&[csv.clone(), format!("{stem}.json")])?;
            let rows = curl_of_spread_force(cfg, &CURL_LADDER)?;
            let ds: Vec<f64> = rows.iter().map(|r| r.ds).collect();
            let c: Vec<f64> = rows.iter().map(|r| r.max_curl_f).collect();
            report.files.push(out.write_csv(
                &csv,
                &["mfac", "ds", "max_curl_f"],
                rows.iter().map(|r| vec![num(r.mfac), num(r.ds), num(r.max_curl_f)]),
            )?);
            report
                .files
                .push(out.write_manifest(&format!("{stem}.json"), exp, cfg)?);
            if c.iter().all(|&v| v > 0.0) {
                report.lines.push(format!(
                    "log-log slope of max |curl f| against ds: {:.3}",
                    fit_slope(&ds, &c)
                ));
            }
            if cfg.method_kind()? == Method::Dfib {
                report
                    .lines
                    .push(format!("max |curl f - R|: {:.3e}", dfib_curl_residual(cfg, cfg.mfac)?));
            }
        }
        Experiment::Spurious => {
            let stem = format!("spurious_{label}");
            let names: Vec<String> = SpuriousSweep::ALL
                .iter()
                .map(|s| format!("{stem}_{}.csv", s.name()))
                .collect();
            let mut all = names.clone();
            all.push(format!("{stem}.json"));
            out.claim(&all)?;
            for (sweep, name) in SpuriousSweep::ALL.iter().zip(&names) {
                let rows = run_spurious_flow_study(cfg, *sweep, sweep.default_values())?;
                let x: Vec<f64> = rows.iter().map(|r| r.value).collect();
                let u: Vec<f64> = rows.iter().map(|r| r.max_velocity).collect();
                let w: Vec<f64> = rows.iter().map(|r| r.max_vorticity).collect();
                report.files.push(
                    out.write_csv(
                        name,
                        &["value", "max_velocity", "max_vorticity"],
                        rows.iter()
                            .map(|r| vec![num(r.value), num(r.max_velocity), num(r.max_vorticity)]),
                    )?,
                );
                report.lines.push(format!(
                    "{:>5} sweep: slope of max|u| {:.3}, slope of max|omega| {:.3}",
                    sweep.name(),
                    fit_slope(&x, &u),
                    fit_slope(&x, &w)
                ));
            }
            report
                .files
                .push(out.write_manifest(&format!("{stem}.json"), exp, cfg)?);
        }
        Experiment::Lte => {
            if cfg.method_kind()? != Method::StandardIb {
                return Err(Error::Config(
                    "the lte study uses standard interpolation; drop --method dfib".into(),
                ));
            }
            let kernel = cfg.kernel_choice()?;
            let integrators = [Integrator::ForwardEuler, Integrator::ExplicitMidpoint];
            let stem = format!("lte_{label}");
            let names: Vec<String> = integrators.iter().map(|i| format!("{stem}_{}.csv", i.name())).collect();
            let mut all = names.clone();
            all.push(format!("{stem}.json"));
            out.claim(&all)?;
            let sizes = [cfg.grid_n, 2 * cfg.grid_n, 4 * cfg.grid_n];
            let dts = lte_dt_ladder();
            for (integ, name) in integrators.iter().zip(&names) {
                let rows = run_lte_study(*integ, kernel, &sizes, &dts, LTE_TRACERS)?;
                report.files.push(out.write_csv(
                    name,
                    &["h", "dt", "area_error"],
                    rows.iter().map(|r| vec![num(r.h), num(r.dt), num(r.area_error)]),
                )?);
                for chunk in rows.chunks(dts.len()) {
                    let k = chunk.len();
                    let tail = &chunk[k - 3..];
                    let x: Vec<f64> = tail.iter().map(|r| r.dt).collect();
                    let y: Vec<f64> = tail.iter().map(|r| r.area_error).collect();
                    report.lines.push(format!(
                        "{} h = {:.6}: small-dt slope {:.3}",
                        integ.name(),
                        chunk[0].h,
                        fit_slope(&x, &y)
                    ));
                }
            }
            report
                .files
                .push(out.write_manifest(&format!("{stem}.json"), exp, cfg)?);
        }
    }
    Ok(report)
}

fn write_membrane_rows(out: &Outputs, name: &str, res: &MembraneResult, with_force: bool) -> Result<PathBuf> {
    let mut header = vec!["step", "t", "rel_area_err", "max_vorticity", "max_velocity"];
    if with_force {
        header.push("force_l2_err");
    }
    let rows = res.rows.iter().map(|r| {
        let mut v = vec![
            r.step.to_string(),
            num(r.t),
            num(r.rel_area_err),
            num(r.max_vorticity),
            num(r.max_velocity),
        ];
        if with_force {
            v.push(num(r.force_l2_err));
        }
        v
    });
    out.write_csv(name, &header, rows)
}

fn membrane_summary(res: &MembraneResult) -> Vec<String> {
    vec![
        format!(
            "markers: {}, tracers: {}",
            res.final_state.curve.len(),
            res.tracer_count
        ),
        format!("final relative area error: {:.6e}", res.final_rel_area_err()),
        format!("max relative area error: {:.6e}", res.max_rel_area_err()),
        format!("initial max |curl f|: {:.6e}", res.initial_max_curl_f),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let o = parse_config_file("kernel = \"bs5bs4\"\ngrid_n = 32\nmu = 0.2\n").unwrap();
        assert_eq!(o.kernel.as_deref(), Some("bs5bs4"));
        assert_eq!(o.grid_n, Some(32));
        let mut cfg = ExperimentConfig::defaults_for(Experiment::MembraneEq);
        o.apply(&mut cfg);
        assert_eq!((cfg.kernel.as_str(), cfg.grid_n, cfg.mu), ("bs5bs4", 32, 0.2));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config_file("kernal = \"bs4bs3\"\n").unwrap_err();
        assert!(err.to_string().contains("kernal"), "{err}");
    }

    #[test]
    fn experiment_key_must_match() {
        let o = parse_config_file("experiment = \"advect\"\n").unwrap();
        assert_eq!(o.experiment, Some(Experiment::Advect));
    }

    #[test]
    fn labels() {
        let mut cfg = ExperimentConfig::defaults_for(Experiment::MembraneEq);
        assert_eq!(run_label(&cfg).unwrap(), "bs4bs3");
        cfg.kernel = "IB6".into();
        cfg.method = "dfib".into();
        assert_eq!(run_label(&cfg).unwrap(), "dfib-ib6");
        assert_eq!(frac_label(64.0), "64");
        assert_eq!(frac_label(2.5), "2.5");
        assert_eq!(num(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn cli_parses_flags() {
        let cli = Cli::try_parse_from([
            "ibkit",
            "advect",
            "--kernel",
            "bs5bs4",
            "--dt-frac",
            "64",
            "--overwrite",
        ])
        .unwrap();
        let (e, a) = cli.command.experiment().unwrap();
        assert_eq!(e, Experiment::Advect);
        assert!(a.overwrite);
        assert_eq!(a.overrides.dt_frac, Some(64.0));
        assert!(Cli::try_parse_from(["ibkit", "advect", "--bogus", "1"]).is_err());
    }
}
