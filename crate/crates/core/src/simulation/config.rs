use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coupling::{validate_scheme, Method};
use crate::error::{Error, Result};
use crate::kernels::KernelChoice;
use crate::macgrid::GridSpec;

/// Experiment families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Advect,
    MembraneEq,
    MembraneParam,
    CurlDiag,
    Spurious,
    Lte,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Advect,
        Experiment::MembraneEq,
        Experiment::MembraneParam,
        Experiment::CurlDiag,
        Experiment::Spurious,
        Experiment::Lte,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Advect => "advect",
            Experiment::MembraneEq => "membrane-eq",
            Experiment::MembraneParam => "membrane-param",
            Experiment::CurlDiag => "curl-diag",
            Experiment::Spurious => "spurious",
            Experiment::Lte => "lte",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Run parameters shared by all experiments. Fields an experiment does not
/// use are ignored by it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid_n: usize,
    pub domain_l: f64,
    /// `dt = h / dt_frac`
    pub dt_frac: f64,
    pub t_final: f64,
    pub kernel: String,
    pub method: String,
    pub mfac: f64,
    pub rho: f64,
    pub mu: f64,
    pub kappa0: f64,
    pub tau: f64,
    pub omega0: f64,
    pub mode_p: u32,
    pub eps: f64,
    pub radius: f64,
    pub out: PathBuf,
    /// Tracers per marker; `None` selects automatically, `Some(0)` disables
    /// area tracking.
    pub tracer_multiplier: Option<usize>,
}

impl ExperimentConfig {
    /// Default parameters of each experiment, at desk-scale resolution.
    pub fn defaults_for(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            grid_n: 64,
            domain_l: 1.0,
            dt_frac: 8.0,
            t_final: 2.0,
            kernel: "bs4bs3".into(),
            method: "ib".into(),
            mfac: 0.5,
            rho: 1.0,
            mu: 0.1,
            kappa0: 1.0,
            tau: 0.0,
            omega0: 0.0,
            mode_p: 2,
            eps: 0.0,
            radius: 0.25,
            out: PathBuf::from("out"),
            tracer_multiplier: None,
        };
        match experiment {
            Experiment::Advect => Self {
                grid_n: 32,
                dt_frac: 64.0,
                t_final: 1.0,
                ..base
            },
            Experiment::MembraneEq => base,
            Experiment::MembraneParam => Self {
                domain_l: 5.0,
                dt_frac: 10.0,
                t_final: 5.0,
                mfac: 1.0,
                mu: 0.15,
                kappa0: 10.0,
                tau: 0.4,
                omega0: 10.0,
                eps: 0.05,
                radius: 1.0,
                ..base
            },
            Experiment::CurlDiag => Self { t_final: 0.0, ..base },
            Experiment::Spurious => Self {
                kernel: "ib4".into(),
                mfac: 0.125,
                t_final: 0.05,
                ..base
            },
            Experiment::Lte => Self {
                grid_n: 32,
                kernel: "bs2bs1".into(),
                t_final: 0.0,
                ..base
            },
        }
    }

    pub fn kernel_choice(&self) -> Result<KernelChoice> {
        self.kernel.parse()
    }

    pub fn method_kind(&self) -> Result<Method> {
        self.method.parse()
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid_n, self.domain_l)
    }

    pub fn dt(&self) -> Result<f64> {
        Ok(self.grid()?.h() / self.dt_frac)
    }

    /// Check every field, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        let choice = self.kernel_choice()?;
        let method = self.method_kind()?;
        validate_scheme(method, choice)?;
        self.grid()?;
        for (name, v) in [
            ("dt_frac", self.dt_frac),
            ("mfac", self.mfac),
            ("rho", self.rho),
            ("mu", self.mu),
            ("kappa0", self.kappa0),
            ("radius", self.radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Parameter {
                name: "t_final",
                reason: format!("must be non-negative, got {}", self.t_final),
            });
        }
        if !(0.0..0.5).contains(&self.tau) {
            return Err(Error::Parameter {
                name: "tau",
                reason: format!("must lie in [0, 1/2), got {}", self.tau),
            });
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::Parameter {
                name: "eps",
                reason: format!("must lie in [0, 1), got {}", self.eps),
            });
        }
        if self.mode_p < 2 {
            return Err(Error::Parameter {
                name: "mode_p",
                reason: format!("must be at least 2, got {}", self.mode_p),
            });
        }
        if !self.omega0.is_finite() {
            return Err(Error::Parameter {
                name: "omega0",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for e in Experiment::ALL {
            ExperimentConfig::defaults_for(e).validate().unwrap();
            assert_eq!(e.as_str().parse::<Experiment>().unwrap(), e);
        }
    }

    #[test]
    fn validation_errors() {
        let mut c = ExperimentConfig::defaults_for(Experiment::MembraneEq);
        c.kernel = "bs4bs3".into();
        c.method = "ib".into();
        c.validate().unwrap();

        c.method = "dfib".into();
        c.kernel = "ib4".into();
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("DFIB requires C² kernel"));

        let mut c = ExperimentConfig::defaults_for(Experiment::MembraneEq);
        c.grid_n = 100;
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("N must be a power of two"));

        let mut c = ExperimentConfig::defaults_for(Experiment::MembraneEq);
        c.kernel = "gauss".into();
        assert!(matches!(c.validate(), Err(Error::UnknownKernel(_))));

        let mut c = ExperimentConfig::defaults_for(Experiment::MembraneEq);
        c.mu = 0.0;
        assert!(c.validate().is_err());
    }
}
