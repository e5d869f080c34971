//! Experiment configuration: one JSON document per run.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::special::FracParams;
use crate::spectral::Domain;

/// Initial datum f. Written in the config as a string: `sin`, `bump`,
/// `psi_<k>` (k-th eigenfunction, from 1) or the path of a two-column table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum InitialCondition {
    Sin,
    Bump,
    Psi(usize),
    Table(String),
}

impl FromStr for InitialCondition {
    type Err = FracError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sin" => return Ok(InitialCondition::Sin),
            "bump" => return Ok(InitialCondition::Bump),
            "" => return Err(FracError::Config("initial_condition is empty".into())),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("psi_") {
            return match k.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(InitialCondition::Psi(k)),
                _ => Err(FracError::Config(format!("bad eigenfunction index in `{s}`"))),
            };
        }
        Ok(InitialCondition::Table(s.to_string()))
    }
}

impl TryFrom<String> for InitialCondition {
    type Error = FracError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<InitialCondition> for String {
    fn from(ic: InitialCondition) -> String {
        ic.to_string()
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Sin => write!(f, "sin"),
            InitialCondition::Bump => write!(f, "bump"),
            InitialCondition::Psi(k) => write!(f, "psi_{k}"),
            InitialCondition::Table(p) => write!(f, "{p}"),
        }
    }
}

fn default_n_paths() -> usize {
    10_000
}
fn default_n_modes() -> usize {
    256
}
fn default_mesh_size() -> usize {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub beta: f64,
    pub domain: Domain,
    pub initial_condition: InitialCondition,
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// Monte Carlo paths per (t, x); 0 skips the Monte Carlo column.
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    /// Operational-time step; null means 1e-3 t^beta.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    /// Interior nodes of the finite-element mesh (alpha < 2 only).
    #[serde(default = "default_mesh_size")]
    pub mesh_size: usize,
    /// CSV/JSON destination; null writes to standard output.
    #[serde(default)]
    pub output_path: Option<String>,
    /// `eigs` writes the eigensystem here; `solve`, `mc` and `residual` read it if set.
    #[serde(default)]
    pub eigensystem_path: Option<String>,
    /// Binary per-path records from the Monte Carlo runs.
    #[serde(default)]
    pub records_path: Option<String>,
    /// Also measure the dt-bias of every Monte Carlo cell by halving dt.
    #[serde(default)]
    pub mc_bias: bool,
}

impl ExperimentConfig {
    /// The `--print-config` template, every field explicit.
    pub fn template() -> Self {
        ExperimentConfig {
            alpha: 1.5,
            beta: 0.8,
            domain: Domain::Interval([0.0, std::f64::consts::PI]),
            initial_condition: InitialCondition::Psi(1),
            times: vec![0.1, 0.5, 1.0],
            points: vec![vec![std::f64::consts::FRAC_PI_2]],
            n_paths: default_n_paths(),
            dt: None,
            seed: 0,
            n_modes: default_n_modes(),
            mesh_size: default_mesh_size(),
            output_path: None,
            eigensystem_path: None,
            records_path: None,
            mc_bias: false,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| FracError::Config(format!("config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FracError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn params(&self) -> Result<FracParams> {
        FracParams::new(self.alpha, self.beta)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.domain.validate()?;
        if self.times.is_empty() {
            return Err(FracError::Config("times is empty".into()));
        }
        for &t in &self.times {
            if !(t > 0.0 && t.is_finite()) {
                return Err(FracError::param("t", t, "times must be positive and finite"));
            }
        }
        if self.points.is_empty() {
            return Err(FracError::Config("points is empty".into()));
        }
        for p in &self.points {
            self.domain.require_contains(p)?;
        }
        if self.n_paths != 0 && self.n_paths < 100 {
            return Err(FracError::param(
                "n_paths",
                self.n_paths as f64,
                "must be 0 or at least 100",
            ));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(FracError::param("dt", dt, "must be positive"));
            }
        }
        if self.n_modes == 0 {
            return Err(FracError::Config("n_modes must be positive".into()));
        }
        if self.alpha < 2.0 {
            if self.domain.dim() != 1 {
                return Err(FracError::Unsupported(
                    "alpha < 2 needs the finite-element eigensystem, available on intervals only".into(),
                ));
            }
            if self.eigensystem_path.is_none() && self.n_modes > self.mesh_size / 4 {
                return Err(FracError::Config(format!(
                    "n_modes {} exceeds mesh_size/4 = {}",
                    self.n_modes,
                    self.mesh_size / 4
                )));
            }
        }
        if let InitialCondition::Psi(k) = self.initial_condition {
            if k > self.n_modes {
                return Err(FracError::Config(format!("psi_{k} needs n_modes >= {k}")));
            }
        }
        if matches!(self.initial_condition, InitialCondition::Table(_)) && self.domain.dim() != 1 {
            return Err(FracError::Unsupported(
                "tabulated initial conditions are one-dimensional".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"alpha":2,"beta":0.5,"domain":{"interval":[0,3.141592653589793]},
        "initial_condition":"sin","times":[1],"points":[[1.5707963267948966]]}"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json_str(MINIMAL).unwrap();
        assert_eq!(c.n_paths, 10_000);
        assert_eq!(c.dt, None);
        assert_eq!(c.initial_condition, InitialCondition::Sin);
    }

    #[test]
    fn template_round_trips() {
        let t = ExperimentConfig::template();
        let s = serde_json::to_string_pretty(&t).unwrap();
        assert!(s.contains("\"dt\": null"));
        assert_eq!(ExperimentConfig::from_json_str(&s).unwrap(), t);
    }

    #[test]
    fn initial_condition_names() {
        assert_eq!("psi_3".parse::<InitialCondition>().unwrap(), InitialCondition::Psi(3));
        assert!("psi_0".parse::<InitialCondition>().is_err());
        assert_eq!(
            "data/f.csv".parse::<InitialCondition>().unwrap(),
            InitialCondition::Table("data/f.csv".into())
        );
    }

    #[test]
    fn rejections() {
        let outside = MINIMAL.replace("[[1.5707963267948966]]", "[[4.0]]");
        let e = ExperimentConfig::from_json_str(&outside).unwrap_err();
        assert_eq!(e.kind(), "point_outside_domain");
        let bad_beta = MINIMAL.replace("\"beta\":0.5", "\"beta\":1.5");
        assert!(ExperimentConfig::from_json_str(&bad_beta)
            .unwrap_err()
            .is_config_error());
        let unknown = MINIMAL.replace("\"beta\"", "\"gamma\":1,\"beta\"");
        assert!(ExperimentConfig::from_json_str(&unknown).is_err());
        let few = MINIMAL.replace("\"times\"", "\"n_paths\":10,\"times\"");
        assert!(ExperimentConfig::from_json_str(&few).is_err());
    }
}
