//! TOML run configuration. Unknown keys are rejected everywhere.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::criteria::GNConstants;
use crate::dynamics::{CouplingMatrix, IntegratorConfig, SystemKind, SystemSpec};
use crate::error::{Error, Result};
use crate::experiments::{Datum, Scenario};
use crate::grid::make_grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub points_per_dim: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
    pub gamma: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "default_system")]
    pub system: SystemKind,
    #[serde(default = "one")]
    pub gn_c2: f64,
    #[serde(default = "one")]
    pub gn_c3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt_base: f64,
    #[serde(default = "default_cfl")]
    pub lambda_cfl: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_threshold")]
    pub blowup_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default)]
    pub lambdas: Vec<f64>,
    pub datum: Datum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub write_snapshots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_dir(),
            write_snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub integrator: IntegratorSection,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_system() -> SystemKind {
    SystemKind::Original
}
fn one() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    IntegratorConfig::default().dt_base
}
fn default_cfl() -> f64 {
    IntegratorConfig::default().lambda_cfl
}
fn default_stride() -> usize {
    IntegratorConfig::default().snapshot_stride
}
fn default_threshold() -> f64 {
    IntegratorConfig::default().blowup_threshold
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        make_grid(self.grid.dim, self.grid.points_per_dim, self.grid.half_width).map_err(|e| {
            let key = if !(1..=3).contains(&self.grid.dim) {
                "grid.dim"
            } else if !(self.grid.half_width.is_finite() && self.grid.half_width > 0.0) {
                "grid.half_width"
            } else {
                "grid.points_per_dim"
            };
            Error::config(key, e.to_string())
        })?;

        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be finite (got {v})")))
            }
        };
        let p = &self.physics;
        finite("physics.b11", p.b11)?;
        finite("physics.b12", p.b12)?;
        finite("physics.b22", p.b22)?;
        finite("physics.lambda", p.lambda)?;
        if !(p.gamma.is_finite() && p.gamma > 0.0) {
            return Err(Error::config(
                "physics.gamma",
                format!("must be positive (got {})", p.gamma),
            ));
        }
        GNConstants::new(p.gn_c2, p.gn_c3).map_err(|e| Error::config("physics.gn_c2/gn_c3", e.to_string()))?;

        let i = &self.integrator;
        for (key, v) in [
            ("integrator.t_end", i.t_end),
            ("integrator.dt_base", i.dt_base),
            ("integrator.lambda_cfl", i.lambda_cfl),
            ("integrator.blowup_threshold", i.blowup_threshold),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, format!("must be positive (got {v})")));
            }
        }
        if i.snapshot_stride == 0 {
            return Err(Error::config("integrator.snapshot_stride", "must be at least 1"));
        }

        let lambdas = &self.experiment.lambdas;
        if lambdas.iter().any(|l| !l.is_finite() || *l == 0.0) {
            return Err(Error::config(
                "experiment.lambdas",
                "entries must be finite and nonzero",
            ));
        }
        if lambdas.windows(2).any(|w| w[1].abs() <= w[0].abs()) {
            return Err(Error::config(
                "experiment.lambdas",
                "must be strictly increasing in modulus",
            ));
        }
        let d = &self.experiment.datum;
        d.first
            .validate(self.grid.dim)
            .map_err(|e| Error::config("experiment.datum.first", e.to_string()))?;
        d.second
            .validate(self.grid.dim)
            .map_err(|e| Error::config("experiment.datum.second", e.to_string()))?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn coupling(&self) -> CouplingMatrix {
        CouplingMatrix::new(self.physics.b11, self.physics.b12, self.physics.b22)
    }

    pub fn gn_constants(&self) -> GNConstants {
        GNConstants {
            c2: self.physics.gn_c2,
            c3: self.physics.gn_c3,
        }
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        let i = &self.integrator;
        IntegratorConfig {
            dt_base: i.dt_base,
            t_end: i.t_end,
            snapshot_stride: i.snapshot_stride,
            lambda_cfl: i.lambda_cfl,
            blowup_threshold: i.blowup_threshold,
        }
    }

    pub fn system_spec(&self) -> SystemSpec {
        match self.physics.system {
            SystemKind::Original => SystemSpec::original(self.coupling(), self.physics.lambda, self.physics.gamma),
            SystemKind::Limit => SystemSpec::limit_of(self.coupling(), self.physics.gamma),
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            dim: self.grid.dim,
            points_per_dim: self.grid.points_per_dim,
            half_width: self.grid.half_width,
            coupling: self.coupling(),
            gamma: self.physics.gamma,
            lambda: self.physics.lambda,
            datum: self.experiment.datum.clone(),
            integrator: self.integrator_config(),
        }
    }
}
