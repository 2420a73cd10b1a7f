//! Run configuration: a TOML file with one section per model plus `[sweep]`.
//!
//! Only `[motor]` is required. Every other key has a default, and the keys
//! filled from defaults are listed in `defaults_applied` so the report shows
//! exactly what was assumed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::efficiency::EfficiencyParams;
use crate::geometry::{Architecture, ConstraintParams, MotorSpec};
use crate::mass::{BearingModel, LayoutParams, MaterialSpec, TableError};
use crate::search::{validate_bins, CostWeights, Problem, RatioBin};
use crate::strength::{LoadCase, StrengthParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error(transparent)]
    Bearings(#[from] TableError),
}

fn invalid(section: &str, (field, reason): (&str, String)) -> ConfigError {
    ConfigError::Invalid { field: format!("{section}.{field}"), reason }
}

/// Efficiency section as written in the file; angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EfficiencySection {
    pub friction_coefficient: f64,
    pub pressure_angle_deg: f64,
}

impl Default for EfficiencySection {
    fn default() -> Self {
        let p = EfficiencyParams::default();
        Self { friction_coefficient: p.friction, pressure_angle_deg: p.pressure_angle.to_degrees() }
    }
}

impl EfficiencySection {
    pub fn params(&self) -> EfficiencyParams {
        EfficiencyParams { friction: self.friction_coefficient, pressure_angle: self.pressure_angle_deg.to_radians() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Half-open `[lo, hi)` ratio bins.
    pub bins: Vec<[f64; 2]>,
    pub architectures: Vec<Architecture>,
    /// Bearing CSV, relative to the config file. The embedded table is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bearing_table: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            bins: RatioBin::unit_bins(5, 15).iter().map(|b| [b.lo, b.hi]).collect(),
            architectures: Architecture::ALL.to_vec(),
            bearing_table: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// A published mass to compare against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePoint {
    pub architecture: Architecture,
    pub ratio: f64,
    pub mass_kg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub motor: MotorSpec,
    /// Defaults to the motor's torque and speed limits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<LoadCase>,
    #[serde(default)]
    pub constraints: ConstraintParams,
    #[serde(default)]
    pub efficiency: EfficiencySection,
    #[serde(default)]
    pub strength: StrengthParams,
    #[serde(default)]
    pub materials: MaterialSpec,
    #[serde(default)]
    pub layout: LayoutParams,
    #[serde(default)]
    pub cost: CostWeights,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference: Vec<ReferencePoint>,
    /// Dotted keys that were not in the file.
    #[serde(skip_deserializing)]
    pub defaults_applied: Vec<String>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse { path: path.to_path_buf(), message },
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Parses and validates; relative paths resolve against the working directory.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let parse_err = |e: toml::de::Error| ConfigError::Parse { path: PathBuf::from("<config>"), message: e.to_string() };
        let raw: toml::Table = toml::from_str(text).map_err(parse_err)?;
        let mut cfg: RunConfig = toml::from_str(text).map_err(parse_err)?;
        if cfg.load.is_none() {
            cfg.load = Some(LoadCase { sun_torque_nm: cfg.motor.max_torque_nm, sun_speed_rad_s: cfg.motor.max_speed_rad_s });
        }
        cfg.validate()?;
        let resolved = toml::Table::try_from(&cfg).expect("resolved config serializes");
        let mut applied = Vec::new();
        missing_keys(&resolved, &raw, "", &mut applied);
        applied.retain(|k| k != "defaults_applied");
        cfg.defaults_applied = applied;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.motor.validate().map_err(|e| invalid("motor", e))?;
        self.load_case().validate().map_err(|e| invalid("load", e))?;
        self.constraints.validate().map_err(|e| invalid("constraints", e))?;
        self.efficiency.params().validate().map_err(|e| invalid("efficiency", e))?;
        self.strength.validate().map_err(|e| invalid("strength", e))?;
        self.materials.validate().map_err(|e| invalid("materials", e))?;
        self.layout.validate().map_err(|e| invalid("layout", e))?;
        self.cost.validate().map_err(|e| invalid("cost", e))?;
        validate_bins(&self.bins()).map_err(|reason| invalid("sweep", ("bins", reason)))?;
        if self.sweep.architectures.is_empty() {
            return Err(invalid("sweep", ("architectures", "at least one architecture is required".into())));
        }
        for (i, r) in self.reference.iter().enumerate() {
            if !(r.ratio >= 1.0 && r.mass_kg > 0.0) {
                return Err(ConfigError::Invalid {
                    field: format!("reference[{i}]"),
                    reason: "need ratio >= 1 and a positive mass".into(),
                });
            }
        }
        Ok(())
    }

    pub fn load_case(&self) -> LoadCase {
        self.load.expect("load is resolved on parse")
    }

    pub fn bins(&self) -> Vec<RatioBin> {
        self.sweep.bins.iter().map(|&[lo, hi]| RatioBin::new(lo, hi)).collect()
    }

    /// Requested architectures, deduplicated, in canonical order.
    pub fn architectures(&self) -> Vec<Architecture> {
        Architecture::ALL.into_iter().filter(|a| self.sweep.architectures.contains(a)).collect()
    }

    pub fn bearing_table_path(&self) -> Option<PathBuf> {
        self.sweep.bearing_table.as_ref().map(|p| self.base_dir.join(p))
    }

    pub fn bearing_model(&self) -> Result<BearingModel, ConfigError> {
        match self.bearing_table_path() {
            Some(p) => Ok(BearingModel::from_path(&p)?),
            None => Ok(BearingModel::embedded()),
        }
    }

    pub fn problem(&self) -> Result<Problem, ConfigError> {
        Ok(Problem {
            motor: self.motor.clone(),
            load: self.load_case(),
            constraints: self.constraints.clone(),
            efficiency: self.efficiency.params(),
            strength: self.strength,
            materials: self.materials,
            layout: self.layout.clone(),
            cost: self.cost,
            bearings: self.bearing_model()?,
        })
    }
}

fn missing_keys(resolved: &toml::Table, raw: &toml::Table, prefix: &str, out: &mut Vec<String>) {
    for (k, v) in resolved {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match (v, raw.get(k)) {
            (toml::Value::Table(sub), Some(toml::Value::Table(raw_sub))) => missing_keys(sub, raw_sub, &path, out),
            (toml::Value::Table(sub), None) => missing_keys(sub, &toml::Table::new(), &path, out),
            (_, None) => out.push(path),
            _ => {}
        }
    }
}
