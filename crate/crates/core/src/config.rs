//! Run configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formalize::FormalizeParams;
use crate::loss::{DistanceSpec, LossSpec, Variant};
use crate::net::{NetworkArchitecture, DEFAULT_OMEGA0};
use crate::train::TrainingConfig;

pub const CONFIG_VERSION: u32 = 1;

fn version() -> u32 {
    CONFIG_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub hidden_widths: Vec<usize>,
    pub omega0: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            hidden_widths: vec![128, 128, 128],
            omega0: DEFAULT_OMEGA0,
        }
    }
}

/// Everything needed to reproduce one experiment.
///
/// Only `variant` and `colors` are required; the loss fields sit at the top
/// level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "version")]
    pub format_version: u32,
    pub variant: Variant,
    pub colors: usize,
    #[serde(default = "defaults::dimension")]
    pub dimension: usize,
    #[serde(default = "defaults::box_radius")]
    pub box_radius: f64,
    #[serde(default = "defaults::p_norm")]
    pub p_norm: f64,
    #[serde(default)]
    pub distances: Vec<DistanceSpec>,
    #[serde(default = "defaults::lambda")]
    pub lagrange_lambda: f64,
    #[serde(default = "defaults::sides")]
    pub triangle_sides: [DistanceSpec; 2],
    #[serde(default = "defaults::centers")]
    pub batch_centers: usize,
    #[serde(default = "defaults::peripherals")]
    pub batch_peripherals: usize,
    #[serde(default)]
    pub network: NetworkConfig,
    #[serde(default)]
    pub training: TrainingConfig,
    #[serde(default)]
    pub formalize: FormalizeParams,
    /// Argmax conflict rate below which a run counts as a success.
    #[serde(default = "defaults::threshold")]
    pub success_threshold: f64,
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    use super::*;

    fn base() -> LossSpec {
        LossSpec::new(Variant::Unit, 1)
    }
    pub fn dimension() -> usize {
        base().dimension
    }
    pub fn box_radius() -> f64 {
        base().box_radius
    }
    pub fn p_norm() -> f64 {
        base().p_norm
    }
    pub fn lambda() -> f64 {
        base().lagrange_lambda
    }
    pub fn sides() -> [DistanceSpec; 2] {
        base().triangle_sides
    }
    pub fn centers() -> usize {
        base().batch_centers
    }
    pub fn peripherals() -> usize {
        base().batch_peripherals
    }
    pub fn threshold() -> f64 {
        1e-3
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("runs")
    }
}

impl RunConfig {
    pub fn minimal(variant: Variant, colors: usize) -> Self {
        serde_json::from_value(serde_json::json!({ "variant": variant, "colors": colors }))
            .expect("minimal config always parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<root>".to_string() } else { path };
            Error::config(field, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn loss_spec(&self) -> LossSpec {
        let mut spec = LossSpec::new(self.variant, self.colors);
        spec.dimension = self.dimension;
        spec.box_radius = self.box_radius;
        spec.p_norm = self.p_norm;
        spec.distances = self.distances.clone();
        spec.lagrange_lambda = self.lagrange_lambda;
        spec.triangle_sides = self.triangle_sides;
        spec.batch_centers = self.batch_centers;
        spec.batch_peripherals = self.batch_peripherals;
        spec
    }

    pub fn architecture(&self) -> NetworkArchitecture {
        let spec = self.loss_spec();
        let mut arch =
            NetworkArchitecture::new(self.dimension, self.network.hidden_widths.clone(), spec.output_arity());
        arch.param_ranges = spec.param_ranges();
        arch.omega0 = self.network.omega0;
        arch
    }

    /// Checks every cross-field constraint; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != CONFIG_VERSION {
            return Err(Error::config(
                "format_version",
                format!(
                    "unsupported version {} (expected {CONFIG_VERSION})",
                    self.format_version
                ),
            ));
        }
        if self.colors == 0 {
            return Err(Error::config("colors", "must be at least 1"));
        }
        self.loss_spec().validate().map_err(|e| match e {
            Error::Config { field, message } if field == "num_colors" => Error::Config {
                field: "colors".into(),
                message,
            },
            other => other,
        })?;
        if self.network.hidden_widths.is_empty() || self.network.hidden_widths.contains(&0) {
            return Err(Error::config(
                "network.hidden_widths",
                "needs at least one non-empty layer",
            ));
        }
        if !(self.network.omega0.is_finite() && self.network.omega0 > 0.0) {
            return Err(Error::config("network.omega0", "must be positive"));
        }
        self.architecture()
            .validate()
            .map_err(|e| Error::config("network", e.to_string()))?;
        self.training.validate().map_err(|e| prefix("training", e))?;
        if let Some(res) = &self.formalize.resolution {
            if res.len() != self.dimension || res.contains(&0) {
                return Err(Error::config(
                    "formalize.resolution",
                    format!("needs {} positive entries", self.dimension),
                ));
            }
        }
        if let Some(l) = &self.formalize.lattice {
            if l.dim() != self.dimension {
                return Err(Error::config("formalize.lattice", "dimension differs from the config"));
            }
        }
        if !(0.0..=1.0).contains(&self.success_threshold) {
            return Err(Error::config("success_threshold", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

fn prefix(parent: &str, e: Error) -> Error {
    match e {
        Error::Config { field, message } => Error::Config {
            field: format!("{parent}.{field}"),
            message,
        },
        other => Error::config(parent, other.to_string()),
    }
}
