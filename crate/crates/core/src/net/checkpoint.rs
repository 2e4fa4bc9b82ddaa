use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Network, NetworkArchitecture};
use crate::error::{Error, Result};
use crate::geometry::Lattice;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ArchitectureRepr {
    input_dim: usize,
    /// Absent in files that carry no parameter inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spatial_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    param_ranges: Vec<[f64; 2]>,
    hidden_widths: Vec<usize>,
    num_colors: usize,
    omega0: f64,
}

#[derive(Serialize, Deserialize)]
struct CheckpointRepr {
    format_version: u32,
    architecture: ArchitectureRepr,
    #[serde(default)]
    lattice: Option<Lattice>,
    #[serde(default)]
    seed: u64,
    parameters: Vec<f64>,
}

/// Writes `net` as a JSON checkpoint.
pub fn save_checkpoint(net: &Network, path: &Path) -> Result<()> {
    let arch = net.architecture();
    let repr = CheckpointRepr {
        format_version: CHECKPOINT_VERSION,
        architecture: ArchitectureRepr {
            input_dim: arch.input_dim(),
            spatial_dim: (!arch.param_ranges.is_empty()).then_some(arch.spatial_dim),
            param_ranges: arch.param_ranges.clone(),
            hidden_widths: arch.hidden_widths.clone(),
            num_colors: arch.num_colors,
            omega0: arch.omega0,
        },
        lattice: arch.periodic_wrap.clone(),
        seed: net.seed(),
        parameters: net.parameters().to_vec(),
    };
    let text = serde_json::to_string(&repr).map_err(|e| Error::Shape(e.to_string()))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Reads a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: &Path) -> Result<Network> {
    let text = fs::read_to_string(path)?;
    let corrupt = |reason: String| Error::Corrupt {
        path: path.to_path_buf(),
        reason,
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
    let version = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| corrupt("missing format_version".into()))?;
    if version != CHECKPOINT_VERSION as u64 {
        return Err(Error::UnsupportedVersion(version.min(u32::MAX as u64) as u32));
    }
    let repr: CheckpointRepr = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
    let a = repr.architecture;
    let spatial_dim = a.spatial_dim.unwrap_or(a.input_dim);
    if spatial_dim + a.param_ranges.len() != a.input_dim {
        return Err(Error::Shape(format!(
            "input_dim {} does not equal spatial_dim {} plus {} parameter ranges",
            a.input_dim,
            spatial_dim,
            a.param_ranges.len()
        )));
    }
    let arch = NetworkArchitecture {
        spatial_dim,
        param_ranges: a.param_ranges,
        hidden_widths: a.hidden_widths,
        num_colors: a.num_colors,
        omega0: a.omega0,
        periodic_wrap: repr.lattice,
    };
    Network::from_parameters(arch, repr.parameters, repr.seed)
}
