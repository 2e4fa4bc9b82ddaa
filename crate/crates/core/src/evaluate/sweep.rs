use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::argmax_conflict_rate;
use crate::error::{Error, Result};
use crate::loss::{DistanceSpec, LossSpec, Variant};
use crate::net::{ColoringFunction, Network};
use crate::stream::Stream;

/// Tolerance when checking grid values against a trained range.
const RANGE_SLACK: f64 = 1e-12;

/// One or two strictly increasing axes of distance values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceGrid {
    pub axes: Vec<Vec<f64>>,
}

impl DistanceGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        let grid = DistanceGrid { axes };
        grid.validate()?;
        Ok(grid)
    }

    /// `n` evenly spaced values from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.axes.len()) {
            return Err(Error::invalid(format!(
                "a sweep grid needs 1 or 2 axes, got {}",
                self.axes.len()
            )));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            if axis.is_empty() {
                return Err(Error::invalid(format!("sweep axis {i} is empty")));
            }
            if axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::invalid(format!(
                    "sweep axis {i} must be finite and strictly increasing"
                )));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values of the point at row-major `index` (first axis slowest).
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut out = vec![0.0; self.axes.len()];
        for (a, axis) in self.axes.iter().enumerate().rev() {
            out[a] = axis[rest % axis.len()];
            rest /= axis.len();
        }
        out
    }
}

/// Conflict rates over a distance grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: DistanceGrid,
    /// Row-major, first axis slowest.
    pub rates: Vec<f64>,
    pub samples_per_point: usize,
}

impl SweepResult {
    pub fn rate(&self, index: &[usize]) -> f64 {
        let flat = index.iter().zip(self.grid.shape()).fold(0, |acc, (&i, n)| acc * n + i);
        self.rates[flat]
    }

    /// Pointwise minimum of two sweeps over the same grid.
    pub fn min_with(&self, other: &SweepResult) -> Result<SweepResult> {
        if self.grid != other.grid {
            return Err(Error::invalid("sweeps cover different grids"));
        }
        Ok(SweepResult {
            grid: self.grid.clone(),
            rates: self.rates.iter().zip(&other.rates).map(|(a, b)| a.min(*b)).collect(),
            samples_per_point: self.samples_per_point.min(other.samples_per_point),
        })
    }

    /// Pointwise minimum over a non-empty set of sweeps.
    pub fn min_of(sweeps: &[SweepResult]) -> Result<SweepResult> {
        let (first, rest) = sweeps
            .split_first()
            .ok_or_else(|| Error::invalid("no sweeps to aggregate"))?;
        rest.iter().try_fold(first.clone(), |acc, s| acc.min_with(s))
    }

    /// 1D: a row of axis values then a row of rates. 2D: `d1,d2,rate` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        if self.grid.axes.len() == 1 {
            let _ = writeln!(out, "{}", join(&self.grid.axes[0]));
            let _ = writeln!(out, "{}", join(&self.rates));
        } else {
            out.push_str("d1,d2,rate\n");
            for (i, r) in self.rates.iter().enumerate() {
                let p = self.grid.point(i);
                let _ = writeln!(out, "{},{},{}", p[0], p[1], r);
            }
        }
        out
    }
}

/// Copy of `spec` with the ranged distances pinned to `values`, in slot order.
pub fn pin_distances(spec: &LossSpec, values: &[f64]) -> Result<LossSpec> {
    let mut spec = spec.clone();
    let slots: Vec<&mut DistanceSpec> = match spec.variant {
        Variant::OffDiagonal => spec.distances.iter_mut().filter(|d| d.is_ranged()).collect(),
        Variant::Triangle => spec.triangle_sides.iter_mut().filter(|d| d.is_ranged()).collect(),
        _ => Vec::new(),
    };
    if slots.len() != values.len() {
        return Err(Error::invalid(format!(
            "spec has {} ranged distances, got {} values",
            slots.len(),
            values.len()
        )));
    }
    for (slot, &v) in slots.into_iter().zip(values) {
        *slot = DistanceSpec::Range([v, v]);
    }
    Ok(spec)
}

/// Checks `values` against the network's trained input ranges.
pub(crate) fn check_trained_range(network: &Network, values: &[f64]) -> Result<()> {
    let ranges = &network.architecture().param_ranges;
    if ranges.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: ranges.len(),
            actual: values.len(),
        });
    }
    for (s, (&v, r)) in values.iter().zip(ranges).enumerate() {
        if v < r[0] - RANGE_SLACK || v > r[1] + RANGE_SLACK {
            return Err(Error::invalid(format!(
                "distance {v} for input {s} is outside the trained range [{}, {}]",
                r[0], r[1]
            )));
        }
    }
    Ok(())
}

/// Argmax conflict rate at every grid point, with the distance values fed to
/// the network's ranged inputs. Axis `i` drives ranged slot `i`, so the grid
/// must have one axis per slot. Point `i` uses `stream.child(i)`.
pub fn distance_sweep(
    network: &Network,
    spec: &LossSpec,
    grid: &DistanceGrid,
    pair_count: usize,
    stream: &Stream,
) -> Result<SweepResult> {
    grid.validate()?;
    spec.validate()?;
    let slots = spec.param_ranges().len();
    if slots != grid.axes.len() || network.param_count() != slots {
        return Err(Error::invalid(format!(
            "a {}-axis grid needs a spec and network with {} ranged distances (spec has {slots}, network {})",
            grid.axes.len(),
            grid.axes.len(),
            network.param_count()
        )));
    }
    for (s, axis) in grid.axes.iter().enumerate() {
        let r = network.architecture().param_ranges[s];
        let (lo, hi) = (axis[0], axis[axis.len() - 1]);
        if lo < r[0] - RANGE_SLACK || hi > r[1] + RANGE_SLACK {
            return Err(Error::invalid(format!(
                "sweep axis {s} [{lo}, {hi}] leaves the trained range [{}, {}]",
                r[0], r[1]
            )));
        }
    }
    let rates = (0..grid.len())
        .map(|i| {
            let point = grid.point(i);
            let pinned = pin_distances(spec, &point)?;
            argmax_conflict_rate(network, &pinned, pair_count, &stream.child(i as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        grid: grid.clone(),
        rates,
        samples_per_point: pair_count,
    })
}
