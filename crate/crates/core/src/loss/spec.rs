use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::triangle::check_sides;
use crate::net::ColoringFunction;

/// Which constraint family a loss penalizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// No monochromatic pair at distance 1.
    Unit,
    /// Color `k` avoids its own distance `d_k`.
    #[serde(alias = "offdiagonal", alias = "off-diagonal", alias = "offdiag")]
    OffDiagonal,
    /// Unit distance with an extra penalized bonus color.
    Lagrangian,
    /// No monochromatic triangle with sides `(1, a, b)`.
    Triangle,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Unit => "unit",
            Variant::OffDiagonal => "off_diagonal",
            Variant::Lagrangian => "lagrangian",
            Variant::Triangle => "triangle",
        })
    }
}

/// A length that is either fixed or drawn uniformly from a closed range.
///
/// Serialized as a bare number or a `[min, max]` pair. A range with
/// `min == max` is still a range: it occupies a network input slot but always
/// yields the same value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistanceSpec {
    Fixed(f64),
    Range([f64; 2]),
}

impl DistanceSpec {
    pub fn is_ranged(&self) -> bool {
        matches!(self, DistanceSpec::Range(_))
    }

    pub fn bounds(&self) -> [f64; 2] {
        match *self {
            DistanceSpec::Fixed(d) => [d, d],
            DistanceSpec::Range(r) => r,
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        let [lo, hi] = self.bounds();
        if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 {
            return Err(Error::config(
                field,
                format!("distances must be positive and finite, got {lo}..{hi}"),
            ));
        }
        if lo > hi {
            return Err(Error::config(field, format!("range minimum {lo} exceeds maximum {hi}")));
        }
        Ok(())
    }
}

fn default_dimension() -> usize {
    2
}
fn default_radius() -> f64 {
    3.0
}
fn default_p() -> f64 {
    2.0
}
fn default_lambda() -> f64 {
    0.01
}
fn default_sides() -> [DistanceSpec; 2] {
    [DistanceSpec::Fixed(1.0), DistanceSpec::Fixed(1.0)]
}
fn default_centers() -> usize {
    2048
}
fn default_peripherals() -> usize {
    8
}

/// Full description of a training objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    pub variant: Variant,
    pub num_colors: usize,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_radius")]
    pub box_radius: f64,
    #[serde(default = "default_p")]
    pub p_norm: f64,
    /// Per-color distances (off-diagonal variant only); empty means all 1.
    #[serde(default)]
    pub distances: Vec<DistanceSpec>,
    #[serde(default = "default_lambda")]
    pub lagrange_lambda: f64,
    #[serde(default = "default_sides")]
    pub triangle_sides: [DistanceSpec; 2],
    #[serde(default = "default_centers")]
    pub batch_centers: usize,
    #[serde(default = "default_peripherals")]
    pub batch_peripherals: usize,
}

pub const MAX_BATCH: usize = 1 << 20;

impl LossSpec {
    pub fn new(variant: Variant, num_colors: usize) -> Self {
        LossSpec {
            variant,
            num_colors,
            dimension: default_dimension(),
            box_radius: default_radius(),
            p_norm: default_p(),
            distances: Vec::new(),
            lagrange_lambda: default_lambda(),
            triangle_sides: default_sides(),
            batch_centers: default_centers(),
            batch_peripherals: default_peripherals(),
        }
    }

    pub fn with_distances(mut self, distances: Vec<DistanceSpec>) -> Self {
        self.distances = distances;
        self
    }

    pub fn with_batch(mut self, centers: usize, peripherals: usize) -> Self {
        self.batch_centers = centers;
        self.batch_peripherals = peripherals;
        self
    }

    /// Checks every field; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.num_colors == 0 {
            return Err(Error::config("num_colors", "need at least one color"));
        }
        if !(2..=3).contains(&self.dimension) {
            return Err(Error::config(
                "dimension",
                format!("must be 2 or 3, got {}", self.dimension),
            ));
        }
        if !(self.box_radius > 0.0 && self.box_radius.is_finite()) {
            return Err(Error::config(
                "box_radius",
                format!("must be positive, got {}", self.box_radius),
            ));
        }
        if !(self.p_norm >= 1.0) {
            return Err(Error::config("p_norm", format!("must be >= 1, got {}", self.p_norm)));
        }
        for (name, n) in [
            ("batch_centers", self.batch_centers),
            ("batch_peripherals", self.batch_peripherals),
        ] {
            if !(1..=MAX_BATCH).contains(&n) {
                return Err(Error::config(name, format!("must be in [1, {MAX_BATCH}], got {n}")));
            }
        }
        match self.variant {
            Variant::OffDiagonal => {
                if self.distances.len() != self.num_colors {
                    return Err(Error::config(
                        "distances",
                        format!(
                            "need one distance per color ({}), got {}",
                            self.num_colors,
                            self.distances.len()
                        ),
                    ));
                }
                for (k, d) in self.distances.iter().enumerate() {
                    d.validate(&format!("distances[{k}]"))?;
                }
            }
            _ if !self.distances.is_empty() => {
                return Err(Error::config(
                    "distances",
                    format!("only used by the off_diagonal variant, not {}", self.variant),
                ));
            }
            _ => {}
        }
        if self.variant == Variant::Lagrangian && !(self.lagrange_lambda >= 0.0 && self.lagrange_lambda.is_finite()) {
            return Err(Error::config(
                "lagrange_lambda",
                format!("must be >= 0, got {}", self.lagrange_lambda),
            ));
        }
        if self.variant == Variant::Triangle {
            if self.dimension != 2 {
                return Err(Error::config("dimension", "triangle variant is planar"));
            }
            if self.p_norm != 2.0 {
                return Err(Error::config("p_norm", "triangle variant uses the Euclidean norm"));
            }
            for (i, s) in self.triangle_sides.iter().enumerate() {
                s.validate(&format!("triangle_sides[{i}]"))?;
            }
            let [a_lo, a_hi] = self.triangle_sides[0].bounds();
            let [b_lo, b_hi] = self.triangle_sides[1].bounds();
            // a + b is smallest and |a - b| largest at the box corners
            for (a, b) in [(a_lo, b_lo), (a_lo, b_hi), (a_hi, b_lo), (a_hi, b_hi)] {
                check_sides(a, b).map_err(|e| Error::config("triangle_sides", e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Number of probability components a compatible coloring must output.
    pub fn output_arity(&self) -> usize {
        match self.variant {
            Variant::Lagrangian => self.num_colors + 1,
            _ => self.num_colors,
        }
    }

    /// Ranges of the parameter inputs appended to every network evaluation,
    /// in slot order.
    pub fn param_ranges(&self) -> Vec<[f64; 2]> {
        self.param_specs()
            .iter()
            .filter(|d| d.is_ranged())
            .map(|d| d.bounds())
            .collect()
    }

    fn param_specs(&self) -> &[DistanceSpec] {
        match self.variant {
            Variant::OffDiagonal => &self.distances,
            Variant::Triangle => &self.triangle_sides,
            _ => &[],
        }
    }

    /// Distance avoided by each regular color (ranges report their bounds).
    pub fn color_distances(&self) -> Vec<DistanceSpec> {
        match self.variant {
            Variant::OffDiagonal => self.distances.clone(),
            _ => vec![DistanceSpec::Fixed(1.0); self.num_colors],
        }
    }

    /// Effective number of constraint samples per estimate.
    pub fn samples_per_estimate(&self) -> usize {
        let groups = match self.variant {
            Variant::OffDiagonal => self.num_colors,
            Variant::Triangle => 2,
            _ => 1,
        };
        self.batch_centers * self.batch_peripherals * groups
    }

    /// Checks that `coloring` can be evaluated under this spec.
    pub fn check_coloring(&self, coloring: &dyn ColoringFunction) -> Result<()> {
        if coloring.spatial_dim() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: coloring.spatial_dim(),
            });
        }
        let slots = self.param_ranges().len();
        if coloring.param_count() != slots {
            return Err(Error::DimensionMismatch {
                expected: self.dimension + slots,
                actual: coloring.spatial_dim() + coloring.param_count(),
            });
        }
        let outputs = coloring.num_outputs();
        let ok = match self.variant {
            Variant::Lagrangian => outputs == self.num_colors + 1,
            _ => outputs >= self.num_colors,
        };
        if !ok {
            return Err(Error::VariantMismatch(format!(
                "{} loss with {} colors cannot use a coloring with {} outputs",
                self.variant, self.num_colors, outputs
            )));
        }
        Ok(())
    }
}
