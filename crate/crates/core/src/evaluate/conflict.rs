use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::loss::batch::{chunks, PairLayout, TriangleLayout};
use crate::loss::{LossSpec, Variant};
use crate::net::{argmax, ColoringFunction};
use crate::stream::Stream;

/// Fraction of sampled constraint tuples that the argmax coloring violates.
///
/// Pair variants draw `pair_count` pairs `(x, y)` with `|x - y| = d_k` for
/// the argmax color `k` of `x`; a pair conflicts when `y` also has color `k`.
/// Bonus colors never conflict. The triangle variant draws `pair_count`
/// bases and checks both apexes, so it scores `2 * pair_count` triangles.
pub fn argmax_conflict_rate(
    coloring: &dyn ColoringFunction,
    spec: &LossSpec,
    pair_count: usize,
    stream: &Stream,
) -> Result<f64> {
    if pair_count == 0 {
        return Err(Error::invalid("pair_count must be positive"));
    }
    let mut spec = spec.clone();
    spec.batch_centers = pair_count;
    spec.batch_peripherals = 1;
    spec.validate()?;
    spec.check_coloring(coloring)?;
    let a = coloring.num_outputs();
    let c = spec.num_colors;

    let counts: Vec<usize> = if spec.variant == Variant::Triangle {
        let layout = TriangleLayout::new(&spec)?;
        chunks(pair_count)
            .into_par_iter()
            .map(|(ci, _, count)| -> Result<usize> {
                let chunk = layout.draw(stream.child(ci), count);
                let probs = coloring.evaluate(&chunk.inputs)?;
                let color = |r: usize| argmax(&probs[r * a..(r + 1) * a]);
                let mut hits = 0;
                for i in 0..count {
                    let k = color(i);
                    let [ry, r1, r2] = layout.rows_of(count, i, 0);
                    if k < c && color(ry) == k {
                        hits += (color(r1) == k) as usize + (color(r2) == k) as usize;
                    }
                }
                Ok(hits)
            })
            .collect::<Result<_>>()?
    } else {
        let layout = PairLayout::new(&spec)?;
        chunks(pair_count)
            .into_par_iter()
            .map(|(ci, _, count)| -> Result<usize> {
                let chunk = layout.draw(stream.child(ci), count);
                let probs = coloring.evaluate(&chunk.inputs)?;
                let color = |r: usize| argmax(&probs[r * a..(r + 1) * a]);
                let mut hits = 0;
                for i in 0..count {
                    let k = color(i);
                    if k < c && color(layout.y_row(count, layout.color_group[k], i, 0)) == k {
                        hits += 1;
                    }
                }
                Ok(hits)
            })
            .collect::<Result<_>>()?
    };
    let tuples = if spec.variant == Variant::Triangle {
        2 * pair_count
    } else {
        pair_count
    };
    Ok(counts.iter().sum::<usize>() as f64 / tuples as f64)
}
