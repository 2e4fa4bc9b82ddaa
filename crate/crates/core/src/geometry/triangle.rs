use crate::error::{Error, Result};

/// Tolerance on the unit base `|x - y| = 1`.
pub const BASE_TOLERANCE: f64 = 1e-9;

/// The two points `z` with `|x - z| = a` and `|y - z| = b`, where `|x - y| = 1`.
///
/// `z1` lies to the left of the directed base `x -> y`, `z2` is its mirror
/// image across the line through `x` and `y`.
pub fn triangle_third_points(x: [f64; 2], y: [f64; 2], a: f64, b: f64) -> Result<([f64; 2], [f64; 2])> {
    check_sides(a, b)?;
    let (dx, dy) = (y[0] - x[0], y[1] - x[1]);
    let base = (dx * dx + dy * dy).sqrt();
    if (base - 1.0).abs() > BASE_TOLERANCE {
        return Err(Error::invalid(format!(
            "triangle base must have unit length, got {base}"
        )));
    }
    Ok(third_points_unchecked(x, [dx / base, dy / base], base, a, b))
}

/// Rejects side pairs that cannot close a triangle over a unit base.
pub fn check_sides(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::NoTriangle {
            a,
            b,
            reason: "sides must be positive",
        });
    }
    if !(a + b > 1.0) {
        return Err(Error::NoTriangle {
            a,
            b,
            reason: "a + b must exceed 1",
        });
    }
    if !((a - b).abs() < 1.0) {
        return Err(Error::NoTriangle {
            a,
            b,
            reason: "|a - b| must be below 1",
        });
    }
    Ok(())
}

/// `e` is the unit direction from `x` to `y`, `base` their distance.
#[inline]
pub(crate) fn third_points_unchecked(x: [f64; 2], e: [f64; 2], base: f64, a: f64, b: f64) -> ([f64; 2], [f64; 2]) {
    let along = (a * a - b * b + base * base) / (2.0 * base);
    let h = (a * a - along * along).max(0.0).sqrt();
    let n = [-e[1], e[0]];
    let m = [x[0] + along * e[0], x[1] + along * e[1]];
    ([m[0] + h * n[0], m[1] + h * n[1]], [m[0] - h * n[0], m[1] - h * n[1]])
}
