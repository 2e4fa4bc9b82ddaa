//! Uniform samplers on boxes, Euclidean spheres and L^p spheres.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};

/// `count` points i.i.d. uniform on `[-radius, radius]^dim`.
pub fn sample_box<R: Rng + ?Sized>(radius: f64, dim: usize, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("box radius must be positive, got {radius}")));
    }
    Ok((0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-radius..radius)).collect())
        .collect())
}

/// `count` points uniform on the Euclidean sphere of `radius` around `center`.
pub fn sample_sphere<R: Rng + ?Sized>(center: &[f64], radius: f64, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("sphere radius must be positive, got {radius}")));
    }
    let dim = center.len();
    let mut u = vec![0.0; dim];
    Ok((0..count)
        .map(|_| {
            euclidean_direction(rng, &mut u);
            center.iter().zip(&u).map(|(c, d)| c + radius * d).collect()
        })
        .collect())
}

/// `count` points on the L^p sphere `{y : |y - center|_p = radius}`.
///
/// Finite `p` normalizes an i.i.d. vector with density proportional to
/// `exp(-|t|^p)`, which yields the cone measure of the L^p ball (uniform
/// arc length for p = 1 and p = 2). `p = f64::INFINITY` picks one of the
/// `2n` faces uniformly and samples uniformly on it.
pub fn sample_lp_sphere<R: Rng + ?Sized>(
    center: &[f64],
    radius: f64,
    p: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("p-norm exponent must be >= 1, got {p}")));
    }
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("sphere radius must be positive, got {radius}")));
    }
    let sampler = DirectionSampler::generalized(center.len(), p)?;
    let mut u = vec![0.0; center.len()];
    Ok((0..count)
        .map(|_| {
            sampler.sample(rng, &mut u);
            center.iter().zip(&u).map(|(c, d)| c + radius * d).collect()
        })
        .collect())
}

fn euclidean_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    if out.len() == 2 {
        let theta = rng.random::<f64>() * TAU;
        let (s, c) = theta.sin_cos();
        out[0] = c;
        out[1] = s;
        return;
    }
    loop {
        for v in out.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let n = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            out.iter_mut().for_each(|v| *v /= n);
            return;
        }
    }
}

/// Draws unit vectors (in the chosen norm) for the Monte Carlo estimators.
#[derive(Clone, Debug)]
pub(crate) enum DirectionSampler {
    Euclidean,
    Generalized { p: f64, gamma: Gamma<f64> },
    Chebyshev,
}

impl DirectionSampler {
    /// Euclidean directions use the exact sampler for `p = 2`.
    pub(crate) fn new(dim: usize, p: f64) -> Result<Self> {
        if p == 2.0 {
            Ok(DirectionSampler::Euclidean)
        } else {
            Self::generalized(dim, p)
        }
    }

    fn generalized(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(p >= 1.0) {
            return Err(Error::invalid(format!("p-norm exponent must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(DirectionSampler::Chebyshev);
        }
        let gamma = Gamma::new(1.0 / p, 1.0).map_err(|e| Error::invalid(e.to_string()))?;
        Ok(DirectionSampler::Generalized { p, gamma })
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            DirectionSampler::Euclidean => euclidean_direction(rng, out),
            DirectionSampler::Generalized { p, gamma } => loop {
                for v in out.iter_mut() {
                    let magnitude = gamma.sample(rng).powf(1.0 / p);
                    *v = if rng.random::<bool>() { magnitude } else { -magnitude };
                }
                let n = out.iter().map(|x| x.abs().powf(*p)).sum::<f64>().powf(1.0 / p);
                if n > 1e-300 {
                    out.iter_mut().for_each(|v| *v /= n);
                    return;
                }
            },
            DirectionSampler::Chebyshev => {
                let n = out.len();
                let face = rng.random_range(0..2 * n);
                for v in out.iter_mut() {
                    *v = rng.random_range(-1.0..1.0);
                }
                out[face / 2] = if face % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
    }
}
