use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ColoringFunction;
use crate::error::{Error, Result};
use crate::geometry::Lattice;
use crate::stream::Stream;

/// Default sine frequency scale.
pub const DEFAULT_OMEGA0: f64 = 30.0;

/// Shape of a coloring network.
///
/// Inputs are `spatial_dim` coordinates followed by one value per entry of
/// `param_ranges`; each parameter is rescaled affinely from its range to
/// `[-1, 1]` before entering the first layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkArchitecture {
    pub spatial_dim: usize,
    #[serde(default)]
    pub param_ranges: Vec<[f64; 2]>,
    pub hidden_widths: Vec<usize>,
    pub num_colors: usize,
    pub omega0: f64,
    /// When set, coordinates are reduced modulo this lattice first.
    #[serde(skip)]
    pub periodic_wrap: Option<Lattice>,
}

impl NetworkArchitecture {
    pub fn new(spatial_dim: usize, hidden_widths: Vec<usize>, num_colors: usize) -> Self {
        NetworkArchitecture {
            spatial_dim,
            param_ranges: Vec::new(),
            hidden_widths,
            num_colors,
            omega0: DEFAULT_OMEGA0,
            periodic_wrap: None,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.spatial_dim + self.param_ranges.len()
    }

    /// Layer widths from input to output.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.input_dim()];
        sizes.extend(&self.hidden_widths);
        sizes.push(self.num_colors);
        sizes
    }

    pub fn parameter_count(&self) -> usize {
        self.layer_sizes().windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.spatial_dim == 0 {
            return Err(Error::invalid("spatial dimension must be positive"));
        }
        if self.hidden_widths.is_empty() || self.hidden_widths.contains(&0) {
            return Err(Error::invalid(
                "hidden widths must be a non-empty list of positive sizes",
            ));
        }
        if self.num_colors == 0 {
            return Err(Error::invalid("network needs at least one output color"));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::invalid(format!("omega0 must be positive, got {}", self.omega0)));
        }
        for r in &self.param_ranges {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                return Err(Error::invalid(format!("bad parameter range {r:?}")));
            }
        }
        if let Some(l) = &self.periodic_wrap {
            if l.dim() != self.spatial_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.spatial_dim,
                    actual: l.dim(),
                });
            }
        }
        Ok(())
    }
}

/// A coloring network: architecture plus flat parameters.
///
/// Parameters are stored layer by layer; each layer holds its weight matrix
/// (`fan_out x fan_in`, row-major) followed by its biases.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    arch: NetworkArchitecture,
    params: Vec<f64>,
    seed: u64,
}

/// Per-layer record of a forward pass, consumed by [`Network::backward`].
#[derive(Clone, Debug)]
pub struct EvaluationTape {
    batch: usize,
    param_count: usize,
    /// Preprocessed first-layer inputs (wrapped and rescaled).
    inputs: Vec<f64>,
    /// Sine activations of each hidden layer.
    activations: Vec<Vec<f64>>,
    /// `cos(omega0 z)` of each hidden layer.
    slopes: Vec<Vec<f64>>,
    probabilities: Vec<f64>,
}

impl EvaluationTape {
    pub fn layer_count(&self) -> usize {
        self.activations.len() + 1
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// Result of a backward pass.
#[derive(Clone, Debug)]
pub struct Gradients {
    /// Same layout as [`Network::parameters`].
    pub parameters: Vec<f64>,
    /// Row-major, one row per input, w.r.t. the raw (unwrapped, unscaled) inputs.
    pub inputs: Vec<f64>,
}

/// Initializes a network deterministically from `seed`.
///
/// First layer weights are uniform in `[-1/fan_in, 1/fan_in]`, deeper weights
/// uniform in `+-sqrt(6/fan_in)/omega0`; sine-layer biases are uniform in
/// `+-1/sqrt(fan_in)` and output biases start at zero.
pub fn init_network(arch: &NetworkArchitecture, seed: u64) -> Result<Network> {
    arch.validate()?;
    let sizes = arch.layer_sizes();
    let mut rng = Stream::new(seed).named("init").rng();
    let mut params = Vec::with_capacity(arch.parameter_count());
    let layers = sizes.len() - 1;
    for (l, w) in sizes.windows(2).enumerate() {
        let (fan_in, fan_out) = (w[0], w[1]);
        let limit = if l == 0 {
            1.0 / fan_in as f64
        } else {
            (6.0 / fan_in as f64).sqrt() / arch.omega0
        };
        params.extend((0..fan_in * fan_out).map(|_| rng.random_range(-limit..=limit)));
        if l + 1 < layers {
            let b = 1.0 / (fan_in as f64).sqrt();
            params.extend((0..fan_out).map(|_| rng.random_range(-b..=b)));
        } else {
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
    }
    Ok(Network {
        arch: arch.clone(),
        params,
        seed,
    })
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (isize, isize),
    b: &[f64],
    (rsb, csb): (isize, isize),
    beta: f64,
    c: &mut [f64],
    (rsc, csc): (isize, isize),
) {
    if m == 0 || n == 0 {
        return;
    }
    debug_assert!(c.len() >= m * n);
    // SAFETY: callers pass slices sized for the given strides.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            rsc,
            csc,
        );
    }
}

impl Network {
    /// Wraps existing parameters; the count must match the architecture.
    pub fn from_parameters(arch: NetworkArchitecture, params: Vec<f64>, seed: u64) -> Result<Self> {
        arch.validate()?;
        if params.len() != arch.parameter_count() {
            return Err(Error::Shape(format!(
                "architecture needs {} parameters, got {}",
                arch.parameter_count(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Shape("parameters must be finite".into()));
        }
        Ok(Network { arch, params, seed })
    }

    pub fn architecture(&self) -> &NetworkArchitecture {
        &self.arch
    }

    pub fn parameters(&self) -> &[f64] {
        &self.params
    }

    pub fn parameters_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.arch.periodic_wrap.as_ref()
    }

    /// Same network with coordinates reduced modulo `lattice`.
    pub fn with_lattice(mut self, lattice: Option<Lattice>) -> Result<Self> {
        self.arch.periodic_wrap = lattice;
        self.arch.validate()?;
        Ok(self)
    }

    fn layer_offsets(&self) -> Vec<(usize, usize, usize)> {
        let mut off = 0;
        self.arch
            .layer_sizes()
            .windows(2)
            .map(|w| {
                let start = off;
                off += w[0] * w[1] + w[1];
                (start, w[0], w[1])
            })
            .collect()
    }

    fn check_inputs(&self, inputs: &[f64]) -> Result<usize> {
        let width = self.arch.input_dim();
        if !inputs.len().is_multiple_of(width) {
            return Err(Error::DimensionMismatch {
                expected: width,
                actual: inputs.len() % width,
            });
        }
        Ok(inputs.len() / width)
    }

    fn preprocess(&self, inputs: &[f64], batch: usize) -> Vec<f64> {
        let width = self.arch.input_dim();
        let sd = self.arch.spatial_dim;
        let mut x = inputs.to_vec();
        for row in 0..batch {
            let r = &mut x[row * width..(row + 1) * width];
            if let Some(l) = &self.arch.periodic_wrap {
                let mut f = [0.0; 3];
                l.wrap_into(&r[..sd], &mut f[..sd]);
                r[..sd].copy_from_slice(&f[..sd]);
            }
            for (v, range) in r[sd..].iter_mut().zip(&self.arch.param_ranges) {
                *v = rescale(*v, range);
            }
        }
        x
    }

    fn forward(&self, inputs: &[f64], keep: bool) -> Result<EvaluationTape> {
        let batch = self.check_inputs(inputs)?;
        let x0 = self.preprocess(inputs, batch);
        let layers = self.layer_offsets();
        let omega = self.arch.omega0;
        let mut activations = Vec::with_capacity(layers.len() - 1);
        let mut slopes = Vec::with_capacity(if keep { layers.len() - 1 } else { 0 });
        let mut current: &[f64] = &x0;
        let mut out = Vec::new();
        for (l, &(off, fan_in, fan_out)) in layers.iter().enumerate() {
            let w = &self.params[off..off + fan_in * fan_out];
            let b = &self.params[off + fan_in * fan_out..off + fan_in * fan_out + fan_out];
            let mut z = Vec::with_capacity(batch * fan_out);
            for _ in 0..batch {
                z.extend_from_slice(b);
            }
            gemm(
                batch,
                fan_in,
                fan_out,
                current,
                (fan_in as isize, 1),
                w,
                (1, fan_in as isize),
                1.0,
                &mut z,
                (fan_out as isize, 1),
            );
            if l + 1 == layers.len() {
                softmax_rows(&mut z, fan_out);
                out = z;
                break;
            }
            if keep {
                let mut slope = Vec::with_capacity(z.len());
                for v in z.iter_mut() {
                    let (s, c) = (omega * *v).sin_cos();
                    *v = s;
                    slope.push(c);
                }
                slopes.push(slope);
            } else {
                for v in z.iter_mut() {
                    *v = (omega * *v).sin();
                }
            }
            activations.push(z);
            current = activations.last().unwrap();
        }
        Ok(EvaluationTape {
            batch,
            param_count: self.params.len(),
            inputs: x0,
            activations,
            slopes,
            probabilities: out,
        })
    }

    /// Probability vectors for a row-major batch of inputs.
    pub fn evaluate(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(inputs, false)?.probabilities)
    }

    /// Like [`evaluate`](Self::evaluate) but keeps what the backward pass needs.
    pub fn evaluate_with_tape(&self, inputs: &[f64]) -> Result<(Vec<f64>, EvaluationTape)> {
        let tape = self.forward(inputs, true)?;
        Ok((tape.probabilities.clone(), tape))
    }

    /// Gradients of `sum_b <cotangent_b, p_b>` w.r.t. parameters and inputs.
    pub fn backward(&self, tape: &EvaluationTape, cotangents: &[f64]) -> Result<Gradients> {
        let layers = self.layer_offsets();
        let c = self.arch.num_colors;
        let batch = tape.batch;
        if tape.param_count != self.params.len()
            || tape.activations.len() + 1 != layers.len()
            || tape.slopes.len() != tape.activations.len()
            || tape.probabilities.len() != batch * c
        {
            return Err(Error::Shape("tape was not recorded on this network".into()));
        }
        if cotangents.len() != batch * c {
            return Err(Error::DimensionMismatch {
                expected: batch * c,
                actual: cotangents.len(),
            });
        }
        let omega = self.arch.omega0;
        let mut grad = vec![0.0; self.params.len()];

        // softmax: dz = p * (g - <p, g>)
        let mut dz = vec![0.0; batch * c];
        for b in 0..batch {
            let p = &tape.probabilities[b * c..(b + 1) * c];
            let g = &cotangents[b * c..(b + 1) * c];
            let inner: f64 = p.iter().zip(g).map(|(x, y)| x * y).sum();
            for k in 0..c {
                dz[b * c + k] = p[k] * (g[k] - inner);
            }
        }

        let mut dx = Vec::new();
        for (l, &(off, fan_in, fan_out)) in layers.iter().enumerate().rev() {
            let input: &[f64] = if l == 0 { &tape.inputs } else { &tape.activations[l - 1] };
            let (gw, gb) = grad[off..off + fan_in * fan_out + fan_out].split_at_mut(fan_in * fan_out);
            // dW = dz^T x
            gemm(
                fan_out,
                batch,
                fan_in,
                &dz,
                (1, fan_out as isize),
                input,
                (fan_in as isize, 1),
                0.0,
                gw,
                (fan_in as isize, 1),
            );
            for b in 0..batch {
                for (acc, v) in gb.iter_mut().zip(&dz[b * fan_out..(b + 1) * fan_out]) {
                    *acc += v;
                }
            }
            // dx = dz W
            let w = &self.params[off..off + fan_in * fan_out];
            dx = vec![0.0; batch * fan_in];
            gemm(
                batch,
                fan_out,
                fan_in,
                &dz,
                (fan_out as isize, 1),
                w,
                (fan_in as isize, 1),
                0.0,
                &mut dx,
                (fan_in as isize, 1),
            );
            if l > 0 {
                let slope = &tape.slopes[l - 1];
                dz = dx.iter().zip(slope).map(|(d, s)| d * s * omega).collect();
            }
        }

        // back to raw inputs
        let sd = self.arch.spatial_dim;
        let width = self.arch.input_dim();
        for row in dx.chunks_mut(width) {
            if let Some(lat) = &self.arch.periodic_wrap {
                // x -> M^{-1} x (mod 1); the reduction is locally the identity
                let inv = lat.inverse();
                let mut g = [0.0; 3];
                for cidx in 0..sd {
                    g[cidx] = (0..sd).map(|r| inv[r * sd + cidx] * row[r]).sum();
                }
                row[..sd].copy_from_slice(&g[..sd]);
            }
            for (v, range) in row[sd..].iter_mut().zip(&self.arch.param_ranges) {
                *v *= rescale_slope(range);
            }
        }
        Ok(Gradients {
            parameters: grad,
            inputs: dx,
        })
    }
}

fn rescale(v: f64, range: &[f64; 2]) -> f64 {
    let span = range[1] - range[0];
    if span > 0.0 {
        2.0 * (v - range[0]) / span - 1.0
    } else {
        0.0
    }
}

fn rescale_slope(range: &[f64; 2]) -> f64 {
    let span = range[1] - range[0];
    if span > 0.0 {
        2.0 / span
    } else {
        0.0
    }
}

fn softmax_rows(z: &mut [f64], width: usize) {
    for row in z.chunks_mut(width) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}

impl ColoringFunction for Network {
    fn spatial_dim(&self) -> usize {
        self.arch.spatial_dim
    }

    fn param_count(&self) -> usize {
        self.arch.param_ranges.len()
    }

    fn num_outputs(&self) -> usize {
        self.arch.num_colors
    }

    fn evaluate(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        Network::evaluate(self, inputs)
    }

    fn as_network(&self) -> Option<&Network> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_inputs(n: usize, width: usize, seed: u64) -> Vec<f64> {
        let mut rng = Stream::new(seed).rng();
        (0..n * width).map(|_| rng.random_range(-3.0..3.0)).collect()
    }

    #[test]
    fn parameter_counts() {
        let a = NetworkArchitecture::new(2, vec![32], 7);
        assert_eq!(init_network(&a, 1).unwrap().parameters().len(), 327);
        let a = NetworkArchitecture::new(3, vec![64, 64], 15);
        assert_eq!(a.parameter_count(), 5391);
        assert_eq!(init_network(&a, 1).unwrap().parameters().len(), 5391);
    }

    #[test]
    fn init_is_deterministic() {
        let a = NetworkArchitecture::new(2, vec![16, 16], 4);
        let n1 = init_network(&a, 42).unwrap();
        let n2 = init_network(&a, 42).unwrap();
        let n3 = init_network(&a, 43).unwrap();
        assert!(n1
            .parameters()
            .iter()
            .zip(n2.parameters())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_ne!(n1.parameters(), n3.parameters());
    }

    #[test]
    fn init_rejects_bad_arch() {
        assert!(init_network(&NetworkArchitecture::new(2, vec![], 3), 0).is_err());
        assert!(init_network(&NetworkArchitecture::new(2, vec![8, 0], 3), 0).is_err());
        assert!(init_network(&NetworkArchitecture::new(2, vec![8], 0), 0).is_err());
    }

    #[test]
    fn zero_parameters_give_uniform() {
        let a = NetworkArchitecture::new(2, vec![8, 8], 5);
        let n = Network::from_parameters(a.clone(), vec![0.0; a.parameter_count()], 0).unwrap();
        let p = n.evaluate(&random_inputs(10, 2, 1)).unwrap();
        assert!(p.iter().all(|&v| v == 0.2));
    }

    #[test]
    fn outputs_on_simplex() {
        let a = NetworkArchitecture::new(2, vec![32, 32], 7);
        let n = init_network(&a, 5).unwrap();
        let p = n.evaluate(&random_inputs(1000, 2, 2)).unwrap();
        for row in p.chunks(7) {
            assert!(row.iter().all(|&v| v >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn batch_equals_pointwise() {
        let mut a = NetworkArchitecture::new(2, vec![24, 24], 6);
        a.param_ranges = vec![[0.2, 2.2]];
        let n = init_network(&a, 7).unwrap();
        let x = random_inputs(100, 3, 3);
        let batch = n.evaluate(&x).unwrap();
        for (i, row) in x.chunks(3).enumerate() {
            let single = n.evaluate(row).unwrap();
            assert_eq!(single.as_slice(), &batch[i * 6..(i + 1) * 6]);
        }
    }

    #[test]
    fn tape_matches_evaluate() {
        let a = NetworkArchitecture::new(2, vec![16, 16, 16], 4);
        let n = init_network(&a, 8).unwrap();
        let x = random_inputs(50, 2, 4);
        let (p, tape) = n.evaluate_with_tape(&x).unwrap();
        assert_eq!(p, n.evaluate(&x).unwrap());
        assert_eq!(tape.layer_count(), 4);
        assert_eq!(tape.probabilities(), p.as_slice());
        drop(tape);
        assert_eq!(p, n.evaluate(&x).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let n = init_network(&NetworkArchitecture::new(2, vec![4], 3), 0).unwrap();
        assert!(matches!(
            n.evaluate(&[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_cotangent_zero_gradient() {
        let n = init_network(&NetworkArchitecture::new(2, vec![16], 4), 9).unwrap();
        let x = random_inputs(20, 2, 5);
        let (_, tape) = n.evaluate_with_tape(&x).unwrap();
        let g = n.backward(&tape, &vec![0.0; 80]).unwrap();
        assert!(g.parameters.iter().all(|&v| v == 0.0));
        assert!(g.inputs.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_network_has_zero_input_gradient() {
        let a = NetworkArchitecture::new(2, vec![8], 3);
        let n = Network::from_parameters(a.clone(), vec![0.0; a.parameter_count()], 0).unwrap();
        let x = random_inputs(10, 2, 6);
        let (_, tape) = n.evaluate_with_tape(&x).unwrap();
        let cot: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let g = n.backward(&tape, &cot).unwrap();
        assert!(g.inputs.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn backward_rejects_foreign_tape() {
        let n1 = init_network(&NetworkArchitecture::new(2, vec![8], 3), 0).unwrap();
        let n2 = init_network(&NetworkArchitecture::new(2, vec![8, 8], 3), 0).unwrap();
        let (_, tape) = n1.evaluate_with_tape(&[0.1, 0.2]).unwrap();
        assert!(n2.backward(&tape, &[0.0; 3]).is_err());
    }

    /// Central finite differences of `<cot, p(x)>` along random directions.
    fn fd_check(n: &Network, x: &[f64], seed: u64, inputs: bool) {
        let c = n.architecture().num_colors;
        let rows = x.len() / n.architecture().input_dim();
        let mut rng = Stream::new(seed).rng();
        let cot: Vec<f64> = (0..rows * c).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (_, tape) = n.evaluate_with_tape(x).unwrap();
        let g = n.backward(&tape, &cot).unwrap();
        let objective = |net: &Network, inp: &[f64]| -> f64 {
            net.evaluate(inp).unwrap().iter().zip(&cot).map(|(p, q)| p * q).sum()
        };
        let h = 1e-5;
        for _ in 0..10 {
            let dir: Vec<f64> = (0..n.parameters().len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut plus = n.clone();
            let mut minus = n.clone();
            for ((p, m), d) in plus.parameters_mut().iter_mut().zip(minus.parameters_mut()).zip(&dir) {
                *p += h * d;
                *m -= h * d;
            }
            let fd = (objective(&plus, x) - objective(&minus, x)) / (2.0 * h);
            let an: f64 = g.parameters.iter().zip(&dir).map(|(a, b)| a * b).sum();
            assert!((fd - an).abs() <= 1e-4 * an.abs().max(1e-3), "param fd {fd} vs {an}");
        }
        for _ in 0..if inputs { 10 } else { 0 } {
            let dir: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let xp: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + h * d).collect();
            let xm: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a - h * d).collect();
            let fd = (objective(n, &xp) - objective(n, &xm)) / (2.0 * h);
            let an: f64 = g.inputs.iter().zip(&dir).map(|(a, b)| a * b).sum();
            assert!((fd - an).abs() <= 1e-4 * an.abs().max(1e-3), "input fd {fd} vs {an}");
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut a = NetworkArchitecture::new(2, vec![16], 4);
        a.omega0 = 3.0;
        let n = init_network(&a, 10).unwrap();
        fd_check(&n, &random_inputs(5, 2, 11), 12, true);

        let mut a = NetworkArchitecture::new(2, vec![12, 12], 3);
        a.param_ranges = vec![[0.5, 1.5]];
        a.omega0 = 5.0;
        let n = init_network(&a, 13).unwrap();
        let x: Vec<f64> = [0.3, 0.4, 0.9, 0.5, 0.6, 1.1, 0.8, 0.2, 0.7].to_vec();
        fd_check(&n, &x, 14, true);

        // wrapped inputs are quantized, so only parameters are differenced here
        let lat = Lattice::new(&[vec![1.3, 0.1], vec![0.4, 1.2]]).unwrap();
        let periodic = n.clone().with_lattice(Some(lat)).unwrap();
        fd_check(&periodic, &x, 15, false);
    }

    #[test]
    fn wrapped_input_gradient_is_chain_rule() {
        let lat = Lattice::new(&[vec![1.3, 0.1], vec![0.4, 1.2]]).unwrap();
        let mut a = NetworkArchitecture::new(2, vec![12], 3);
        a.omega0 = 5.0;
        let plain = init_network(&a, 16).unwrap();
        let periodic = plain.clone().with_lattice(Some(lat.clone())).unwrap();
        let x = random_inputs(8, 2, 17);
        let frac: Vec<f64> = x.chunks(2).flat_map(|p| lat.wrap(p)).collect();
        let cot: Vec<f64> = (0..24).map(|i| (i as f64 * 0.37).sin()).collect();
        let (_, tp) = periodic.evaluate_with_tape(&x).unwrap();
        let (_, tf) = plain.evaluate_with_tape(&frac).unwrap();
        let gp = periodic.backward(&tp, &cot).unwrap();
        let gf = plain.backward(&tf, &cot).unwrap();
        assert_eq!(gp.parameters, gf.parameters);
        let inv = lat.inverse();
        for (row_p, row_f) in gp.inputs.chunks(2).zip(gf.inputs.chunks(2)) {
            for c in 0..2 {
                let expect = inv[c] * row_f[0] + inv[2 + c] * row_f[1];
                assert!((row_p[c] - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn periodic_network_is_exactly_periodic() {
        let lat = Lattice::new(&[vec![1.7, 0.0], vec![0.6, 1.4]]).unwrap();
        let mut a = NetworkArchitecture::new(2, vec![16], 5);
        a.periodic_wrap = Some(lat.clone());
        let n = init_network(&a, 15).unwrap();
        let x = random_inputs(1000, 2, 16);
        let shifted: Vec<f64> = x
            .chunks(2)
            .flat_map(|p| {
                [
                    p[0] + lat.vector(0)[0] - 2.0 * lat.vector(1)[0],
                    p[1] + lat.vector(0)[1] - 2.0 * lat.vector(1)[1],
                ]
            })
            .collect();
        assert_eq!(n.evaluate(&x).unwrap(), n.evaluate(&shifted).unwrap());
    }
}
