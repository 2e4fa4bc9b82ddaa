#![allow(dead_code)]

use std::collections::BTreeSet;

use plane_forge::evaluate::{reference_coloring, ReferenceColoringId};
use plane_forge::formalize::{CellColoring, ConflictEdge};
use plane_forge::geometry::{cell_distance_interval, Lattice};
use plane_forge::loss::{DistanceSpec, LossSpec, Variant};
use plane_forge::net::{init_network, ColoringFunction, Network, NetworkArchitecture};
use plane_forge::{Result, Stream};
use rand::Rng;

pub fn brute_force_edges(c: &CellColoring, bound: i64) -> BTreeSet<ConflictEdge> {
    let grid = c.grid();
    let dim = grid.dim();
    let mut translates = vec![vec![]];
    for _ in 0..dim {
        translates = translates
            .into_iter()
            .flat_map(|t: Vec<i64>| {
                (-bound..=bound).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    let mut out = BTreeSet::new();
    for a in 0..grid.cell_count() {
        for b in a..grid.cell_count() {
            let color = c.color(a);
            if color != c.color(b) || color == c.bonus_color() {
                continue;
            }
            let d = c.distance_of(color).unwrap();
            for t in &translates {
                if a == b && !(t.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)) {
                    continue;
                }
                if cell_distance_interval(grid, &grid.unlinear(a), &grid.unlinear(b), t).contains(d) {
                    out.insert(ConflictEdge {
                        a,
                        b,
                        translate: t.clone(),
                        color,
                    });
                }
            }
        }
    }
    out
}

pub fn random_lattice(rng: &mut impl Rng) -> Lattice {
    loop {
        let l1 = rng.random_range(0.8..2.0);
        let l2 = rng.random_range(0.8..2.0);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let theta = rng.random_range(0.6..2.5);
        let v1 = vec![l1 * phi.cos(), l1 * phi.sin()];
        let v2 = vec![l2 * (phi + theta).cos(), l2 * (phi + theta).sin()];
        if let Ok(l) = Lattice::new(&[v1, v2]) {
            return l;
        }
    }
}

/// Random coloring on a random lattice and grid of at most 10 x 10 cells.
pub fn random_coloring(seed: u64) -> CellColoring {
    let mut rng = Stream::new(seed).rng();
    loop {
        let lattice = random_lattice(&mut rng);
        let res = [rng.random_range(3..=10), rng.random_range(3..=10)];
        let c = rng.random_range(1..=4);
        let distances: Vec<f64> = (0..c).map(|_| rng.random_range(0.7..1.3)).collect();
        let colors: Vec<u32> = (0..res[0] * res[1])
            .map(|_| rng.random_range(1..=c as u32 + 1))
            .collect();
        if let Ok(col) = CellColoring::new(lattice, &res, distances, colors) {
            return col;
        }
    }
}

pub fn brute_min_hitting_set(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .filter(|mask| edges.iter().all(|&(a, b)| mask >> a & 1 == 1 || mask >> b & 1 == 1))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

/// Softmax of `s * f(x)` against zero, for a lattice-periodic `f`.
pub struct Synthetic {
    pub waves: Vec<[f64; 2]>,
    pub sharpness: f64,
}

impl ColoringFunction for Synthetic {
    fn spatial_dim(&self) -> usize {
        2
    }
    fn num_outputs(&self) -> usize {
        2
    }
    fn evaluate(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        Ok(inputs
            .chunks(2)
            .flat_map(|x| {
                let f: f64 = self
                    .waves
                    .iter()
                    .map(|w| (std::f64::consts::TAU * (w[0] * x[0] + w[1] * x[1])).cos())
                    .sum::<f64>()
                    + 0.3 * (std::f64::consts::TAU * (self.waves[0][0] * x[0] + self.waves[0][1] * x[1])).sin();
                let p = 1.0 / (1.0 + (-self.sharpness * f).exp());
                [p, 1.0 - p]
            })
            .collect())
    }
}

pub fn reciprocal(v1: [f64; 2], v2: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let det = v1[0] * v2[1] - v1[1] * v2[0];
    ([v2[1] / det, -v2[0] / det], [-v1[1] / det, v1[0] / det])
}

/// Describes how `found` differs from the lattice spanned by `v1, v2`, if it does.
pub fn lattice_mismatch(found: &Lattice, v1: [f64; 2], v2: [f64; 2]) -> Option<String> {
    let norms = |a: [f64; 2], b: [f64; 2]| {
        let mut n = [a[0].hypot(a[1]), b[0].hypot(b[1])];
        n.sort_by(f64::total_cmp);
        n
    };
    let f1 = [found.vector(0)[0], found.vector(0)[1]];
    let f2 = [found.vector(1)[0], found.vector(1)[1]];
    let (got, want) = (norms(f1, f2), norms(v1, v2));
    if (got[0] - want[0]).abs() >= 1e-2 || (got[1] - want[1]).abs() >= 1e-2 {
        return Some(format!("norms {got:?} vs {want:?}"));
    }
    // same covolume means a unimodular change of basis once vectors are lattice vectors
    let det = |a: [f64; 2], b: [f64; 2]| (a[0] * b[1] - a[1] * b[0]).abs();
    if (det(f1, f2) - det(v1, v2)).abs() >= 2e-2 * det(v1, v2) {
        return Some(format!("covolume {} vs {}", det(f1, f2), det(v1, v2)));
    }
    let angle = |a: [f64; 2], b: [f64; 2]| {
        ((a[0] * b[0] + a[1] * b[1]) / (a[0].hypot(a[1]) * b[0].hypot(b[1])))
            .abs()
            .acos()
    };
    let da = (angle(f1, f2) - angle(v1, v2)).abs().to_degrees();
    if da >= 1.0 {
        return Some(format!("angle off by {da} degrees"));
    }
    None
}

/// Constant mixture `(1 - beta) e_1 + beta e_bonus` over `colors + 1` outputs.
pub struct Mixed {
    pub colors: usize,
    pub beta: f64,
}

impl ColoringFunction for Mixed {
    fn spatial_dim(&self) -> usize {
        2
    }
    fn num_outputs(&self) -> usize {
        self.colors + 1
    }
    fn evaluate(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        let rows = inputs.len() / 2;
        let mut out = vec![0.0; rows * (self.colors + 1)];
        for p in out.chunks_mut(self.colors + 1) {
            p[0] = 1.0 - self.beta;
            p[self.colors] = self.beta;
        }
        Ok(out)
    }
}

pub fn small_net(spec: &LossSpec, seed: u64) -> Network {
    let mut arch = NetworkArchitecture::new(spec.dimension, vec![10, 10], spec.output_arity());
    arch.param_ranges = spec.param_ranges();
    arch.omega0 = 4.0;
    init_network(&arch, seed).unwrap()
}

pub fn constant(colors: usize) -> impl ColoringFunction {
    reference_coloring(ReferenceColoringId::Constant { colors, color: 0 }).unwrap()
}

pub fn uniform(colors: usize) -> impl ColoringFunction {
    reference_coloring(ReferenceColoringId::Uniform { colors }).unwrap()
}

pub fn all_specs() -> Vec<LossSpec> {
    let unit = LossSpec::new(Variant::Unit, 3).with_batch(40, 3);
    let offdiag = LossSpec::new(Variant::OffDiagonal, 3)
        .with_distances(vec![
            DistanceSpec::Fixed(1.0),
            DistanceSpec::Fixed(0.7),
            DistanceSpec::Range([0.4, 1.6]),
        ])
        .with_batch(40, 3);
    let mut lagrangian = LossSpec::new(Variant::Lagrangian, 3).with_batch(40, 3);
    lagrangian.lagrange_lambda = 0.3;
    let mut triangle = LossSpec::new(Variant::Triangle, 2).with_batch(40, 3);
    triangle.triangle_sides = [DistanceSpec::Range([0.8, 1.2]), DistanceSpec::Fixed(0.9)];
    let mut unit3 = LossSpec::new(Variant::Unit, 4).with_batch(30, 2);
    unit3.dimension = 3;
    let mut lp = LossSpec::new(Variant::Unit, 3).with_batch(30, 2);
    lp.p_norm = 1.0;
    vec![unit, offdiag, lagrangian, triangle, unit3, lp]
}
