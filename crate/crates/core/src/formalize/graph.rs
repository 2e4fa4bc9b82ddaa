use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use rayon::prelude::*;

use super::CellColoring;
use crate::geometry::{lattice_translates, CellGrid, Lattice};

/// Two same-colored cells whose distance interval contains the color's
/// avoided distance. Cell `b` is taken translated by `translate`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConflictEdge {
    pub a: usize,
    pub b: usize,
    pub translate: Vec<i64>,
    pub color: u32,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConflictGraph {
    pub edges: Vec<ConflictEdge>,
}

impl ConflictGraph {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Cells touching at least one edge, ascending.
    pub fn nodes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.edges.iter().flat_map(|e| [e.a, e.b]).collect();
        set.into_iter().collect()
    }

    pub fn degrees(&self) -> HashMap<usize, usize> {
        let mut deg = HashMap::new();
        for e in &self.edges {
            *deg.entry(e.a).or_insert(0) += 1;
            if e.b != e.a {
                *deg.entry(e.b).or_insert(0) += 1;
            }
        }
        deg
    }
}

/// Fine-grid offsets `o` (cell `a` to cell `a + o`) whose distance interval
/// contains `d`.
pub(crate) fn stencil(grid: &CellGrid, d: f64) -> Vec<Vec<i64>> {
    let fine = Lattice::new_unchecked_angle(grid.cell_edges()).expect("cell edges span the lattice");
    lattice_translates(&fine, d)
        .into_iter()
        .filter(|o| grid.offset_interval(o).contains(d))
        .collect()
}

/// Stencil of every regular color (shared between colors of equal distance).
pub(crate) struct Stencils {
    by_color: Vec<usize>,
    sets: Vec<Vec<Vec<i64>>>,
}

impl Stencils {
    pub(crate) fn new(coloring: &CellColoring) -> Self {
        let mut distances: Vec<f64> = Vec::new();
        let by_color = coloring
            .avoided_distances()
            .iter()
            .map(|&d| match distances.iter().position(|&x| x.to_bits() == d.to_bits()) {
                Some(i) => i,
                None => {
                    distances.push(d);
                    distances.len() - 1
                }
            })
            .collect();
        let sets = distances.par_iter().map(|&d| stencil(coloring.grid(), d)).collect();
        Stencils { by_color, sets }
    }

    /// Offsets for a 1-based regular color.
    pub(crate) fn of(&self, color: u32) -> &[Vec<i64>] {
        &self.sets[self.by_color[color as usize - 1]]
    }
}

/// Cell reached from `index` by fine offset `o`, and the lattice translate
/// that carries it back into the domain.
#[inline]
pub(crate) fn neighbor(res: &[usize], index: &[usize], o: &[i64], translate: &mut [i64]) -> usize {
    let mut lin = 0usize;
    for i in 0..res.len() {
        let k = res[i] as i64;
        let s = index[i] as i64 + o[i];
        translate[i] = s.div_euclid(k);
        lin = lin * res[i] + s.rem_euclid(k) as usize;
    }
    lin
}

fn translate_is_positive(t: &[i64]) -> bool {
    t.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// All conflict edges, each unordered pair reported once with `a < b`, or
/// `a == b` and a lexicographically positive translate.
pub fn conflict_edges(coloring: &CellColoring) -> ConflictGraph {
    let stencils = Stencils::new(coloring);
    conflict_edges_with(coloring, &stencils)
}

pub(crate) fn conflict_edges_with(coloring: &CellColoring, stencils: &Stencils) -> ConflictGraph {
    let grid = coloring.grid();
    let res = grid.resolution();
    let bonus = coloring.bonus_color();
    let per_cell: Vec<Vec<ConflictEdge>> = (0..grid.cell_count())
        .into_par_iter()
        .map(|a| {
            let color = coloring.color(a);
            if color == bonus {
                return Vec::new();
            }
            let index = grid.unlinear(a);
            let mut t = vec![0i64; res.len()];
            let mut out = Vec::new();
            for o in stencils.of(color) {
                let b = neighbor(res, &index, o, &mut t);
                if coloring.color(b) != color {
                    continue;
                }
                if a < b || (a == b && translate_is_positive(&t)) {
                    out.push(ConflictEdge {
                        a,
                        b,
                        translate: t.clone(),
                        color,
                    });
                }
            }
            out
        })
        .collect();
    let mut edges: Vec<ConflictEdge> = per_cell.into_iter().flatten().collect();
    edges.sort();
    ConflictGraph { edges }
}

/// A small set of nodes touching every edge (self-loops force their node).
///
/// Runs greedy max-degree selection and the maximal-matching 2-approximation,
/// keeps the smaller result, then drops nodes whose edges are all covered by
/// other chosen nodes. Never more than twice the minimum.
pub fn hitting_set(edges: &[(usize, usize)]) -> Vec<usize> {
    if edges.is_empty() {
        return Vec::new();
    }
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        incident.entry(a).or_default().push(i);
        if a != b {
            incident.entry(b).or_default().push(i);
        }
    }

    let greedy = {
        let mut covered = vec![false; edges.len()];
        let mut live: HashMap<usize, usize> = incident.iter().map(|(&n, e)| (n, e.len())).collect();
        let mut heap: BinaryHeap<(usize, Reverse<usize>)> = live.iter().map(|(&n, &d)| (d, Reverse(n))).collect();
        let mut chosen = BTreeSet::new();
        while let Some((d, Reverse(n))) = heap.pop() {
            if d == 0 || live[&n] != d {
                continue;
            }
            chosen.insert(n);
            for &e in &incident[&n] {
                if covered[e] {
                    continue;
                }
                covered[e] = true;
                let (a, b) = edges[e];
                for m in [a, b] {
                    if m != n && !(a == b) {
                        let dm = live.get_mut(&m).unwrap();
                        *dm -= 1;
                        heap.push((*dm, Reverse(m)));
                    }
                }
            }
            live.insert(n, 0);
        }
        chosen
    };

    let matching = {
        let mut chosen = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                chosen.insert(a);
            }
        }
        for &(a, b) in edges {
            if !chosen.contains(&a) && !chosen.contains(&b) {
                chosen.insert(a);
                chosen.insert(b);
            }
        }
        chosen
    };

    let mut chosen = if matching.len() < greedy.len() {
        matching
    } else {
        greedy
    };
    let mut order: Vec<usize> = chosen.iter().copied().collect();
    order.sort_by_key(|n| (incident[n].len(), *n));
    for n in order {
        let redundant = incident[&n].iter().all(|&e| {
            let (a, b) = edges[e];
            let other = if a == n { b } else { a };
            other != n && chosen.contains(&other)
        });
        if redundant {
            chosen.remove(&n);
        }
    }
    chosen.into_iter().collect()
}
