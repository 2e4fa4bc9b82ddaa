use super::graph::{conflict_edges_with, hitting_set, neighbor, Stencils};
use super::CellColoring;

/// Whether `cell`, if colored `color`, would conflict with any cell.
fn conflicts_as(
    coloring: &CellColoring,
    stencils: &Stencils,
    cell: usize,
    color: u32,
    index: &[usize],
    t: &mut [i64],
) -> bool {
    let res = coloring.resolution();
    stencils.of(color).iter().any(|o| {
        let b = neighbor(res, index, o, t);
        b == cell || coloring.color(b) == color
    })
}

/// First regular color under which `cell` is conflict-free, if any.
fn free_color(coloring: &CellColoring, stencils: &Stencils, cell: usize, skip: u32) -> Option<u32> {
    let index = coloring.grid().unlinear(cell);
    let mut t = vec![0i64; index.len()];
    (1..=coloring.num_colors() as u32)
        .filter(|&c| c != skip)
        .find(|&c| !conflicts_as(coloring, stencils, cell, c, &index, &mut t))
}

/// Removes every conflict, changing only cells that were in conflict.
///
/// Each of the `rounds` passes visits conflicting cells by descending degree
/// and moves a cell to the first regular color that leaves it conflict-free.
/// Remaining conflicts are then resolved by recoloring a hitting set of the
/// conflict edges with the bonus color, after which bonus cells are returned
/// to a regular color wherever one is conflict-free.
pub fn repair(coloring: &CellColoring, rounds: usize) -> CellColoring {
    let stencils = Stencils::new(coloring);
    let mut out = coloring.clone();
    for round in 0..rounds {
        let graph = conflict_edges_with(&out, &stencils);
        if graph.is_empty() {
            break;
        }
        let degrees = graph.degrees();
        let mut order: Vec<(usize, usize)> = degrees.into_iter().collect();
        order.sort_by_key(|&(cell, d)| (std::cmp::Reverse(d), cell));
        let mut moved = 0;
        for (cell, _) in order {
            let current = out.color(cell);
            let index = out.grid().unlinear(cell);
            let mut t = vec![0i64; index.len()];
            if current == out.bonus_color() || !conflicts_as(&out, &stencils, cell, current, &index, &mut t) {
                continue;
            }
            if let Some(c) = free_color(&out, &stencils, cell, current) {
                out.set_color(cell, c);
                moved += 1;
            }
        }
        log::debug!(
            "repair round {round}: {} edges, {moved} cells recolored",
            graph.edges.len()
        );
        if moved == 0 {
            break;
        }
    }

    let graph = conflict_edges_with(&out, &stencils);
    if graph.is_empty() {
        return out;
    }
    let pairs: Vec<(usize, usize)> = graph.edges.iter().map(|e| (e.a, e.b)).collect();
    let chosen = hitting_set(&pairs);
    let bonus = out.bonus_color();
    for &cell in &chosen {
        out.set_color(cell, bonus);
    }
    let mut reclaimed = 0;
    for &cell in &chosen {
        if let Some(c) = free_color(&out, &stencils, cell, bonus) {
            out.set_color(cell, c);
            reclaimed += 1;
        }
    }
    log::debug!(
        "repair: {} edges resolved with {} bonus cells ({reclaimed} reclaimed)",
        graph.edges.len(),
        chosen.len() - reclaimed
    );
    out
}
