use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use serde::Serialize;

use super::PlanningError;
use crate::geometry::Point;
use crate::world::{Cell, OccupancyGrid};

/// Cost-to-goal per cell, meters. Unreachable cells hold `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    cols: usize,
    rows: usize,
    resolution: f64,
    goal: Cell,
    values: Vec<f64>,
}

impl PotentialField {
    pub fn goal(&self) -> Cell {
        self.goal
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, cell: Cell) -> f64 {
        self.index(cell).map_or(f64::INFINITY, |i| self.values[i])
    }

    pub fn is_reachable(&self, cell: Cell) -> bool {
        self.value(cell).is_finite()
    }

    pub fn center(&self, cell: Cell) -> Point {
        Point::new(
            (cell.col as f64 + 0.5) * self.resolution,
            (cell.row as f64 + 0.5) * self.resolution,
        )
    }

    fn index(&self, cell: Cell) -> Option<usize> {
        let in_bounds =
            cell.col >= 0 && cell.row >= 0 && (cell.col as usize) < self.cols && (cell.row as usize) < self.rows;
        in_bounds.then(|| cell.row as usize * self.cols + cell.col as usize)
    }
}

/// Moves out of `cell` with their step length in cells. A diagonal step
/// needs both orthogonal cells it squeezes between to pass `open`.
pub(crate) fn moves(cell: Cell, open: impl Fn(Cell) -> bool) -> impl Iterator<Item = (Cell, f64)> {
    let n = OccupancyGrid::neighbors8(cell);
    n.into_iter().filter_map(move |m| {
        let (dc, dr) = (m.col - cell.col, m.row - cell.row);
        if !open(m) {
            return None;
        }
        if dc != 0 && dr != 0 {
            let side_a = Cell::new(cell.col + dc, cell.row);
            let side_b = Cell::new(cell.col, cell.row + dr);
            (open(side_a) && open(side_b)).then_some((m, SQRT_2))
        } else {
            Some((m, 1.0))
        }
    })
}

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    index: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over 8-connected free cells from `goal`. Edge costs are the
/// step length in meters; corners are not cut.
pub fn plan_potential(grid: &OccupancyGrid, goal: Cell) -> Result<PotentialField, PlanningError> {
    if !grid.is_free(goal) {
        return Err(PlanningError::GoalOccupied(goal));
    }
    let res = grid.resolution();
    let mut values = vec![f64::INFINITY; grid.len()];
    let start = grid.index(goal).expect("free cells are on the grid");
    values[start] = 0.0;
    let mut heap = BinaryHeap::from([Entry {
        cost: 0.0,
        index: start,
    }]);
    while let Some(Entry { cost, index }) = heap.pop() {
        if cost > values[index] {
            continue;
        }
        let cell = grid.cell_at_index(index);
        for (next, len) in moves(cell, |c| grid.is_free(c)) {
            let j = grid.index(next).expect("free cells are on the grid");
            let candidate = cost + len * res;
            if candidate < values[j] {
                values[j] = candidate;
                heap.push(Entry {
                    cost: candidate,
                    index: j,
                });
            }
        }
    }
    Ok(PotentialField {
        cols: grid.cols(),
        rows: grid.rows(),
        resolution: res,
        goal,
        values,
    })
}

/// Cell-centre waypoints from start to goal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub cells: Vec<Cell>,
    pub waypoints: Vec<Point>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    /// Polyline length, meters.
    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    pub fn goal(&self) -> Option<Point> {
        self.waypoints.last().copied()
    }
}

/// Steepest descent from `start`: each step goes to the move minimising
/// neighbour potential plus step cost, first in neighbour order on ties.
pub fn extract_path(field: &PotentialField, start: Cell) -> Result<Path, PlanningError> {
    if !field.is_reachable(start) {
        return Err(PlanningError::NoPath(start));
    }
    let mut cells = vec![start];
    let mut cur = start;
    while cur != field.goal {
        let mut best: Option<(Cell, f64)> = None;
        for (next, len) in moves(cur, |c| field.is_reachable(c)) {
            let score = field.value(next) + len * field.resolution;
            if best.is_none_or(|(_, s)| score < s) {
                best = Some((next, score));
            }
        }
        let (next, _) = best.ok_or(PlanningError::NoPath(start))?;
        // Potentials strictly decrease along the walk; anything else means
        // the field was not produced by `plan_potential`.
        if field.value(next) >= field.value(cur) || cells.len() > field.values.len() {
            return Err(PlanningError::NoPath(start));
        }
        cells.push(next);
        cur = next;
    }
    let waypoints = cells.iter().map(|&c| field.center(c)).collect();
    Ok(Path { cells, waypoints })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goal_is_zero_and_corner_is_diagonal() {
        let grid = OccupancyGrid::empty(5, 5, 0.25).unwrap();
        let field = plan_potential(&grid, Cell::new(0, 0)).unwrap();
        assert_eq!(field.value(Cell::new(0, 0)), 0.0);
        let expected = 4.0 * SQRT_2 * 0.25;
        assert!((field.value(Cell::new(4, 4)) - expected).abs() < 1e-12);
    }

    #[test]
    fn sealed_cells_are_unreachable() {
        let mut cells = vec![false; 25];
        // Wall off the top-right cell.
        for (c, r) in [(3, 4), (3, 3), (4, 3)] {
            cells[r * 5 + c] = true;
        }
        let grid = OccupancyGrid::from_cells(5, 5, 0.25, cells).unwrap();
        let field = plan_potential(&grid, Cell::new(0, 0)).unwrap();
        assert!(field.value(Cell::new(4, 4)).is_infinite());
        assert!(matches!(
            extract_path(&field, Cell::new(4, 4)),
            Err(PlanningError::NoPath(_))
        ));
        assert!(matches!(
            plan_potential(&grid, Cell::new(3, 3)),
            Err(PlanningError::GoalOccupied(_))
        ));
    }

    #[test]
    fn diagonal_squeeze_is_blocked() {
        let mut cells = vec![false; 4];
        cells[1] = true;
        cells[2] = true;
        let grid = OccupancyGrid::from_cells(2, 2, 1.0, cells).unwrap();
        let field = plan_potential(&grid, Cell::new(0, 0)).unwrap();
        assert!(field.value(Cell::new(1, 1)).is_infinite());
    }

    #[test]
    fn degenerate_and_straight_paths() {
        let grid = OccupancyGrid::empty(20, 20, 0.25).unwrap();
        let field = plan_potential(&grid, Cell::new(10, 10)).unwrap();
        let path = extract_path(&field, Cell::new(10, 10)).unwrap();
        assert_eq!(path.cells, vec![Cell::new(10, 10)]);
        let path = extract_path(&field, Cell::new(0, 10)).unwrap();
        assert_eq!(path.len(), 11);
        assert!((path.length() - 2.5).abs() < 1e-12);
        for w in path.cells.windows(2) {
            assert_eq!(w[0].chebyshev(&w[1]), 1);
        }
    }
}
