//! Binary occupancy grid with wall inflation, line-of-sight traversal and a
//! capped clearance field for the local planner.

use serde::{Deserialize, Serialize};

use super::WorldError;
use crate::geometry::{Point, Segment};

/// Clearance values are saturated at this distance (meters).
pub const CLEARANCE_CAP: f64 = 1.0;

/// Column/row address of a grid cell. Signed so that off-grid neighbours can
/// be named; those are always treated as occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub col: i64,
    pub row: i64,
}

impl Cell {
    pub const fn new(col: i64, row: i64) -> Self {
        Self { col, row }
    }

    pub fn chebyshev(&self, other: &Cell) -> i64 {
        (self.col - other.col).abs().max((self.row - other.row).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    cols: usize,
    rows: usize,
    resolution: f64,
    cells: Vec<bool>,
    clearance: Vec<f64>,
}

impl OccupancyGrid {
    /// Builds a grid from a row-major occupancy vector (`cells[row * cols + col]`).
    pub fn from_cells(cols: usize, rows: usize, resolution: f64, cells: Vec<bool>) -> Result<Self, WorldError> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(WorldError::InvalidParameter(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if cells.len() != cols * rows {
            return Err(WorldError::InvalidParameter(format!(
                "expected {} cells for a {cols}x{rows} grid, got {}",
                cols * rows,
                cells.len()
            )));
        }
        let mut grid = Self {
            cols,
            rows,
            resolution,
            cells,
            clearance: Vec::new(),
        };
        grid.clearance = grid.compute_clearance();
        Ok(grid)
    }

    pub fn empty(cols: usize, rows: usize, resolution: f64) -> Result<Self, WorldError> {
        Self::from_cells(cols, rows, resolution, vec![false; cols * rows])
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

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.col >= 0 && cell.row >= 0 && (cell.col as usize) < self.cols && (cell.row as usize) < self.rows
    }

    pub fn index(&self, cell: Cell) -> Option<usize> {
        self.in_bounds(cell)
            .then(|| cell.row as usize * self.cols + cell.col as usize)
    }

    pub fn cell_at_index(&self, index: usize) -> Cell {
        Cell::new((index % self.cols) as i64, (index / self.cols) as i64)
    }

    /// Off-grid cells count as occupied.
    pub fn is_occupied(&self, cell: Cell) -> bool {
        self.index(cell).is_none_or(|i| self.cells[i])
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        !self.is_occupied(cell)
    }

    pub fn cell_of(&self, p: Point) -> Cell {
        Cell::new(
            (p.x / self.resolution).floor() as i64,
            (p.y / self.resolution).floor() as i64,
        )
    }

    pub fn center(&self, cell: Cell) -> Point {
        Point::new(
            (cell.col as f64 + 0.5) * self.resolution,
            (cell.row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn occupied_at(&self, p: Point) -> bool {
        self.is_occupied(self.cell_of(p))
    }

    /// True when the axis-aligned box of half-width `half` around `p` touches
    /// any occupied cell. Because the box contains the disc of radius `half`,
    /// a clear box means every point within `half` of `p` is free.
    pub fn box_touches_occupied(&self, p: Point, half: f64) -> bool {
        let lo = self.cell_of(Point::new(p.x - half, p.y - half));
        let hi = self.cell_of(Point::new(p.x + half, p.y + half));
        for row in lo.row..=hi.row {
            for col in lo.col..=hi.col {
                if self.is_occupied(Cell::new(col, row)) {
                    return true;
                }
            }
        }
        false
    }

    /// Distance from `p`'s cell center to the nearest occupied cell center,
    /// saturated at [`CLEARANCE_CAP`].
    pub fn clearance_at(&self, p: Point) -> f64 {
        self.index(self.cell_of(p)).map_or(0.0, |i| self.clearance[i])
    }

    /// 4- then diagonal-neighbours in a fixed order.
    pub fn neighbors8(cell: Cell) -> [Cell; 8] {
        let Cell { col, row } = cell;
        [
            Cell::new(col + 1, row),
            Cell::new(col - 1, row),
            Cell::new(col, row + 1),
            Cell::new(col, row - 1),
            Cell::new(col + 1, row + 1),
            Cell::new(col - 1, row + 1),
            Cell::new(col + 1, row - 1),
            Cell::new(col - 1, row - 1),
        ]
    }

    /// Supercover traversal: every cell whose closed square the segment
    /// touches, including both side cells when it passes exactly through a
    /// lattice corner.
    pub fn cells_on_segment(&self, a: Point, b: Point) -> Vec<Cell> {
        let res = self.resolution;
        let (gx0, gy0) = (a.x / res, a.y / res);
        let (gx1, gy1) = (b.x / res, b.y / res);
        let mut cell = Cell::new(gx0.floor() as i64, gy0.floor() as i64);
        let end = Cell::new(gx1.floor() as i64, gy1.floor() as i64);
        let (dx, dy) = (gx1 - gx0, gy1 - gy0);
        let step_col = if dx > 0.0 { 1 } else { -1 };
        let step_row = if dy > 0.0 { 1 } else { -1 };
        let delta_x = if dx != 0.0 { (1.0 / dx).abs() } else { f64::INFINITY };
        let delta_y = if dy != 0.0 { (1.0 / dy).abs() } else { f64::INFINITY };
        let mut t_max_x = if dx > 0.0 {
            (cell.col as f64 + 1.0 - gx0) * delta_x
        } else if dx < 0.0 {
            (gx0 - cell.col as f64) * delta_x
        } else {
            f64::INFINITY
        };
        let mut t_max_y = if dy > 0.0 {
            (cell.row as f64 + 1.0 - gy0) * delta_y
        } else if dy < 0.0 {
            (gy0 - cell.row as f64) * delta_y
        } else {
            f64::INFINITY
        };

        let mut out = vec![cell];
        let budget = (end.col - cell.col).unsigned_abs() + (end.row - cell.row).unsigned_abs() + 2;
        for _ in 0..budget {
            if cell == end {
                break;
            }
            let next_t = t_max_x.min(t_max_y);
            if next_t > 1.0 {
                break;
            }
            if (t_max_x - t_max_y).abs() <= 1e-12 {
                out.push(Cell::new(cell.col + step_col, cell.row));
                out.push(Cell::new(cell.col, cell.row + step_row));
                cell = Cell::new(cell.col + step_col, cell.row + step_row);
                t_max_x += delta_x;
                t_max_y += delta_y;
            } else if t_max_x < t_max_y {
                cell.col += step_col;
                t_max_x += delta_x;
            } else {
                cell.row += step_row;
                t_max_y += delta_y;
            }
            out.push(cell);
        }
        out
    }

    /// Line of sight between two points: no touched cell is occupied.
    pub fn segment_is_free(&self, a: Point, b: Point) -> bool {
        self.cells_on_segment(a, b).into_iter().all(|c| self.is_free(c))
    }

    fn compute_clearance(&self) -> Vec<f64> {
        let reach = (CLEARANCE_CAP / self.resolution).ceil() as i64 + 1;
        let mut out = vec![0.0; self.cells.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            if self.cells[i] {
                continue;
            }
            let c = self.cell_at_index(i);
            let mut best = CLEARANCE_CAP;
            for dr in -reach..=reach {
                for dc in -reach..=reach {
                    let n = Cell::new(c.col + dc, c.row + dr);
                    if self.is_occupied(n) {
                        let d = ((dc * dc + dr * dr) as f64).sqrt() * self.resolution;
                        if d < best {
                            best = d;
                        }
                    }
                }
            }
            *slot = best;
        }
        out
    }
}

/// Marks every cell whose center lies within `inflation` of a wall.
pub fn rasterize(
    walls: &[Segment],
    width: f64,
    height: f64,
    resolution: f64,
    inflation: f64,
) -> Result<OccupancyGrid, WorldError> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(WorldError::InvalidParameter(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if !(width > 0.0 && height > 0.0) {
        return Err(WorldError::InvalidParameter(format!(
            "bounds must be positive, got {width}x{height}"
        )));
    }
    if inflation.is_nan() || inflation < 0.0 {
        return Err(WorldError::InvalidParameter(format!(
            "robot radius must be non-negative, got {inflation}"
        )));
    }
    let inside = |p: Point| p.is_finite() && (0.0..=width).contains(&p.x) && (0.0..=height).contains(&p.y);
    for (i, wall) in walls.iter().enumerate() {
        if !inside(wall.from) || !inside(wall.to) {
            return Err(WorldError::OutOfBounds(format!(
                "wall {i} ({:?} -> {:?}) leaves the {width}x{height} bounds",
                wall.from, wall.to
            )));
        }
    }
    let cols = (width / resolution).round() as usize;
    let rows = (height / resolution).round() as usize;
    let mut cells = vec![false; cols * rows];
    let reach = (inflation / resolution).ceil() as i64 + 1;
    let probe = OccupancyGrid {
        cols,
        rows,
        resolution,
        cells: Vec::new(),
        clearance: Vec::new(),
    };
    for wall in walls {
        let lo = probe.cell_of(Point::new(wall.from.x.min(wall.to.x), wall.from.y.min(wall.to.y)));
        let hi = probe.cell_of(Point::new(wall.from.x.max(wall.to.x), wall.from.y.max(wall.to.y)));
        for row in (lo.row - reach).max(0)..=(hi.row + reach).min(rows as i64 - 1) {
            for col in (lo.col - reach).max(0)..=(hi.col + reach).min(cols as i64 - 1) {
                let cell = Cell::new(col, row);
                if wall.distance_to(probe.center(cell)) <= inflation {
                    cells[row as usize * cols + col as usize] = true;
                }
            }
        }
    }
    OccupancyGrid::from_cells(cols, rows, resolution, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_world_is_all_free() {
        let grid = rasterize(&[], 10.0, 10.0, 0.25, 0.3).unwrap();
        assert_eq!((grid.cols(), grid.rows()), (40, 40));
        assert!((0..grid.len()).all(|i| grid.is_free(grid.cell_at_index(i))));
    }

    #[test]
    fn horizontal_wall_occupies_inflated_band() {
        let wall = Segment::new((0.0, 5.0), (10.0, 5.0));
        let grid = rasterize(&[wall], 10.0, 10.0, 0.25, 0.3).unwrap();
        // Per-cell oracle: a cell is occupied iff its center is within the
        // inflated segment.
        for i in 0..grid.len() {
            let c = grid.cell_at_index(i);
            let center = grid.center(c);
            let expect = wall.distance_to(center) <= 0.3;
            assert_eq!(grid.is_occupied(c), expect, "cell {c:?}");
        }
        let rows: Vec<i64> = (0..40).filter(|&r| grid.is_occupied(Cell::new(20, r))).collect();
        // Row centers 4.875 and 5.125 fall inside y in [4.7, 5.3].
        assert_eq!(rows, vec![19, 20]);
    }

    #[test]
    fn wall_outside_bounds_is_rejected() {
        let wall = Segment::new((0.0, 5.0), (12.0, 5.0));
        assert!(matches!(
            rasterize(&[wall], 10.0, 10.0, 0.25, 0.3),
            Err(WorldError::OutOfBounds(_))
        ));
    }

    #[test]
    fn non_positive_resolution_is_rejected() {
        assert!(matches!(
            rasterize(&[], 10.0, 10.0, 0.0, 0.3),
            Err(WorldError::InvalidParameter(_))
        ));
        assert!(matches!(
            rasterize(&[], 10.0, 10.0, -0.25, 0.3),
            Err(WorldError::InvalidParameter(_))
        ));
    }

    #[test]
    fn supercover_includes_corner_neighbours() {
        let grid = OccupancyGrid::empty(4, 4, 1.0).unwrap();
        let cells = grid.cells_on_segment(Point::new(0.5, 0.5), Point::new(2.5, 2.5));
        for expected in [
            Cell::new(0, 0),
            Cell::new(1, 0),
            Cell::new(0, 1),
            Cell::new(1, 1),
            Cell::new(2, 2),
        ] {
            assert!(cells.contains(&expected), "missing {expected:?}");
        }
    }

    #[test]
    fn supercover_straight_runs() {
        let grid = OccupancyGrid::empty(10, 10, 0.5).unwrap();
        let cells = grid.cells_on_segment(Point::new(0.25, 1.25), Point::new(4.1, 1.25));
        let cols: Vec<i64> = cells.iter().map(|c| c.col).collect();
        assert_eq!(cols, (0..=8).collect::<Vec<_>>());
        assert!(cells.iter().all(|c| c.row == 2));
        let back = grid.cells_on_segment(Point::new(4.1, 1.25), Point::new(0.25, 1.25));
        assert_eq!(back.len(), cells.len());
    }

    #[test]
    fn clearance_saturates_and_measures_center_distance() {
        let mut cells = vec![false; 20 * 20];
        cells[10 * 20 + 10] = true;
        let grid = OccupancyGrid::from_cells(20, 20, 0.25, cells).unwrap();
        let at = |c, r| grid.clearance_at(grid.center(Cell::new(c, r)));
        assert_eq!(at(10, 10), 0.0);
        assert!((at(11, 10) - 0.25).abs() < 1e-12);
        assert!((at(11, 11) - 0.25 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(at(16, 10), CLEARANCE_CAP);
        // Off-grid cells count as obstacles.
        assert!((at(0, 5) - 0.25).abs() < 1e-12);
    }
}
