use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// A point in the world frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Wraps an angle into `(-PI, PI]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let wrapped = theta.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Planar robot pose. `theta` is kept in `(-PI, PI]` by every constructor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn at(point: Point) -> Self {
        Self::new(point.x, point.y, 0.0)
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }
}

/// A straight wall, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: Point,
    pub to: Point,
}

impl Segment {
    pub fn new(from: impl Into<Point>, to: impl Into<Point>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
        }
    }

    /// Euclidean distance from `p` to the closest point of the segment.
    pub fn distance_to(&self, p: Point) -> f64 {
        let (dx, dy) = (self.to.x - self.from.x, self.to.y - self.from.y);
        let len_sq = dx * dx + dy * dy;
        if len_sq == 0.0 {
            return p.distance(&self.from);
        }
        let t = (((p.x - self.from.x) * dx + (p.y - self.from.y) * dy) / len_sq).clamp(0.0, 1.0);
        p.distance(&Point::new(self.from.x + t * dx, self.from.y + t * dy))
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// True when the open segments cross at a single interior point.
pub fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Even-odd containment test. Points exactly on an edge may land either way.
pub fn point_in_polygon(p: Point, polygon: &[Point]) -> bool {
    let mut inside = false;
    let n = polygon.len();
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn polygon_centroid(polygon: &[Point]) -> Point {
    let n = polygon.len().max(1) as f64;
    let (sx, sy) = polygon.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}

/// A polygon is simple when no two non-adjacent edges cross.
pub fn polygon_is_simple(polygon: &[Point]) -> bool {
    let n = polygon.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[(i + 1) % n]);
        for j in (i + 1)..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (c, d) = (polygon[j], polygon[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Interior-overlap test for two simple polygons. Shared edges and touching
/// corners do not count as overlap.
pub fn polygons_overlap(a: &[Point], b: &[Point]) -> bool {
    let edges = |poly: &[Point]| -> Vec<(Point, Point)> {
        (0..poly.len()).map(|i| (poly[i], poly[(i + 1) % poly.len()])).collect()
    };
    let (ea, eb) = (edges(a), edges(b));
    for &(p, q) in &ea {
        for &(r, s) in &eb {
            if segments_cross(p, q, r, s) {
                return true;
            }
        }
    }
    let strictly_inside = |p: Point, poly: &[Point], poly_edges: &[(Point, Point)]| {
        point_in_polygon(p, poly)
            && poly_edges
                .iter()
                .all(|&(r, s)| Segment::new(r, s).distance_to(p) > 1e-9)
    };
    let probes = |poly: &[Point], poly_edges: &[(Point, Point)]| -> Vec<Point> {
        let mut pts: Vec<Point> = poly.to_vec();
        pts.extend(
            poly_edges
                .iter()
                .map(|&(p, q)| Point::new((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)),
        );
        pts.push(polygon_centroid(poly));
        pts
    };
    probes(a, &ea).into_iter().any(|p| strictly_inside(p, b, &eb))
        || probes(b, &eb).into_iter().any(|p| strictly_inside(p, a, &ea))
}
