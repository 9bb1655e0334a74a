//! Planar geometric substrate: points, poses, regions, disc footprints,
//! polylines, convex hulls and the closed-form collision predicates used by
//! the planner and the intent classifier.
//!
//! Everything here is an immutable value type; all operations are pure.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Consecutive polyline vertices closer than this are merged.
pub const DUPLICATE_VERTEX_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("invalid rect: min ({0}, {1}) must be strictly below max ({2}, {3})")]
    InvalidRect(f64, f64, f64, f64),
    #[error("footprint radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("polyline needs at least one vertex")]
    EmptyPolyline,
    #[error("convex hull of an empty point set")]
    EmptyHull,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Checked constructor rejecting NaN/Inf.
    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeometryError::NonFinite(x, y))
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Self, t: f64) -> Self {
        self + (o - self) * t
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.4}, {:.4})", self.x, self.y)
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let wrapped = (a + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can land exactly on 2π for tiny negative inputs
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Table-plane pose of an object: center position plus heading.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose2 {
    pub position: Point2,
    heading: f64,
}

impl Pose2 {
    pub fn new(position: Point2, heading: f64) -> Self {
        Self {
            position,
            heading: normalize_angle(heading),
        }
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }
}

/// Axis-aligned rectangle with `min < max` on both axes. Membership is closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RectRepr", into = "RectRepr")]
pub struct Rect {
    min: Point2,
    max: Point2,
}

#[derive(Serialize, Deserialize)]
struct RectRepr {
    min: Point2,
    max: Point2,
}

impl TryFrom<RectRepr> for Rect {
    type Error = GeometryError;
    fn try_from(r: RectRepr) -> Result<Self, Self::Error> {
        Rect::new(r.min, r.max)
    }
}

impl From<Rect> for RectRepr {
    fn from(r: Rect) -> Self {
        RectRepr {
            min: r.min,
            max: r.max,
        }
    }
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Result<Self, GeometryError> {
        for p in [min, max] {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite(p.x, p.y));
            }
        }
        if min.x < max.x && min.y < max.y {
            Ok(Self { min, max })
        } else {
            Err(GeometryError::InvalidRect(min.x, min.y, max.x, max.y))
        }
    }

    /// Square or rectangle of the given size around `center`.
    pub fn centered(center: Point2, width: f64, height: f64) -> Result<Self, GeometryError> {
        let h = Point2::new(width / 2.0, height / 2.0);
        Self::new(center - h, center + h)
    }

    pub fn min(&self) -> Point2 {
        self.min
    }

    pub fn max(&self) -> Point2 {
        self.max
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2 {
        self.min.lerp(self.max, 0.5)
    }

    pub fn contains(&self, p: Point2) -> bool {
        point_in_rect(p, self)
    }

    /// Closest point of the rect to `p` (identity for interior points).
    pub fn clamp(&self, p: Point2) -> Point2 {
        Point2::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
        )
    }

    pub fn distance(&self, p: Point2) -> f64 {
        p.distance(self.clamp(p))
    }

    /// Rect shrunk by `margin` on every side, `None` when nothing is left.
    pub fn shrink(&self, margin: f64) -> Option<Rect> {
        let m = Point2::new(margin, margin);
        Rect::new(self.min + m, self.max - m).ok()
    }

    pub fn intersection(&self, o: &Rect) -> Option<Rect> {
        Rect::new(
            Point2::new(self.min.x.max(o.min.x), self.min.y.max(o.min.y)),
            Point2::new(self.max.x.min(o.max.x), self.max.y.min(o.max.y)),
        )
        .ok()
    }

    /// Closed-set overlap test (shared boundary counts).
    pub fn overlaps(&self, o: &Rect) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }
}

/// Disc footprint of an object on the table.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Footprint {
    radius: f64,
}

impl Footprint {
    pub fn new(radius: f64) -> Result<Self, GeometryError> {
        if radius.is_finite() && radius > 0.0 {
            Ok(Self { radius })
        } else {
            Err(GeometryError::InvalidRadius(radius))
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Ordered path of at least one vertex with consecutive duplicates removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polyline {
    vertices: Vec<Point2>,
}

impl TryFrom<Vec<Point2>> for Polyline {
    type Error = GeometryError;
    fn try_from(v: Vec<Point2>) -> Result<Self, Self::Error> {
        Polyline::new(v)
    }
}

impl From<Polyline> for Vec<Point2> {
    fn from(p: Polyline) -> Self {
        p.vertices
    }
}

impl Polyline {
    pub fn new(points: impl IntoIterator<Item = Point2>) -> Result<Self, GeometryError> {
        let mut vertices: Vec<Point2> = Vec::new();
        for p in points {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite(p.x, p.y));
            }
            match vertices.last() {
                Some(last) if last.distance(p) <= DUPLICATE_VERTEX_EPS => {}
                _ => vertices.push(p),
            }
        }
        if vertices.is_empty() {
            return Err(GeometryError::EmptyPolyline);
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn first(&self) -> Point2 {
        self.vertices[0]
    }

    pub fn last(&self) -> Point2 {
        *self.vertices.last().expect("polyline is never empty")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        path_length(self)
    }

    /// Point at arc-length `s` from the start, clamped to the ends.
    pub fn point_at(&self, s: f64) -> Point2 {
        if s <= 0.0 {
            return self.first();
        }
        let mut remaining = s;
        for w in self.vertices.windows(2) {
            let seg = w[0].distance(w[1]);
            if remaining <= seg {
                return w[0].lerp(w[1], remaining / seg);
            }
            remaining -= seg;
        }
        self.last()
    }
}

pub fn point_in_rect(p: Point2, r: &Rect) -> bool {
    r.min.x <= p.x && p.x <= r.max.x && r.min.y <= p.y && p.y <= r.max.y
}

/// Sum of Euclidean segment lengths; 0 for a single vertex.
pub fn path_length(path: &Polyline) -> f64 {
    path.vertices.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Closest point to `p` on the closed segment `a`–`b`.
pub fn closest_point_on_segment(p: Point2, a: Point2, b: Point2) -> Point2 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    p.distance(closest_point_on_segment(p, a, b))
}

/// Convex hull with counter-clockwise vertices.
///
/// Collinear or coincident inputs yield a degenerate hull of two vertices
/// (a segment) or one vertex (a point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Hull {
    vertices: Vec<Point2>,
}

impl TryFrom<Vec<Point2>> for Hull {
    type Error = GeometryError;
    fn try_from(v: Vec<Point2>) -> Result<Self, Self::Error> {
        convex_hull(&v)
    }
}

impl From<Hull> for Vec<Point2> {
    fn from(h: Hull) -> Self {
        h.vertices
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullKind {
    Point,
    Segment,
    Polygon,
}

impl Hull {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn kind(&self) -> HullKind {
        match self.vertices.len() {
            1 => HullKind::Point,
            2 => HullKind::Segment,
            _ => HullKind::Polygon,
        }
    }

    /// Edges in order; a segment hull has one edge, a point hull none.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        let count = match n {
            1 => 0,
            2 => 1,
            _ => n,
        };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Point-in-polygon with an absolute tolerance in meters.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// Euclidean distance from `p` to the closed hull (0 inside).
    pub fn distance(&self, p: Point2) -> f64 {
        p.distance(self.closest_point(p))
    }

    pub fn closest_point(&self, p: Point2) -> Point2 {
        match self.kind() {
            HullKind::Point => self.vertices[0],
            HullKind::Segment => closest_point_on_segment(p, self.vertices[0], self.vertices[1]),
            HullKind::Polygon => {
                let inside = self.edges().all(|(a, b)| (b - a).cross(p - a) >= 0.0);
                if inside {
                    return p;
                }
                self.edges()
                    .map(|(a, b)| closest_point_on_segment(p, a, b))
                    .min_by(|u, v| p.distance(*u).total_cmp(&p.distance(*v)))
                    .expect("polygon has edges")
            }
        }
    }

    /// Nearest point strictly farther than `radius` from the hull.
    ///
    /// Returns `p` itself when it is already clear. The result is nudged
    /// outward by `1e-7` m so it satisfies the open clearance condition.
    pub fn nearest_clear_point(&self, p: Point2, radius: f64) -> Point2 {
        if self.distance(p) > radius {
            return p;
        }
        let mut candidates: Vec<Point2> = Vec::new();
        for &v in &self.vertices {
            let dir = (p - v).normalized().unwrap_or(Point2::new(1.0, 0.0));
            candidates.push(v + dir * radius);
        }
        let mut push_edge = |a: Point2, b: Point2| {
            if let Some(d) = (b - a).normalized() {
                // both sides: for degenerate hulls either side is outward
                for n in [Point2::new(d.y, -d.x), Point2::new(-d.y, d.x)] {
                    let offset = radius - (p - a).dot(n);
                    candidates.push(p + n * offset);
                }
            }
        };
        for (a, b) in self.edges() {
            push_edge(a, b);
        }
        let best = candidates
            .into_iter()
            .filter(|c| self.distance(*c) >= radius - 1e-9)
            .min_by(|u, v| p.distance(*u).total_cmp(&p.distance(*v)))
            .unwrap_or(p);
        let outward = (best - self.closest_point(best))
            .normalized()
            .unwrap_or(Point2::new(1.0, 0.0));
        best + outward * 1e-7
    }
}

fn orientation(o: Point2, a: Point2, b: Point2) -> f64 {
    (a - o).cross(b - o)
}

/// Andrew's monotone chain. Collinear boundary points are dropped.
pub fn convex_hull(points: &[Point2]) -> Result<Hull, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyHull);
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite(p.x, p.y));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.distance(*b) <= DUPLICATE_VERTEX_EPS);
    if pts.len() <= 2 {
        return Ok(Hull { vertices: pts });
    }

    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && orientation(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && orientation(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);

    if lower.len() < 3 {
        // all collinear: keep the two extremes
        let a = pts[0];
        let b = *pts.last().expect("nonempty");
        return Ok(Hull { vertices: vec![a, b] });
    }
    Ok(Hull { vertices: lower })
}

/// Closed disc vs closed hull: true iff they share a point.
pub fn disc_hull_intersects(center: Point2, radius: f64, hull: &Hull) -> bool {
    hull.distance(center) <= radius
}

/// Open contact: touching discs do not collide.
pub fn disc_disc_collides(a: Point2, ra: f64, b: Point2, rb: f64) -> bool {
    a.distance(b) < ra + rb
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_rect() -> Rect {
        Rect::new(Point2::new(-1.0, -1.0), Point2::new(1.0, 1.0)).unwrap()
    }

    fn poly(pts: &[(f64, f64)]) -> Polyline {
        Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y))).unwrap()
    }

    #[test]
    fn rect_membership_is_closed() {
        let r = unit_rect();
        assert!(point_in_rect(Point2::new(0.0, 0.0), &r));
        assert!(point_in_rect(Point2::new(1.0, 1.0), &r));
        assert!(!point_in_rect(Point2::new(1.0001, 0.0), &r));
    }

    #[test]
    fn rect_rejects_degenerate_bounds() {
        assert!(Rect::new(Point2::new(0.0, 0.0), Point2::new(0.0, 1.0)).is_err());
        assert!(Rect::new(Point2::new(0.0, 0.0), Point2::new(f64::NAN, 1.0)).is_err());
    }

    #[test]
    fn path_lengths() {
        assert_eq!(path_length(&poly(&[(0.0, 0.0)])), 0.0);
        assert_eq!(path_length(&poly(&[(0.0, 0.0), (3.0, 4.0)])), 5.0);
        assert_eq!(path_length(&poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)])), 2.0);
    }

    #[test]
    fn polyline_drops_consecutive_duplicates() {
        let p = poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1e-12)]);
        assert_eq!(p.len(), 2);
        assert!(Polyline::new(Vec::new()).is_err());
    }

    #[test]
    fn hull_drops_interior_point() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.2, 0.2),
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.kind(), HullKind::Polygon);
        assert_eq!(h.vertices().len(), 3);
        for v in [pts[0], pts[1], pts[2]] {
            assert!(h.vertices().contains(&v));
        }
        // counter-clockwise
        let v = h.vertices();
        assert!(orientation(v[0], v[1], v[2]) > 0.0);
    }

    #[test]
    fn degenerate_hulls() {
        let seg = convex_hull(&[Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)]).unwrap();
        assert_eq!(seg.kind(), HullKind::Segment);
        let collinear = convex_hull(&[
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(1.0, 1.0),
        ])
        .unwrap();
        assert_eq!(collinear.kind(), HullKind::Segment);
        assert_eq!(collinear.vertices().len(), 2);
        let point = convex_hull(&[Point2::new(0.5, 0.5); 3]).unwrap();
        assert_eq!(point.kind(), HullKind::Point);
        assert_eq!(convex_hull(&[]), Err(GeometryError::EmptyHull));
    }

    #[test]
    fn disc_hull_cases() {
        let h = convex_hull(&[
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        assert!(disc_hull_intersects(Point2::new(0.5, 0.5), 1e-6, &h));
        assert!(!disc_hull_intersects(Point2::new(1.5, 0.5), 0.4, &h));
        // tangent: closed sets touch
        assert!(disc_hull_intersects(Point2::new(1.5, 0.5), 0.5, &h));
    }

    #[test]
    fn disc_disc_cases() {
        let o = Point2::new(0.0, 0.0);
        assert!(!disc_disc_collides(o, 1.0, Point2::new(2.0, 0.0), 1.0));
        assert!(disc_disc_collides(o, 1.0, Point2::new(1.9, 0.0), 1.0));
        assert!(disc_disc_collides(o, 1.0, o, 1.0));
    }

    #[test]
    fn nearest_clear_point_leaves_inflated_hull() {
        let h = convex_hull(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
        let p = Point2::new(0.5, 0.05);
        let q = h.nearest_clear_point(p, 0.2);
        assert!(h.distance(q) > 0.2);
        assert!((q.y - 0.2).abs() < 1e-6 && (q.x - 0.5).abs() < 1e-9);

        let sq = convex_hull(&[
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        let q = sq.nearest_clear_point(Point2::new(0.9, 0.5), 0.1);
        assert!((q.x - 1.1).abs() < 1e-6);
        // corner region resolves onto the vertex arc
        let q = sq.nearest_clear_point(Point2::new(1.05, 1.05), 0.1);
        assert!((q.distance(Point2::new(1.0, 1.0)) - 0.1).abs() < 1e-6);
    }

    #[test]
    fn angles_normalize_into_half_open_range() {
        assert!((normalize_angle(3.0 * PI) + PI).abs() < 1e-12);
        assert_eq!(Pose2::new(Point2::default(), PI).heading(), -PI);
        assert!((normalize_angle(-0.5) + 0.5).abs() < 1e-12);
    }
}
