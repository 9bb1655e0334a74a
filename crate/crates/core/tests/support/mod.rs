//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::path::{Path, PathBuf};

use motion_reasoning::geometry::{convex_hull, Point2, Rect};
use motion_reasoning::planner::{ConfigSpace, GoalSpec};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
pub struct BenchScene {
    pub name: String,
    pub bounds: Rect,
    pub moving_radius: f64,
    /// `(center, footprint radius)`.
    pub obstacles: Vec<(Point2, f64)>,
    pub start: Point2,
    pub goal: BenchGoal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BenchGoal {
    Region { rect: Rect },
    /// Vertices are listed convex, counter-clockwise.
    Clearance { hull: Vec<Point2>, clearance_radius: f64 },
}

impl BenchScene {
    pub fn cspace(&self) -> ConfigSpace {
        ConfigSpace::new(self.bounds, self.moving_radius, self.obstacles.iter().copied())
    }

    pub fn goal_spec(&self) -> GoalSpec {
        match &self.goal {
            BenchGoal::Region { rect } => GoalSpec::Region { rect: *rect },
            BenchGoal::Clearance { hull, clearance_radius } => GoalSpec::Clearance {
                hull: convex_hull(hull).unwrap(),
                clearance_radius: *clearance_radius,
            },
        }
    }
}

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn bench_scenes() -> Vec<BenchScene> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(data_dir().join("bench"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    files
        .iter()
        .map(|f| serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap())
        .collect()
}

// ---- brute-force geometry ----

fn seg_dist(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0)
    };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Point inside a convex polygon given in either orientation.
pub fn brute_inside(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let (mut pos, mut neg) = (false, false);
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let c = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        pos |= c > 0.0;
        neg |= c < 0.0;
    }
    !(pos && neg)
}

/// Distance from `p` to a convex polygon (0 inside); handles 1- and
/// 2-vertex degenerate inputs.
pub fn brute_polygon_distance(p: Point2, poly: &[Point2]) -> f64 {
    if brute_inside(p, poly) {
        return 0.0;
    }
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            seg_dist((p.x, p.y), (a.x, a.y), (b.x, b.y))
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn brute_disc_polygon_intersects(c: Point2, r: f64, poly: &[Point2]) -> bool {
    brute_polygon_distance(c, poly) <= r
}

/// Whether every input point lies inside or on the polygon, within `tol`.
pub fn brute_encloses(poly: &[Point2], pts: &[Point2], tol: f64) -> bool {
    pts.iter().all(|&p| brute_polygon_distance(p, poly) <= tol || brute_inside(p, poly))
}

// ---- grid Dijkstra ----

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Shortest collision-free path cost on a grid of spacing `h`, with every
/// primitive move up to 3 cells per axis, checked by exact swept distance.
pub fn grid_dijkstra(scene: &BenchScene, h: f64) -> f64 {
    let b = scene.bounds;
    let r = scene.moving_radius;
    let obs: Vec<(f64, f64, f64)> = scene
        .obstacles
        .iter()
        .map(|(c, ro)| (c.x, c.y, ro + r))
        .collect();
    let nx = (b.width() / h).floor() as i64 + 1;
    let ny = (b.height() / h).floor() as i64 + 1;
    let at = |i: i64, j: i64| (b.min().x + i as f64 * h, b.min().y + j as f64 * h);
    let in_bounds = |p: (f64, f64)| p.0 >= b.min().x && p.0 <= b.max().x && p.1 >= b.min().y && p.1 <= b.max().y;
    let point_free = |p: (f64, f64)| in_bounds(p) && obs.iter().all(|o| ((p.0 - o.0).powi(2) + (p.1 - o.1).powi(2)).sqrt() >= o.2);
    let seg_free =
        |a: (f64, f64), c: (f64, f64)| in_bounds(a) && in_bounds(c) && obs.iter().all(|o| seg_dist((o.0, o.1), a, c) >= o.2);
    let in_goal = |p: (f64, f64)| match &scene.goal {
        BenchGoal::Region { rect } => {
            p.0 >= rect.min().x && p.0 <= rect.max().x && p.1 >= rect.min().y && p.1 <= rect.max().y
        }
        BenchGoal::Clearance { hull, clearance_radius } => {
            !brute_disc_polygon_intersects(Point2::new(p.0, p.1), *clearance_radius, hull)
        }
    };
    // cost from a node to the goal set: exact straight link for regions
    let terminal = |p: (f64, f64)| -> Option<f64> {
        if in_goal(p) {
            return Some(0.0);
        }
        if let BenchGoal::Region { rect } = &scene.goal {
            let q = (p.0.clamp(rect.min().x, rect.max().x), p.1.clamp(rect.min().y, rect.max().y));
            if seg_free(p, q) {
                return Some(((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt());
            }
        }
        None
    };

    let s = (scene.start.x, scene.start.y);
    if in_goal(s) {
        return 0.0;
    }
    let n = (nx * ny) as usize;
    let idx = |i: i64, j: i64| (j * nx + i) as usize;
    let mut free = vec![false; n];
    for j in 0..ny {
        for i in 0..nx {
            free[idx(i, j)] = point_free(at(i, j));
        }
    }
    let mut moves = Vec::new();
    for dx in -3i64..=3 {
        for dy in -3i64..=3 {
            if (dx, dy) != (0, 0) && gcd(dx, dy) == 1 {
                moves.push((dx, dy));
            }
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    let (si, sj) = (((s.0 - b.min().x) / h).round() as i64, ((s.1 - b.min().y) / h).round() as i64);
    let mut best = terminal(s).unwrap_or(f64::INFINITY);
    for di in -2..=2 {
        for dj in -2..=2 {
            let (i, j) = (si + di, sj + dj);
            if i < 0 || j < 0 || i >= nx || j >= ny || !free[idx(i, j)] {
                continue;
            }
            let p = at(i, j);
            if seg_free(s, p) {
                let d = ((p.0 - s.0).powi(2) + (p.1 - s.1).powi(2)).sqrt();
                if d < dist[idx(i, j)] {
                    dist[idx(i, j)] = d;
                    heap.push(Item(d, idx(i, j)));
                }
            }
        }
    }
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u] || d >= best {
            continue;
        }
        let (i, j) = ((u as i64) % nx, (u as i64) / nx);
        let p = at(i, j);
        if let Some(t) = terminal(p) {
            best = best.min(d + t);
            if t == 0.0 {
                continue;
            }
        }
        for &(dx, dy) in &moves {
            let (a, c) = (i + dx, j + dy);
            if a < 0 || c < 0 || a >= nx || c >= ny || !free[idx(a, c)] {
                continue;
            }
            let q = at(a, c);
            let nd = d + h * ((dx * dx + dy * dy) as f64).sqrt();
            let v = idx(a, c);
            if nd < dist[v] && seg_free(p, q) {
                dist[v] = nd;
                heap.push(Item(nd, v));
            }
        }
    }
    best
}

// ---- hand-built segments ----

use motion_reasoning::domain::{Event, ObjectId, Predicate, RegionId, StateSet};
use motion_reasoning::geometry::Polyline;
use motion_reasoning::segmentation::Segment;

pub fn obj(name: &str) -> ObjectId {
    ObjectId::new(name)
}

pub fn in_region(o: &str, r: RegionId) -> Predicate {
    Predicate::InRegion(obj(o), r)
}

/// A segment record with only what pooling reads filled in meaningfully.
pub fn bare_segment(index: usize, object: &str, achieved: &[Predicate], events: Vec<Event>) -> Segment {
    let set: StateSet = achieved.iter().cloned().collect();
    Segment {
        object: obj(object),
        frame_range: [index * 10, index * 10 + 9],
        motion_range: [index * 10, index * 10 + 9],
        core_range: [index * 10, index * 10 + 9],
        trajectory: Polyline::new([Point2::new(0.0, 0.0), Point2::new(0.1, 0.0)]).unwrap(),
        achieved: set.clone(),
        removed: StateSet::new(),
        events,
        start_state: StateSet::new(),
        end_state: set,
    }
}

/// Three-step cook scene: bowl to the stove, spam cooked, bowl back or not.
pub fn cook_pool_case(bowl_returns: bool) -> (Vec<(usize, Predicate)>, Vec<Segment>, StateSet) {
    let on_stove = in_region("bowl", RegionId::StoveLeft);
    let cooked = Predicate::Cooked(obj("spam"));
    let back = in_region("bowl", RegionId::Workspace);
    let cook = Event::Cook {
        ingredient: obj("spam"),
        container: obj("bowl"),
        stove: RegionId::StoveLeft,
    };
    let mut segments = vec![
        bare_segment(0, "bowl", std::slice::from_ref(&on_stove), vec![]),
        bare_segment(1, "spam", std::slice::from_ref(&cooked), vec![cook]),
    ];
    let mut intentional = vec![(0, on_stove.clone()), (1, cooked.clone())];
    let mut final_state: StateSet = [cooked, Predicate::In(obj("spam"), obj("bowl"))].into_iter().collect();
    if bowl_returns {
        segments.push(bare_segment(2, "bowl", std::slice::from_ref(&back), vec![]));
        intentional.push((2, back.clone()));
        final_state.insert(back);
    } else {
        final_state.insert(on_stove);
    }
    (intentional, segments, final_state)
}
