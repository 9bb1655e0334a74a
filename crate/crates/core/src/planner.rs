//! RRT* for a disc moving among disc obstacles on the table plane, with
//! region goals and convex-hull clearance goals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{disc_hull_intersects, point_segment_distance, Hull, Point2, Polyline, Rect};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("start {0} is in collision or outside the table")]
    StartInCollision(Point2),
    #[error("invalid planner parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Point2,
    /// Obstacle footprint plus the moving object's footprint.
    pub inflated_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSpace {
    pub bounds: Rect,
    pub obstacles: Vec<Obstacle>,
    pub moving_radius: f64,
}

impl ConfigSpace {
    /// Inflates each `(center, footprint radius)` by `moving_radius`.
    pub fn new(bounds: Rect, moving_radius: f64, obstacles: impl IntoIterator<Item = (Point2, f64)>) -> Self {
        Self {
            bounds,
            obstacles: obstacles
                .into_iter()
                .map(|(center, r)| Obstacle {
                    center,
                    inflated_radius: r + moving_radius,
                })
                .collect(),
            moving_radius,
        }
    }

    pub fn point_free(&self, p: Point2) -> bool {
        self.bounds.contains(p)
            && self
                .obstacles
                .iter()
                .all(|o| p.distance(o.center) >= o.inflated_radius)
    }

    /// Exact swept check of the straight segment `a`–`b`.
    pub fn segment_free(&self, a: Point2, b: Point2) -> bool {
        self.bounds.contains(a)
            && self.bounds.contains(b)
            && self
                .obstacles
                .iter()
                .all(|o| point_segment_distance(o.center, a, b) >= o.inflated_radius)
    }

    pub fn path_free(&self, path: &Polyline) -> bool {
        let v = path.vertices();
        if v.len() == 1 {
            return self.point_free(v[0]);
        }
        v.windows(2).all(|w| self.segment_free(w[0], w[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GoalSpec {
    Region { rect: Rect },
    Clearance { hull: Hull, clearance_radius: f64 },
}

impl GoalSpec {
    /// Closest goal point to `p`.
    pub fn nearest_point(&self, p: Point2) -> Point2 {
        match self {
            GoalSpec::Region { rect } => rect.clamp(p),
            GoalSpec::Clearance {
                hull,
                clearance_radius,
            } => hull.nearest_clear_point(p, *clearance_radius),
        }
    }

    /// Distance from `p` to the goal set (0 when satisfied).
    pub fn distance(&self, p: Point2) -> f64 {
        if goal_satisfied(p, self) {
            0.0
        } else {
            p.distance(self.nearest_point(p))
        }
    }
}

pub fn goal_satisfied(p: Point2, g: &GoalSpec) -> bool {
    match g {
        GoalSpec::Region { rect } => rect.contains(p),
        GoalSpec::Clearance {
            hull,
            clearance_radius,
        } => !disc_hull_intersects(p, *clearance_radius, hull),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub max_iterations: usize,
    pub step_size: f64,
    pub goal_bias: f64,
    pub rewire_radius_const: f64,
    pub rng_seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            step_size: 0.03,
            goal_bias: 0.1,
            rewire_radius_const: 1.5,
            rng_seed: 0,
        }
    }
}

impl PlannerParams {
    pub fn with_seed(self, rng_seed: u64) -> Self {
        Self { rng_seed, ..self }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::InvalidParams(m.to_string()));
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return bad("step_size must be positive");
        }
        if !(self.goal_bias > 0.0 && self.goal_bias < 1.0) {
            return bad("goal_bias must lie in (0, 1)");
        }
        if !(self.rewire_radius_const > 0.0) {
            return bad("rewire_radius_const must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub path: Polyline,
    pub cost: f64,
    pub iterations_used: usize,
    pub goal_reached: bool,
    /// `(iteration, best cost)` each time the best goal cost improved.
    pub improvements: Vec<(usize, f64)>,
}

struct Node {
    p: Point2,
    parent: usize,
    cost: f64,
    children: Vec<usize>,
    /// Straight free link to the goal set, if any.
    goal_link: Option<(Point2, f64)>,
}

const CELL: f64 = 0.02;

struct Grid {
    origin: Point2,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

impl Grid {
    fn new(bounds: &Rect) -> Self {
        let cols = (bounds.width() / CELL).ceil().max(1.0) as usize;
        let rows = (bounds.height() / CELL).ceil().max(1.0) as usize;
        Self {
            origin: bounds.min(),
            cols,
            rows,
            cells: vec![Vec::new(); cols * rows],
        }
    }

    fn cell(&self, p: Point2) -> (usize, usize) {
        let cx = ((p.x - self.origin.x) / CELL).floor().max(0.0) as usize;
        let cy = ((p.y - self.origin.y) / CELL).floor().max(0.0) as usize;
        (cx.min(self.cols - 1), cy.min(self.rows - 1))
    }

    fn insert(&mut self, p: Point2, id: usize) {
        let (cx, cy) = self.cell(p);
        self.cells[cy * self.cols + cx].push(id as u32);
    }

    fn within(&self, nodes: &[Node], p: Point2, r: f64, out: &mut Vec<usize>) {
        out.clear();
        let span = (r / CELL).ceil() as isize;
        let (cx, cy) = self.cell(p);
        let (cx, cy) = (cx as isize, cy as isize);
        for y in (cy - span).max(0)..=(cy + span).min(self.rows as isize - 1) {
            for x in (cx - span).max(0)..=(cx + span).min(self.cols as isize - 1) {
                for &id in &self.cells[y as usize * self.cols + x as usize] {
                    if nodes[id as usize].p.distance(p) <= r {
                        out.push(id as usize);
                    }
                }
            }
        }
    }

    fn nearest(&self, nodes: &[Node], p: Point2) -> usize {
        let (cx, cy) = self.cell(p);
        let (cx, cy) = (cx as isize, cy as isize);
        let mut best = (f64::INFINITY, 0usize);
        let max_ring = self.cols.max(self.rows) as isize;
        for ring in 0..=max_ring {
            // every point in ring k+1 or beyond is at least k*CELL away
            if best.0 < (ring as f64 - 1.0).max(0.0) * CELL {
                break;
            }
            for y in cy - ring..=cy + ring {
                if y < 0 || y >= self.rows as isize {
                    continue;
                }
                let on_edge_row = y == cy - ring || y == cy + ring;
                let mut x = cx - ring;
                while x <= cx + ring {
                    if x >= 0 && x < self.cols as isize {
                        for &id in &self.cells[y as usize * self.cols + x as usize] {
                            let d = nodes[id as usize].p.distance(p);
                            if d < best.0 || (d == best.0 && (id as usize) < best.1) {
                                best = (d, id as usize);
                            }
                        }
                    }
                    x += if on_edge_row || ring == 0 { 1 } else { 2 * ring };
                }
            }
        }
        best.1
    }
}

fn sample_uniform(rng: &mut ChaCha8Rng, r: &Rect) -> Point2 {
    Point2::new(
        rng.random_range(r.min().x..=r.max().x),
        rng.random_range(r.min().y..=r.max().y),
    )
}

fn sample_goal(rng: &mut ChaCha8Rng, goal: &GoalSpec, bounds: &Rect) -> Option<Point2> {
    match goal {
        GoalSpec::Region { rect } => rect.intersection(bounds).map(|r| sample_uniform(rng, &r)),
        GoalSpec::Clearance { .. } => (0..64)
            .map(|_| sample_uniform(rng, bounds))
            .find(|p| goal_satisfied(*p, goal)),
    }
}

fn region_reachable(goal: &GoalSpec, bounds: &Rect) -> bool {
    match goal {
        GoalSpec::Region { rect } => rect.overlaps(bounds),
        GoalSpec::Clearance { .. } => true,
    }
}

/// Free straight link from `p` to its nearest goal point.
fn goal_link(cs: &ConfigSpace, goal: &GoalSpec, p: Point2) -> Option<(Point2, f64)> {
    if goal_satisfied(p, goal) {
        return Some((p, 0.0));
    }
    let g = goal.nearest_point(p);
    (goal_satisfied(g, goal) && cs.segment_free(p, g)).then(|| (g, p.distance(g)))
}

/// Greedy line-of-sight shortcutting followed by re-projecting the tail onto
/// the goal set; repeated until the length stops improving.
fn smooth(cs: &ConfigSpace, goal: &GoalSpec, mut pts: Vec<Point2>) -> Vec<Point2> {
    for _ in 0..4 {
        let before: f64 = pts.windows(2).map(|w| w[0].distance(w[1])).sum();
        let mut out = vec![pts[0]];
        let mut i = 0;
        while i + 1 < pts.len() {
            let mut j = pts.len() - 1;
            while j > i + 1 && !cs.segment_free(pts[i], pts[j]) {
                j -= 1;
            }
            out.push(pts[j]);
            i = j;
        }
        pts = out;
        // the earliest vertex with a free goal link ends the path
        for k in 0..pts.len() {
            if let Some((g, d)) = goal_link(cs, goal, pts[k]) {
                let tail: f64 = pts[k..].windows(2).map(|w| w[0].distance(w[1])).sum();
                if d < tail - 1e-12 {
                    pts.truncate(k + 1);
                    if d > 0.0 {
                        pts.push(g);
                    }
                }
                break;
            }
        }
        let after: f64 = pts.windows(2).map(|w| w[0].distance(w[1])).sum();
        if after >= before - 1e-12 {
            break;
        }
    }
    pts
}

/// Best-cost collision-free path from `start` into the goal set found within
/// the iteration budget. Deterministic for a fixed seed.
pub fn plan(cs: &ConfigSpace, start: Point2, goal: &GoalSpec, params: &PlannerParams) -> Result<PlanResult, PlanError> {
    params.validate()?;
    if !cs.point_free(start) {
        return Err(PlanError::StartInCollision(start));
    }
    let single = Polyline::new([start]).expect("finite start");
    if goal_satisfied(start, goal) {
        return Ok(PlanResult {
            path: single,
            cost: 0.0,
            iterations_used: 0,
            goal_reached: true,
            improvements: vec![(0, 0.0)],
        });
    }
    let unreached = |iters| PlanResult {
        path: single.clone(),
        cost: f64::INFINITY,
        iterations_used: iters,
        goal_reached: false,
        improvements: vec![],
    };
    if !region_reachable(goal, &cs.bounds) {
        return Ok(unreached(0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut grid = Grid::new(&cs.bounds);
    let mut nodes: Vec<Node> = Vec::with_capacity(params.max_iterations + 1);
    nodes.push(Node {
        p: start,
        parent: 0,
        cost: 0.0,
        children: vec![],
        goal_link: goal_link(cs, goal, start),
    });
    grid.insert(start, 0);

    let mut best: Option<(usize, f64)> = nodes[0].goal_link.map(|(_, d)| (0, d));
    let mut improvements: Vec<(usize, f64)> = best.iter().map(|&(_, c)| (0, c)).collect();
    let mut near = Vec::new();
    let mut stack = Vec::new();

    let consider = |best: &mut Option<(usize, f64)>, improvements: &mut Vec<(usize, f64)>, id: usize, nodes: &[Node], it: usize| {
        if let Some((_, d)) = nodes[id].goal_link {
            let c = nodes[id].cost + d;
            if best.is_none_or(|(_, b)| c < b - 1e-12) {
                *best = Some((id, c));
                improvements.push((it, c));
            }
        }
    };

    for it in 1..=params.max_iterations {
        let sample = if rng.random::<f64>() < params.goal_bias {
            match sample_goal(&mut rng, goal, &cs.bounds) {
                Some(p) => p,
                None => sample_uniform(&mut rng, &cs.bounds),
            }
        } else {
            sample_uniform(&mut rng, &cs.bounds)
        };
        let nearest = grid.nearest(&nodes, sample);
        let from = nodes[nearest].p;
        let d = from.distance(sample);
        if d < 1e-12 {
            continue;
        }
        let new_p = if d > params.step_size {
            from + (sample - from) * (params.step_size / d)
        } else {
            sample
        };
        if !cs.segment_free(from, new_p) {
            continue;
        }

        let n = nodes.len() as f64 + 1.0;
        let radius = (params.rewire_radius_const * (n.ln() / n).sqrt()).max(params.step_size);
        grid.within(&nodes, new_p, radius, &mut near);

        let mut parent = nearest;
        let mut cost = nodes[nearest].cost + from.distance(new_p);
        for &j in &near {
            let c = nodes[j].cost + nodes[j].p.distance(new_p);
            if c < cost - 1e-12 && cs.segment_free(nodes[j].p, new_p) {
                parent = j;
                cost = c;
            }
        }
        let id = nodes.len();
        nodes.push(Node {
            p: new_p,
            parent,
            cost,
            children: vec![],
            goal_link: goal_link(cs, goal, new_p),
        });
        nodes[parent].children.push(id);
        grid.insert(new_p, id);
        consider(&mut best, &mut improvements, id, &nodes, it);

        for &j in &near {
            if j == parent {
                continue;
            }
            let c = cost + new_p.distance(nodes[j].p);
            if c < nodes[j].cost - 1e-12 && cs.segment_free(new_p, nodes[j].p) {
                let old = nodes[j].parent;
                nodes[old].children.retain(|&k| k != j);
                nodes[j].parent = id;
                nodes[id].children.push(j);
                let delta = nodes[j].cost - c;
                stack.clear();
                stack.push(j);
                while let Some(k) = stack.pop() {
                    nodes[k].cost -= delta;
                    consider(&mut best, &mut improvements, k, &nodes, it);
                    stack.extend(nodes[k].children.iter().copied());
                }
            }
        }
    }

    let Some((end, _)) = best else {
        return Ok(unreached(params.max_iterations));
    };
    let mut pts = Vec::new();
    let mut k = end;
    loop {
        pts.push(nodes[k].p);
        if k == 0 {
            break;
        }
        k = nodes[k].parent;
    }
    pts.reverse();
    let (g, d) = nodes[end].goal_link.expect("best node links to the goal");
    if d > 0.0 {
        pts.push(g);
    }
    let pts = smooth(cs, goal, pts);
    let path = Polyline::new(pts).expect("finite path");
    let cost = path.length();
    if improvements.last().is_none_or(|&(_, c)| cost < c) {
        improvements.push((params.max_iterations, cost));
    }
    Ok(PlanResult {
        path,
        cost,
        iterations_used: params.max_iterations,
        goal_reached: true,
        improvements,
    })
}

/// Cost of [`plan`]; `+∞` when the goal set was not reached.
pub fn optimal_cost(cs: &ConfigSpace, from: Point2, goal: &GoalSpec, params: &PlannerParams) -> Result<f64, PlanError> {
    Ok(plan(cs, from, goal, params)?.cost)
}
