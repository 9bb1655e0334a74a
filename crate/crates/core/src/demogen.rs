//! Procedural mockup-kitchen dataset: 24 cooking tasks, each with a blocker
//! that obstructs one key step, executed by a scripted demonstrator.
//!
//! A task cooks ingredient `F` in the bowl. Either the pour (`F` → bowl) or
//! the cook step (bowl → stove) is initially blocked by a blocker `B` placed
//! just above the workspace edge, across the straight path of that step.
//! The demonstrator then either moves `B` intentionally deep into storage,
//! or incidentally, by the shortest displacement that clears the later
//! trajectory; that displacement crosses into the workspace.
//!
//! Later trajectories are planned and realized first, so the incidental
//! clearing point is computed against the hull the recognizer will see.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    apply_operator, eval_predicates, DomainError, Event, Goal, ObjectId, ObjectKind, Operator, Predicate, RegionId,
    SceneConfig, StateSet,
};
use crate::geometry::{convex_hull, disc_disc_collides, Hull, Point2, Polyline, Pose2, Rect};
use crate::planner::{plan, ConfigSpace, GoalSpec, PlannerParams};
use crate::segmentation::{Demonstration, Frame, SegmentationError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("no feasible layout for {spec} after {attempts} attempts (last failure: {last})")]
    Infeasible {
        spec: String,
        attempts: usize,
        last: String,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Demo(#[from] SegmentationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ingredient {
    TomatoSoup,
    Spam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockedStep {
    Pour,
    Cook,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Blocker {
    CrackerBox,
    MustardBottle,
    SugarBox,
}

impl Ingredient {
    pub const ALL: [Ingredient; 2] = [Ingredient::TomatoSoup, Ingredient::Spam];

    pub fn id(self) -> ObjectId {
        ObjectId::new(match self {
            Ingredient::TomatoSoup => "tomato_soup",
            Ingredient::Spam => "spam",
        })
    }
}

impl BlockedStep {
    pub const ALL: [BlockedStep; 2] = [BlockedStep::Pour, BlockedStep::Cook];

    pub fn as_str(self) -> &'static str {
        match self {
            BlockedStep::Pour => "pour",
            BlockedStep::Cook => "cook",
        }
    }
}

impl Blocker {
    pub const ALL: [Blocker; 3] = [Blocker::CrackerBox, Blocker::MustardBottle, Blocker::SugarBox];

    pub fn id(self) -> ObjectId {
        ObjectId::new(match self {
            Blocker::CrackerBox => "cracker_box",
            Blocker::MustardBottle => "mustard_bottle",
            Blocker::SugarBox => "sugar_box",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaskSpec {
    pub ingredient: Ingredient,
    pub blocked_step: BlockedStep,
    pub blocker: Blocker,
    pub blocker_intentional: bool,
}

impl TaskSpec {
    /// The full 2 × 2 × 3 × 2 task grammar in a fixed order.
    pub fn all() -> Vec<TaskSpec> {
        let mut out = Vec::with_capacity(24);
        for ingredient in Ingredient::ALL {
            for blocked_step in BlockedStep::ALL {
                for blocker in Blocker::ALL {
                    for blocker_intentional in [false, true] {
                        out.push(TaskSpec {
                            ingredient,
                            blocked_step,
                            blocker,
                            blocker_intentional,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn name(&self) -> String {
        format!(
            "{}-{}-{}-{}",
            self.ingredient.id(),
            self.blocked_step.as_str(),
            self.blocker.id(),
            if self.blocker_intentional { "intentional" } else { "incidental" }
        )
    }
}

impl std::fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Per-waypoint position noise while carried, meters.
    pub carry_sigma: f64,
    /// Per-frame position noise at rest, meters.
    pub rest_sigma: f64,
    /// Lateral path-stretch as a fraction of carry length; 0 disables.
    pub sloppiness: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            carry_sigma: 0.003,
            rest_sigma: 0.001,
            sloppiness: 0.0,
        }
    }
}

impl NoiseParams {
    pub fn none() -> Self {
        Self {
            carry_sigma: 0.0,
            rest_sigma: 0.0,
            sloppiness: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub action: String,
    pub object: ObjectId,
    /// In-hand frames of the step, inclusive.
    pub frames: [usize; 2],
    pub from: Point2,
    pub to: Point2,
    /// Length of the planned, noise-free path.
    pub planned_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDemo {
    pub spec: TaskSpec,
    pub seed: u64,
    pub demo: Demonstration,
    pub ground_truth: Goal,
    pub script: Vec<ScriptStep>,
    /// Region the blocker ends in.
    pub blocker_target: Option<RegionId>,
    /// Whether the bowl is carried back to the workspace after cooking.
    pub bowl_returns: bool,
}

const CARRY_STEP: f64 = 0.03;
const INITIAL_REST: usize = 10;
const REST_GAP: usize = 15;
const HOVER_FRAMES: usize = 10;
const MAX_ATTEMPTS: usize = 200;
/// Allowed carry lengthening from noise, as a fraction of the planned length.
const LEGIBLE_SLACK: f64 = 0.02;
const PLACE_MARGIN: f64 = 0.01;
/// Gap kept between the incidental clearing point and the inflated hull.
const CLEAR_MARGIN: f64 = 0.01;
/// The incidental end must sit this far below the workspace edge.
const WORKSPACE_EDGE_DEPTH: f64 = 0.012;

/// Seed of demo `demo_index` of task `task_index` under `master_seed`.
pub fn derive_seed(master_seed: u64, task_index: usize, demo_index: usize) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(master_seed);
    r.set_stream((task_index as u64) << 16 | demo_index as u64);
    r.next_u64()
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn uniform_in(rng: &mut ChaCha8Rng, r: &Rect) -> Point2 {
    Point2::new(
        rng.random_range(r.min().x..=r.max().x),
        rng.random_range(r.min().y..=r.max().y),
    )
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
    Rect::new(Point2::new(x0, y0), Point2::new(x1, y1)).expect("static rect")
}

/// Initial layout of a task.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneLayout {
    pub positions: BTreeMap<ObjectId, Point2>,
    pub headings: BTreeMap<ObjectId, f64>,
    pub stove: RegionId,
    /// Bowl rest position on the stove.
    pub stove_spot: Point2,
    /// Endpoints of the blocked step's straight path.
    pub blocked_line: (Point2, Point2),
}

struct Carry {
    action: &'static str,
    object: ObjectId,
    planned: Polyline,
    /// Realized in-hand positions, first and last equal to the rest poses.
    waypoints: Vec<Point2>,
}

fn distance_to_polyline(p: Point2, path: &Polyline) -> f64 {
    let v = path.vertices();
    if v.len() == 1 {
        return p.distance(v[0]);
    }
    v.windows(2)
        .map(|w| crate::geometry::point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

struct Ctx<'a> {
    scene: &'a SceneConfig,
    spec: TaskSpec,
    noise: NoiseParams,
    rng: ChaCha8Rng,
    planner: PlannerParams,
}

impl Ctx<'_> {
    fn radius(&self, id: &ObjectId) -> f64 {
        self.scene.radius(id).expect("catalog object")
    }

    fn cspace(&self, mover: &ObjectId, positions: &BTreeMap<ObjectId, Point2>, skip: &[&ObjectId]) -> ConfigSpace {
        let obstacles: Vec<(Point2, f64)> = positions
            .iter()
            .filter(|(id, _)| *id != mover && !skip.contains(id))
            .map(|(id, p)| (*p, self.radius(id)))
            .collect();
        ConfigSpace::new(self.scene.table, self.radius(mover), obstacles)
    }

    fn plan_to(&mut self, cs: &ConfigSpace, from: Point2, to: Point2) -> Result<Polyline, String> {
        let goal = GoalSpec::Region {
            rect: Rect::centered(to, 2e-4, 2e-4).map_err(|e| e.to_string())?,
        };
        let params = self.planner.with_seed(self.rng.next_u64());
        let r = plan(cs, from, &goal, &params).map_err(|e| e.to_string())?;
        if !r.goal_reached {
            return Err(format!("no path from {from} to {to}"));
        }
        let mut v = r.path.vertices().to_vec();
        *v.last_mut().expect("nonempty") = to;
        let path = Polyline::new(v).map_err(|e| e.to_string())?;
        if !cs.path_free(&path) {
            return Err("snapped path collides".into());
        }
        Ok(self.stretch(cs, path))
    }

    /// Optional sloppy detour through a displaced midpoint.
    fn stretch(&mut self, cs: &ConfigSpace, path: Polyline) -> Polyline {
        if self.noise.sloppiness <= 0.0 {
            return path;
        }
        let len = path.length();
        let mid = path.point_at(len / 2.0);
        let (a, b) = (path.first(), path.last());
        let Some(dir) = (b - a).normalized() else { return path };
        let off = dir.perp() * (self.noise.sloppiness * len * self.rng.random_range(-1.0..=1.0));
        let stretched = Polyline::new([a, mid + off, b]).expect("finite");
        if cs.path_free(&stretched) {
            stretched
        } else {
            path
        }
    }

    /// Samples in-hand positions at carry speed along `path`, with Gaussian
    /// noise on interior waypoints clipped to stay collision-free. The noise
    /// is damped until the carry stays within `LEGIBLE_SLACK` of the planned
    /// length, so the observed cost stays close to the intended optimum.
    fn realize(&mut self, cs: &ConfigSpace, path: &Polyline) -> Vec<Point2> {
        let len = path.length();
        let n = ((len / CARRY_STEP).ceil() as usize).max(2);
        let normal = Normal::new(0.0, self.noise.carry_sigma.max(1e-12)).expect("valid sigma");
        let raws: Vec<Point2> = (1..n)
            .map(|_| {
                let raw = Point2::new(normal.sample(&mut self.rng), normal.sample(&mut self.rng));
                if self.noise.carry_sigma > 0.0 { raw } else { Point2::default() }
            })
            .collect();
        let mut damp = 1.0;
        loop {
            let mut out = vec![path.first()];
            for (k, raw) in (1..n).zip(&raws) {
                let base = path.point_at(len * k as f64 / n as f64);
                let prev = *out.last().expect("nonempty");
                let mut scale = damp;
                let mut p = base + *raw * scale;
                while scale > 0.0 && !(cs.point_free(p) && cs.segment_free(prev, p)) {
                    scale = if scale < 0.05 { 0.0 } else { scale * 0.5 };
                    p = base + *raw * scale;
                }
                out.push(p);
            }
            out.push(path.last());
            let observed: f64 = out.windows(2).map(|w| w[0].distance(w[1])).sum();
            if damp == 0.0 || observed <= (1.0 + LEGIBLE_SLACK) * len {
                return out;
            }
            damp = if damp < 0.05 { 0.0 } else { damp * 0.5 };
        }
    }
}

/// Nearest point from `s` whose distance to `hull` exceeds `radius`, by
/// bisection along 720 rays.
pub fn nearest_clearing_point(s: Point2, hull: &Hull, radius: f64, reach: f64) -> Option<Point2> {
    let outside = |p: Point2| hull.distance(p) > radius;
    if outside(s) {
        return Some(s);
    }
    let mut best: Option<(f64, Point2)> = None;
    for j in 0..720 {
        let u = Point2::new(1.0, 0.0).rotated(TAU * j as f64 / 720.0);
        if !outside(s + u * reach) {
            continue;
        }
        let (mut lo, mut hi) = (0.0, reach);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if outside(s + u * mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if best.is_none_or(|(d, _)| hi < d) {
            best = Some((hi, s + u * hi));
        }
    }
    best.map(|(_, p)| p)
}

/// Samples the initial layout for `spec`.
pub fn build_scene(spec: TaskSpec, seed: u64, scene: &SceneConfig) -> Result<SceneLayout, GenError> {
    let mut ctx = Ctx {
        scene,
        spec,
        noise: NoiseParams::none(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        planner: PlannerParams::default(),
    };
    let mut last = String::new();
    for _ in 0..MAX_ATTEMPTS {
        match sample_layout(&mut ctx) {
            Ok(l) => return Ok(l),
            Err(e) => last = e,
        }
    }
    Err(GenError::Infeasible {
        spec: spec.name(),
        attempts: MAX_ATTEMPTS,
        last,
    })
}

fn sample_layout(ctx: &mut Ctx) -> Result<SceneLayout, String> {
    let scene = ctx.scene;
    let spec = ctx.spec;
    let bowl = scene.container().clone();
    let f = spec.ingredient.id();
    let b = spec.blocker.id();
    let workspace = *scene.region(RegionId::Workspace).ok_or("no workspace")?;
    let ws_top = workspace.max().y;

    let stove = if ctx.rng.random_bool(0.5) {
        RegionId::StoveLeft
    } else {
        RegionId::StoveRight
    };
    let stove_rect = *scene.region(stove).ok_or("no stove")?;
    let stove_spot = stove_rect.center() + Point2::new(ctx.rng.random_range(-0.01..=0.01), ctx.rng.random_range(-0.01..=0.01));
    let b0 = uniform_in(&mut ctx.rng, &rect(0.42, 0.09, 0.62, 0.12));
    let f0 = uniform_in(&mut ctx.rng, &rect(0.10, 0.63, 0.30, 0.72));

    let (line_a, line_b, r_k) = match spec.blocked_step {
        BlockedStep::Cook => (b0, stove_spot, ctx.radius(&bowl)),
        BlockedStep::Pour => (f0, b0, ctx.radius(&f)),
    };
    let d = (line_b - line_a).normalized().ok_or("degenerate line")?;
    // unit normal pointing down toward the workspace
    let n = if d.x > 0.0 { Point2::new(d.y, -d.x) } else { Point2::new(-d.y, d.x) };
    let ny = n.y.abs();
    if !(0.25..=0.6).contains(&ny) {
        return Err(format!("line normal slope {ny:.3} out of range"));
    }

    let r_b = ctx.radius(&b);
    let c = r_k + r_b;
    let a = ctx.rng.random_range(0.012..=0.022);
    let lo = 0.15 * c;
    let hi = c + CLEAR_MARGIN - (0.06f64).max((a + WORKSPACE_EDGE_DEPTH + 0.005) / ny);
    if hi <= lo {
        return Err("no valid blocker offset".into());
    }
    let d_off = ctx.rng.random_range(lo..=hi);
    // base on the line so that the blocker sits `a` above the workspace edge
    let base_y = ws_top + a + d_off * ny;
    let t = (base_y - line_a.y) / (line_b.y - line_a.y);
    if !(0.1..=0.9).contains(&t) {
        return Err(format!("blocker base outside the line interior (t = {t:.2})"));
    }
    let base = line_a.lerp(line_b, t);
    let s = base + n * d_off;

    let mut positions: BTreeMap<ObjectId, Point2> = BTreeMap::new();
    positions.insert(bowl.clone(), b0);
    positions.insert(f.clone(), f0);
    positions.insert(b.clone(), s);

    // path bands every later carry may sweep; clutter stays out of them
    let bands = [
        Polyline::new([f0, b0]).expect("finite"),
        Polyline::new([b0, stove_spot]).expect("finite"),
    ];
    let storage = *scene.region(RegionId::Storage).ok_or("no storage")?;
    let clutter: Vec<ObjectId> = scene
        .objects
        .iter()
        .map(|o| o.name.clone())
        .filter(|id| !positions.contains_key(id))
        .collect();
    for id in clutter {
        let r = ctx.radius(&id);
        let slots = match scene.kind(&id).map_err(|e| e.to_string())? {
            ObjectKind::Ingredient => vec![rect(storage.min().x + r, storage.min().y + r, 0.22, storage.max().y - r)],
            _ => vec![
                rect(0.88, workspace.min().y + r, workspace.max().x - r, ws_top - r),
                rect(workspace.min().x + r, workspace.min().y + r, 0.26, ws_top - r),
            ],
        };
        let mut placed = None;
        for _ in 0..200 {
            let slot = slots[ctx.rng.random_range(0..slots.len())];
            let p = uniform_in(&mut ctx.rng, &slot);
            let clear_of_objects = positions
                .iter()
                .all(|(o, q)| p.distance(*q) >= r + ctx.radius(o) + PLACE_MARGIN);
            let clear_of_bands = bands
                .iter()
                .zip([&f, &bowl])
                .all(|(band, mover)| distance_to_polyline(p, band) >= r + ctx.radius(mover) + 0.02);
            if clear_of_objects && clear_of_bands {
                placed = Some(p);
                break;
            }
        }
        positions.insert(id.clone(), placed.ok_or_else(|| format!("could not place `{id}`"))?);
    }

    for (i, (ia, pa)) in positions.iter().enumerate() {
        if !scene.table.contains(*pa) {
            return Err(format!("`{ia}` off the table"));
        }
        for (ib, pb) in positions.iter().skip(i + 1) {
            if pa.distance(*pb) < ctx.radius(ia) + ctx.radius(ib) + PLACE_MARGIN {
                return Err(format!("`{ia}` and `{ib}` overlap"));
            }
        }
    }
    if scene.region_of(s).is_some() {
        return Err("blocker starts inside a region".into());
    }

    let headings = positions
        .keys()
        .map(|id| (id.clone(), ctx.rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect();
    Ok(SceneLayout {
        positions,
        headings,
        stove,
        stove_spot,
        blocked_line: (line_a, line_b),
    })
}

/// Generates one demonstration.
pub fn generate(spec: TaskSpec, seed: u64, noise: NoiseParams, scene: &SceneConfig) -> Result<GeneratedDemo, GenError> {
    scene.validate()?;
    let mut ctx = Ctx {
        scene,
        spec,
        noise,
        rng: ChaCha8Rng::seed_from_u64(seed),
        planner: PlannerParams::default(),
    };
    let mut last = String::new();
    for _ in 0..MAX_ATTEMPTS {
        let layout = match sample_layout(&mut ctx) {
            Ok(l) => l,
            Err(e) => {
                last = e;
                continue;
            }
        };
        match script(&mut ctx, &layout) {
            Ok(g) => return Ok(GeneratedDemo { seed, ..g }),
            Err(e) => last = e,
        }
    }
    Err(GenError::Infeasible {
        spec: spec.name(),
        attempts: MAX_ATTEMPTS,
        last,
    })
}

fn script(ctx: &mut Ctx, layout: &SceneLayout) -> Result<GeneratedDemo, String> {
    let scene = ctx.scene;
    let spec = ctx.spec;
    let bowl = scene.container().clone();
    let f = spec.ingredient.id();
    let b = spec.blocker.id();
    let init = layout.positions.clone();
    let (b0, f0, s) = (init[&bowl], init[&f], init[&b]);
    let bowl_returns = ctx.rng.random_bool(0.5);

    // later carries, planned with the blocker already gone
    let mut without_blocker = init.clone();
    without_blocker.remove(&b);

    let cs_pour = ctx.cspace(&f, &without_blocker, &[&bowl]);
    let pour_path = ctx.plan_to(&cs_pour, f0, b0)?;
    let pour_out = ctx.realize(&cs_pour, &pour_path);
    let back_path = Polyline::new(pour_path.vertices().iter().rev().copied()).expect("finite");
    let pour_back = ctx.realize(&cs_pour, &back_path);

    let cs_bowl = ctx.cspace(&bowl, &without_blocker, &[]);
    let stove_path = ctx.plan_to(&cs_bowl, b0, layout.stove_spot)?;
    let to_stove = ctx.realize(&cs_bowl, &stove_path);

    let mut at_stove = without_blocker.clone();
    at_stove.insert(bowl.clone(), layout.stove_spot);
    let cs_return = ctx.cspace(&bowl, &at_stove, &[]);
    let return_path = Polyline::new(stove_path.vertices().iter().rev().copied()).expect("finite");
    let to_return = ctx.realize(&cs_return, &return_path);

    let pour_trace: Vec<Point2> = pour_out.iter().chain(pour_back.iter()).copied().collect();
    let pour_hull = convex_hull(&pour_trace).map_err(|e| e.to_string())?;
    let stove_hull = convex_hull(&to_stove).map_err(|e| e.to_string())?;
    let return_hull = convex_hull(&to_return).map_err(|e| e.to_string())?;
    let r_b = ctx.radius(&b);
    let later_hulls = [
        (&pour_hull, ctx.radius(&f)),
        (&stove_hull, ctx.radius(&bowl)),
        (&return_hull, ctx.radius(&bowl)),
    ];
    let (blocked_hull, r_k) = match spec.blocked_step {
        BlockedStep::Pour => (&pour_hull, ctx.radius(&f)),
        BlockedStep::Cook => (&stove_hull, ctx.radius(&bowl)),
    };

    // blocker target
    let ws_top = scene.region(RegionId::Workspace).ok_or("no workspace")?.max().y;
    let target = if spec.blocker_intentional {
        let storage = *scene.region(RegionId::Storage).ok_or("no storage")?;
        let inner = storage.shrink(r_b + 0.005).ok_or("storage too small")?;
        let mut found = None;
        for _ in 0..300 {
            let p = uniform_in(&mut ctx.rng, &inner);
            let clear_hulls = later_hulls
                .iter()
                .all(|(h, r)| h.distance(p) > r + r_b + 0.03);
            let clear_objects = init
                .iter()
                .filter(|(id, _)| **id != b)
                .all(|(id, q)| p.distance(*q) >= r_b + ctx.radius(id) + 0.02);
            if clear_hulls && clear_objects {
                found = Some(p);
                break;
            }
        }
        found.ok_or("no intentional target in storage")?
    } else {
        let q = nearest_clearing_point(s, blocked_hull, r_k + r_b + CLEAR_MARGIN, 0.6).ok_or("cannot clear the hull")?;
        if q.y > ws_top - WORKSPACE_EDGE_DEPTH {
            return Err(format!("incidental end {q} not inside the workspace"));
        }
        q
    };

    // everything else is back at its initial spot whenever the blocker moves
    let cs_block = ctx.cspace(&b, &init, &[]);
    let block_path = ctx.plan_to(&cs_block, s, target)?;
    let block_way = ctx.realize(&cs_block, &block_path);

    let blocker_carry = Carry {
        action: "move_blocker",
        object: b.clone(),
        planned: block_path,
        waypoints: block_way,
    };
    let pour_carry = Carry {
        action: "pour",
        object: f.clone(),
        planned: pour_path.clone(),
        waypoints: pour_out,
    };
    let stove_carry = Carry {
        action: "bowl_to_stove",
        object: bowl.clone(),
        planned: stove_path,
        waypoints: to_stove,
    };
    let return_carry = Carry {
        action: "return_bowl",
        object: bowl.clone(),
        planned: return_path,
        waypoints: to_return,
    };
    let first_two = match spec.blocked_step {
        BlockedStep::Cook => [pour_carry, blocker_carry],
        BlockedStep::Pour => [blocker_carry, pour_carry],
    };

    let mut tl = Timeline::new(ctx, init.clone(), layout.headings.clone());
    tl.rest(INITIAL_REST);
    for c in first_two {
        if c.action == "pour" {
            tl.pour(&c, &pour_back, &bowl);
        } else {
            tl.carry(&c);
        }
        tl.rest(REST_GAP);
    }
    tl.carry(&stove_carry);
    let dwell = tl.rng.random_range(40..=45);
    tl.rest(dwell);
    if bowl_returns {
        tl.carry(&return_carry);
        tl.rest(REST_GAP);
    }
    let Timeline {
        frames,
        script,
        pour_pairs,
        ..
    } = tl;

    validate_frames(scene, &frames, &pour_pairs)?;
    let demo = Demonstration::new(scene.clone(), frames).map_err(|e| e.to_string())?;

    let terminal = if bowl_returns {
        scene.region_of(b0).ok_or("bowl start outside regions")?
    } else {
        layout.stove
    };
    let blocker_target = scene.region_of(target);
    let mut truth = vec![
        Predicate::Cooked(f.clone()),
        Predicate::In(f.clone(), bowl.clone()),
        Predicate::InRegion(bowl.clone(), terminal),
    ];
    if spec.blocker_intentional {
        truth.push(Predicate::InRegion(b.clone(), blocker_target.ok_or("intentional target outside regions")?));
    }
    let ground_truth = Goal::new(truth).map_err(|e| e.to_string())?;
    Ok(GeneratedDemo {
        spec,
        seed: 0,
        demo,
        ground_truth,
        script,
        blocker_target,
        bowl_returns,
    })
}

struct Timeline<'a> {
    scene: &'a SceneConfig,
    rng: ChaCha8Rng,
    rest_noise: Normal<f64>,
    rest_sigma: f64,
    positions: BTreeMap<ObjectId, Point2>,
    headings: BTreeMap<ObjectId, f64>,
    frames: Vec<Frame>,
    script: Vec<ScriptStep>,
    /// `(frame, held, container)` pairs allowed to overlap while pouring.
    pour_pairs: Vec<(usize, ObjectId, ObjectId)>,
}

impl<'a> Timeline<'a> {
    fn new(ctx: &mut Ctx<'a>, positions: BTreeMap<ObjectId, Point2>, headings: BTreeMap<ObjectId, f64>) -> Self {
        Self {
            scene: ctx.scene,
            rng: ChaCha8Rng::seed_from_u64(ctx.rng.next_u64()),
            rest_noise: Normal::new(0.0, ctx.noise.rest_sigma.max(1e-12)).expect("valid sigma"),
            rest_sigma: ctx.noise.rest_sigma,
            positions,
            headings,
            frames: Vec::new(),
            script: Vec::new(),
            pour_pairs: Vec::new(),
        }
    }

    fn jitter(&mut self) -> Point2 {
        if self.rest_sigma > 0.0 {
            Point2::new(self.rest_noise.sample(&mut self.rng), self.rest_noise.sample(&mut self.rng))
        } else {
            Point2::default()
        }
    }

    fn push(&mut self, held: Option<(&ObjectId, Point2)>, events: Vec<Event>) {
        let t = self.frames.len() as f64 / self.scene.nominal_hz;
        let mut poses = BTreeMap::new();
        let ids: Vec<ObjectId> = self.positions.keys().cloned().collect();
        for id in ids {
            let p = match held {
                Some((h, p)) if *h == id => p,
                _ => self.positions[&id] + self.jitter(),
            };
            let p = Point2::new(round6(p.x), round6(p.y));
            poses.insert(id.clone(), Pose2::new(p, round6(self.headings[&id])));
        }
        self.frames.push(Frame {
            t,
            poses,
            in_hand: held.map(|(h, _)| h.clone()),
            events,
        });
    }

    fn rest(&mut self, n: usize) {
        for _ in 0..n {
            self.push(None, vec![]);
        }
    }

    fn carry_waypoints(&mut self, obj: &ObjectId, way: &[Point2]) {
        for &p in way {
            self.push(Some((obj, p)), vec![]);
        }
        self.positions.insert(obj.clone(), *way.last().expect("nonempty"));
    }

    fn carry(&mut self, c: &Carry) {
        let start = self.frames.len();
        self.carry_waypoints(&c.object, &c.waypoints);
        self.script.push(ScriptStep {
            action: c.action.to_string(),
            object: c.object.clone(),
            frames: [start, self.frames.len() - 1],
            from: c.planned.first(),
            to: c.planned.last(),
            planned_cost: c.planned.length(),
        });
    }

    /// Carry to hover over the container, hold and pour, carry back.
    fn pour(&mut self, out: &Carry, back: &[Point2], container: &ObjectId) {
        let start = self.frames.len();
        let held = out.object.clone();
        self.carry_waypoints(&held, &out.waypoints[..out.waypoints.len() - 1]);
        for k in 0..HOVER_FRAMES {
            let over = self.positions[container];
            let p = over + self.jitter();
            let events = if k == HOVER_FRAMES / 2 {
                vec![Event::Pour {
                    from: held.clone(),
                    to: container.clone(),
                }]
            } else {
                vec![]
            };
            let frame = self.frames.len();
            self.push(Some((&held, p)), events);
            self.pour_pairs.push((frame, held.clone(), container.clone()));
        }
        let hover_from = self.frames.len() - HOVER_FRAMES;
        for i in start..hover_from {
            // the approach overlaps the container footprint too
            self.pour_pairs.push((i, held.clone(), container.clone()));
        }
        let back_start = self.frames.len();
        self.carry_waypoints(&held, &back[1..]);
        for i in back_start..self.frames.len() {
            self.pour_pairs.push((i, held.clone(), container.clone()));
        }
        self.script.push(ScriptStep {
            action: out.action.to_string(),
            object: held,
            frames: [start, self.frames.len() - 1],
            from: out.planned.first(),
            to: out.planned.last(),
            planned_cost: 2.0 * out.planned.length(),
        });
    }
}

fn validate_frames(scene: &SceneConfig, frames: &[Frame], pour_pairs: &[(usize, ObjectId, ObjectId)]) -> Result<(), String> {
    for (i, f) in frames.iter().enumerate() {
        let items: Vec<(&ObjectId, Point2)> = f.poses.iter().map(|(id, p)| (id, p.position)).collect();
        for (k, (ia, pa)) in items.iter().enumerate() {
            if !scene.table.contains(*pa) {
                return Err(format!("`{ia}` leaves the table at frame {i}"));
            }
            for (ib, pb) in items.iter().skip(k + 1) {
                let exempt = pour_pairs
                    .iter()
                    .any(|(fi, h, c)| *fi == i && ((h == *ia && c == *ib) || (h == *ib && c == *ia)));
                if exempt {
                    continue;
                }
                let ra = scene.radius(ia).map_err(|e| e.to_string())?;
                let rb = scene.radius(ib).map_err(|e| e.to_string())?;
                if disc_disc_collides(*pa, ra, *pb, rb) {
                    return Err(format!("`{ia}` collides with `{ib}` at frame {i}"));
                }
            }
        }
    }
    Ok(())
}

/// Replays the script through the operator model from the initial state.
pub fn replay_script(g: &GeneratedDemo) -> Result<StateSet, DomainError> {
    let scene = g.demo.scene();
    let first = &g.demo.frames()[0];
    let mut state = eval_predicates(&first.poses, first.in_hand.as_ref(), &[], scene)?;
    let bowl = scene.container().clone();
    for step in &g.script {
        let from = scene.region_of(step.from);
        let to_region = if step.action == "pour" { from } else { scene.region_of(step.to) };
        state = apply_operator(&state, &Operator::pick(&step.object, from))?;
        if step.action == "pour" {
            state = apply_operator(&state, &Operator::hover(&step.object, &bowl))?;
            state = apply_operator(&state, &Operator::pour(&step.object, &bowl, scene)?)?;
            state = apply_operator(&state, &Operator::withdraw(&step.object, &bowl))?;
        }
        state = apply_operator(&state, &Operator::place(&step.object, to_region))?;
        if step.action == "bowl_to_stove" {
            if let Some(stove) = to_region.filter(|r| r.is_stove()) {
                let ingredient = g.spec.ingredient.id();
                state = apply_operator(&state, &Operator::cook(&ingredient, &bowl, stove))?;
            }
        }
    }
    Ok(state)
}

/// `(task index, demo index, demo)`.
pub type IndexedDemo = (usize, usize, GeneratedDemo);

/// One demonstration per (task, demo index) under `master_seed`, in task
/// order; generation fans out over the thread pool.
pub fn generate_dataset(
    master_seed: u64,
    demos_per_task: usize,
    noise: NoiseParams,
    scene: &SceneConfig,
) -> Result<Vec<IndexedDemo>, (TaskSpec, GenError)> {
    use rayon::prelude::*;
    let jobs: Vec<(usize, usize, TaskSpec)> = TaskSpec::all()
        .into_iter()
        .enumerate()
        .flat_map(|(ti, spec)| (0..demos_per_task).map(move |di| (ti, di, spec)))
        .collect();
    jobs.par_iter()
        .map(|&(ti, di, spec)| {
            generate(spec, derive_seed(master_seed, ti, di), noise, scene)
                .map(|g| (ti, di, g))
                .map_err(|e| (spec, e))
        })
        .collect()
}

/// The two-step scene of the motivating example: spam is cooked, and the
/// cracker box blocks the bowl's way to the stove.
pub fn fig1_spec(intentional: bool) -> TaskSpec {
    TaskSpec {
        ingredient: Ingredient::Spam,
        blocked_step: BlockedStep::Cook,
        blocker: Blocker::CrackerBox,
        blocker_intentional: intentional,
    }
}
