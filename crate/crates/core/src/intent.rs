//! Per-segment intent: was the achieved placement the point of the motion,
//! or did the object only need to get out of the way of a later step?
//!
//! Each hypothesis `g` is scored by inverse planning in log form,
//!
//! ```text
//! log P(ξ | g) = C*(s → g) − C(ξ) − C*(q → g)
//! ```
//!
//! where `C*` are RRT* optimal-cost estimates from the segment's start `s`
//! and end `q`, and the decision is the argmax of score plus log prior.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DomainError, ObjectId, Predicate, SceneConfig};
use crate::geometry::{convex_hull, disc_disc_collides, disc_hull_intersects, Hull, Point2, Polyline};
use crate::planner::{goal_satisfied, optimal_cost, ConfigSpace, GoalSpec, PlanError, PlannerParams};
use crate::segmentation::{Demonstration, Segment};

/// Score differences below this are ties.
pub const TIE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntentError {
    #[error("segment end {0} does not satisfy the motion hypothesis goal set")]
    EndOutsideGoal(Point2),
    #[error("segment index {0} out of range")]
    BadSegment(usize),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntentParams {
    pub planner: PlannerParams,
    /// Each optimal cost is the minimum over this many consecutive seeds.
    pub scoring_seeds: usize,
    /// Prior probability of the task hypothesis.
    pub prior_task: f64,
    /// Planner suboptimality allowance, as a fraction of `C*(s → g)`.
    pub delta_plan: f64,
}

impl Default for IntentParams {
    fn default() -> Self {
        Self {
            planner: PlannerParams::default(),
            scoring_seeds: 3,
            prior_task: 0.5,
            delta_plan: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionPredicate {
    pub moved_object: ObjectId,
    pub enabled_object: ObjectId,
    pub enabled_segment: usize,
    pub hull: Hull,
    pub clearance_radius: f64,
}

impl MotionPredicate {
    pub fn goal_set(&self) -> GoalSpec {
        GoalSpec::Clearance {
            hull: self.hull.clone(),
            clearance_radius: self.clearance_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "hypothesis", rename_all = "snake_case")]
pub enum IntentHypothesis {
    Task { predicate: Predicate, goal_set: GoalSpec },
    Motion { motion: MotionPredicate, goal_set: GoalSpec },
}

impl IntentHypothesis {
    pub fn goal_set(&self) -> &GoalSpec {
        match self {
            IntentHypothesis::Task { goal_set, .. } | IntentHypothesis::Motion { goal_set, .. } => goal_set,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntentScore {
    #[serde(with = "crate::io::extended_f64")]
    pub log_likelihood: f64,
    pub cost_observed: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub cost_opt_from_start: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub cost_opt_from_end: f64,
}

impl IntentScore {
    pub fn new(cost_observed: f64, cost_opt_from_start: f64, cost_opt_from_end: f64) -> Self {
        let log_likelihood = if cost_opt_from_start.is_finite() && cost_opt_from_end.is_finite() {
            cost_opt_from_start - cost_observed - cost_opt_from_end
        } else {
            f64::NEG_INFINITY
        };
        Self {
            log_likelihood,
            cost_observed,
            cost_opt_from_start,
            cost_opt_from_end,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Task,
    Motion,
    BothTrivialTask,
    TrivialMotion,
    Noise,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Task => "task",
            Decision::Motion => "motion",
            Decision::BothTrivialTask => "both_trivial_task",
            Decision::TrivialMotion => "trivial_motion",
            Decision::Noise => "noise",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentIntent {
    pub decision: Decision,
    pub scores: BTreeMap<String, IntentScore>,
    /// Predicates this segment contributes to pooling.
    pub intentional: Vec<Predicate>,
}

/// The earliest later segment whose trajectory hull contains this segment's
/// start but not its end.
pub fn motion_predicate_for(
    seg_index: usize,
    segments: &[Segment],
    scene: &SceneConfig,
) -> Result<Option<MotionPredicate>, IntentError> {
    let seg = segments.get(seg_index).ok_or(IntentError::BadSegment(seg_index))?;
    let ri = scene.radius(&seg.object)?;
    let (s, q) = (seg.start(), seg.end());
    for (k, later) in segments.iter().enumerate().skip(seg_index + 1) {
        if later.object == seg.object {
            continue;
        }
        let hull = convex_hull(later.trajectory.vertices()).expect("trajectory is nonempty");
        let radius = scene.radius(&later.object)? + ri;
        if disc_hull_intersects(s, radius, &hull) && !disc_hull_intersects(q, radius, &hull) {
            return Ok(Some(MotionPredicate {
                moved_object: seg.object.clone(),
                enabled_object: later.object.clone(),
                enabled_segment: k,
                hull,
                clearance_radius: radius,
            }));
        }
    }
    Ok(None)
}

/// Goal set of an `InRegion` task hypothesis: placements whose whole
/// footprint lies inside the region.
pub fn task_goal_set(p: &Predicate, scene: &SceneConfig) -> Option<GoalSpec> {
    let Predicate::InRegion(o, r) = p else { return None };
    let rect = scene.region(*r)?;
    let radius = scene.radius(o).ok()?;
    Some(GoalSpec::Region {
        rect: rect.shrink(radius).unwrap_or(*rect),
    })
}

/// Configuration space for moving `seg.object`, snapshotting other objects
/// at the segment's first frame. Obstacles already overlapping the start or
/// end placement are left out, since the demonstration passed through them.
pub fn segment_cspace(seg: &Segment, demo: &Demonstration) -> Result<ConfigSpace, IntentError> {
    cspace_at(demo, &seg.object, seg.frame_range[0], seg.start(), seg.end())
}

/// Configuration space for `object` moving from `s` to `q`, with the other
/// objects where they are at `frame`.
pub fn cspace_at(
    demo: &Demonstration,
    object: &ObjectId,
    frame: usize,
    s: Point2,
    q: Point2,
) -> Result<ConfigSpace, IntentError> {
    let scene = demo.scene();
    let r = scene.radius(object)?;
    let mut obstacles = Vec::new();
    for (id, c) in demo.others_at(frame, object) {
        let ro = scene.radius(&id)?;
        if disc_disc_collides(s, r, c, ro) || disc_disc_collides(q, r, c, ro) {
            continue;
        }
        obstacles.push((c, ro));
    }
    Ok(ConfigSpace::new(scene.table, r, obstacles))
}

fn best_cost(cs: &ConfigSpace, from: Point2, goal: &GoalSpec, params: &IntentParams) -> Result<f64, IntentError> {
    if goal_satisfied(from, goal) {
        return Ok(0.0);
    }
    let mut best = f64::INFINITY;
    for k in 0..params.scoring_seeds.max(1) {
        let p = params.planner.with_seed(params.planner.rng_seed.wrapping_add(k as u64));
        best = best.min(optimal_cost(cs, from, goal, &p)?);
    }
    Ok(best)
}

/// Scores an observed trajectory under one hypothesis.
pub fn trajectory_log_likelihood(
    xi: &Polyline,
    hyp: &IntentHypothesis,
    cspace: &ConfigSpace,
    params: &IntentParams,
) -> Result<IntentScore, IntentError> {
    let (s, q) = (xi.first(), xi.last());
    let goal = hyp.goal_set();
    if matches!(hyp, IntentHypothesis::Motion { .. }) && !goal_satisfied(q, goal) {
        return Err(IntentError::EndOutsideGoal(q));
    }
    let from_start = best_cost(cspace, s, goal, params)?;
    let from_end = best_cost(cspace, q, goal, params)?;
    Ok(IntentScore::new(xi.length(), from_start, from_end))
}

/// Everything about a segment's intent that does not depend on the prior,
/// so decisions can be re-taken cheaply for different priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentAnalysis {
    pub index: usize,
    pub object: ObjectId,
    /// Achieved goal-eligible predicates.
    pub eligible: Vec<Predicate>,
    /// `InRegion` of the moved object among them, the candidate task predicate.
    pub placement: Option<Predicate>,
    pub motion: Option<MotionPredicate>,
    pub task_score: Option<IntentScore>,
    pub motion_score: Option<IntentScore>,
}

/// With `score_all`, the task hypothesis is scored even when no motion
/// predicate competes with it (the thresholded baseline needs it).
pub fn analyze_segment(
    seg_index: usize,
    segments: &[Segment],
    demo: &Demonstration,
    params: &IntentParams,
    score_all: bool,
) -> Result<SegmentAnalysis, IntentError> {
    let scene = demo.scene();
    let seg = segments.get(seg_index).ok_or(IntentError::BadSegment(seg_index))?;
    let eligible: Vec<Predicate> = seg
        .achieved
        .iter()
        .filter(|p| scene.is_goal_eligible(p))
        .cloned()
        .collect();
    let placement = eligible
        .iter()
        .find(|p| matches!(p, Predicate::InRegion(o, _) if *o == seg.object))
        .cloned();
    let motion = motion_predicate_for(seg_index, segments, scene)?;

    let mut task_score = None;
    let mut motion_score = None;
    let needs_scores = score_all || motion.is_some();
    if let (Some(p), true) = (&placement, needs_scores) {
        let cs = segment_cspace(seg, demo)?;
        if let Some(goal_set) = task_goal_set(p, scene) {
            let hyp = IntentHypothesis::Task {
                predicate: p.clone(),
                goal_set,
            };
            task_score = Some(trajectory_log_likelihood(&seg.trajectory, &hyp, &cs, params)?);
        }
        if let Some(m) = &motion {
            let hyp = IntentHypothesis::Motion {
                goal_set: m.goal_set(),
                motion: m.clone(),
            };
            motion_score = Some(trajectory_log_likelihood(&seg.trajectory, &hyp, &cs, params)?);
        }
    }
    Ok(SegmentAnalysis {
        index: seg_index,
        object: seg.object.clone(),
        eligible,
        placement,
        motion,
        task_score,
        motion_score,
    })
}

impl SegmentAnalysis {
    /// Applies the short-circuit rules, then the argmax over hypotheses.
    pub fn decide(&self, prior_task: f64) -> SegmentIntent {
        let mut scores = BTreeMap::new();
        if let Some(s) = self.task_score {
            scores.insert("task".to_string(), s);
        }
        if let Some(s) = self.motion_score {
            scores.insert("motion".to_string(), s);
        }
        let has_task = !self.eligible.is_empty();
        let decision = match (has_task, self.motion.is_some()) {
            (true, false) => Decision::BothTrivialTask,
            (false, true) => Decision::TrivialMotion,
            (false, false) => Decision::Noise,
            (true, true) => match (self.placement.as_ref(), self.task_score, self.motion_score) {
                (Some(_), Some(t), Some(m)) => {
                    let lt = t.log_likelihood + prior_task.ln();
                    let lm = m.log_likelihood + (1.0 - prior_task).ln();
                    let task_wins = if lt.is_finite() || lm.is_finite() {
                        lt - lm > TIE_EPS || (lt.is_finite() && !lm.is_finite())
                    } else {
                        false
                    };
                    if task_wins {
                        Decision::Task
                    } else {
                        Decision::Motion
                    }
                }
                _ => Decision::Task,
            },
        };
        let intentional = match decision {
            Decision::Task | Decision::BothTrivialTask => self.eligible.clone(),
            Decision::Motion => self
                .eligible
                .iter()
                .filter(|p| Some(*p) != self.placement.as_ref())
                .cloned()
                .collect(),
            Decision::TrivialMotion | Decision::Noise => vec![],
        };
        SegmentIntent {
            decision,
            scores,
            intentional,
        }
    }
}

pub fn classify_segment(
    seg_index: usize,
    segments: &[Segment],
    demo: &Demonstration,
    params: &IntentParams,
) -> Result<SegmentIntent, IntentError> {
    Ok(analyze_segment(seg_index, segments, demo, params, false)?.decide(params.prior_task))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RegionId;

    fn analysis(eligible: bool, motion: bool, task_ll: f64, motion_ll: f64) -> SegmentAnalysis {
        let o = ObjectId::new("cracker_box");
        let p = Predicate::InRegion(o.clone(), RegionId::Storage);
        let hull = convex_hull(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).unwrap();
        SegmentAnalysis {
            index: 0,
            object: o.clone(),
            eligible: if eligible { vec![p.clone()] } else { vec![] },
            placement: eligible.then(|| p.clone()),
            motion: motion.then(|| MotionPredicate {
                moved_object: o.clone(),
                enabled_object: ObjectId::new("bowl"),
                enabled_segment: 1,
                hull,
                clearance_radius: 0.14,
            }),
            task_score: eligible.then(|| IntentScore::new(1.0, 1.0 + task_ll, 0.0)),
            motion_score: (eligible && motion).then(|| IntentScore::new(1.0, 1.0 + motion_ll, 0.0)),
        }
    }

    #[test]
    fn short_circuits() {
        assert_eq!(analysis(true, false, 0.0, 0.0).decide(0.5).decision, Decision::BothTrivialTask);
        assert_eq!(analysis(false, true, 0.0, 0.0).decide(0.5).decision, Decision::TrivialMotion);
        assert_eq!(analysis(false, false, 0.0, 0.0).decide(0.5).decision, Decision::Noise);
    }

    #[test]
    fn argmax_and_ties() {
        let a = analysis(true, true, -0.01, -0.2);
        assert_eq!(a.decide(0.5).decision, Decision::Task);
        assert_eq!(a.decide(0.5).intentional.len(), 1);
        let b = analysis(true, true, -0.2, -0.01);
        assert_eq!(b.decide(0.5).decision, Decision::Motion);
        assert!(b.decide(0.5).intentional.is_empty());
        let tie = analysis(true, true, -0.1, -0.1);
        assert_eq!(tie.decide(0.5).decision, Decision::Motion);
        // a strong prior can flip a close call
        let close = analysis(true, true, -0.11, -0.1);
        assert_eq!(close.decide(0.7).decision, Decision::Task);
    }

    #[test]
    fn unreachable_hypothesis_loses() {
        let s = IntentScore::new(0.3, f64::INFINITY, 0.0);
        assert_eq!(s.log_likelihood, f64::NEG_INFINITY);
        let mut a = analysis(true, true, 0.0, 0.0);
        a.task_score = Some(s);
        assert_eq!(a.decide(0.5).decision, Decision::Motion);
    }

    #[test]
    fn score_identity() {
        let s = IntentScore::new(0.4, 0.35, 0.02);
        assert_eq!(s.log_likelihood, 0.35 - 0.4 - 0.02);
    }
}
