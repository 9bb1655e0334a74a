//! End-to-end recognition: segment, classify each segment, pool.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Goal, ObjectId, Predicate, SceneConfig, StateSet};
use crate::geometry::Polyline;
use crate::intent::{analyze_segment, Decision, IntentError, IntentParams, MotionPredicate, SegmentAnalysis, SegmentIntent};
use crate::pooling::{pool, PoolError};
use crate::segmentation::{annotate, segment, Demonstration, Segment, SegmentationError, SegmentationParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecognizeError {
    #[error(transparent)]
    Segmentation(#[from] SegmentationError),
    #[error(transparent)]
    Intent(#[from] IntentError),
    #[error(transparent)]
    Pool(#[from] PoolError),
}

/// Every threshold the pipeline uses, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecognizerParams {
    pub segmentation: SegmentationParams,
    pub intent: IntentParams,
    /// Log-likelihood threshold of the motion-free baseline, in meters.
    pub tau: f64,
}

impl Default for RecognizerParams {
    fn default() -> Self {
        Self {
            segmentation: SegmentationParams::default(),
            intent: IntentParams::default(),
            tau: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    FinalState,
    TaskPredicates,
    NoMotion { tau: f64 },
    Ours,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::FinalState => "final_state",
            Method::TaskPredicates => "task_pred",
            Method::NoMotion { .. } => "no_motion",
            Method::Ours => "ours",
        }
    }
}

/// A segment's audit record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSegment {
    pub index: usize,
    pub object: ObjectId,
    pub frame_range: [usize; 2],
    pub trajectory: Polyline,
    pub achieved: Vec<Predicate>,
    pub decision: Decision,
    pub scores: std::collections::BTreeMap<String, crate::intent::IntentScore>,
    pub motion: Option<MotionPredicate>,
    pub intentional: Vec<Predicate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub schema_version: String,
    pub method: String,
    pub segments: Vec<TraceSegment>,
    pub goal: Vec<Predicate>,
}

/// Segmentation plus prior-independent intent analysis of one demonstration.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoAnalysis {
    pub scene: SceneConfig,
    pub segments: Vec<Segment>,
    pub analyses: Vec<SegmentAnalysis>,
    pub final_state: StateSet,
}

/// With `score_all`, the task hypothesis is scored for every placement so
/// the thresholded baseline can be evaluated from the same analysis.
pub fn analyze(demo: &Demonstration, params: &RecognizerParams, score_all: bool) -> Result<DemoAnalysis, RecognizeError> {
    let segments = segment(demo, &params.segmentation)?;
    let ann = annotate(demo).map_err(SegmentationError::from)?;
    let final_state = ann.states.last().cloned().unwrap_or_default();
    let analyses = (0..segments.len())
        .map(|i| analyze_segment(i, &segments, demo, &params.intent, score_all))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DemoAnalysis {
        scene: demo.scene().clone(),
        segments,
        analyses,
        final_state,
    })
}

impl DemoAnalysis {
    fn pool(&self, intentional: Vec<(usize, Predicate)>) -> Result<Goal, RecognizeError> {
        Ok(pool(&intentional, &self.segments, &self.final_state, &self.scene)?)
    }

    pub fn intents(&self, prior_task: f64) -> Vec<SegmentIntent> {
        self.analyses.iter().map(|a| a.decide(prior_task)).collect()
    }

    pub fn goal_ours(&self, prior_task: f64) -> Result<Goal, RecognizeError> {
        let intentional = self
            .intents(prior_task)
            .into_iter()
            .enumerate()
            .flat_map(|(i, si)| si.intentional.into_iter().map(move |p| (i, p)))
            .collect();
        self.pool(intentional)
    }

    pub fn goal_task_predicates(&self) -> Result<Goal, RecognizeError> {
        let intentional = self
            .analyses
            .iter()
            .flat_map(|a| a.eligible.iter().map(move |p| (a.index, p.clone())))
            .collect();
        self.pool(intentional)
    }

    /// Keeps a placement iff its task log-likelihood clears `−τ`, after
    /// allowing `delta_plan` of planner slack.
    pub fn goal_no_motion(&self, tau: f64, delta_plan: f64) -> Result<Goal, RecognizeError> {
        let intentional = self
            .analyses
            .iter()
            .flat_map(|a| {
                a.eligible.iter().filter_map(move |p| {
                    let keep = match (Some(p) == a.placement.as_ref(), a.task_score) {
                        (true, Some(s)) => s.log_likelihood >= -tau - delta_plan * s.cost_opt_from_start,
                        _ => true,
                    };
                    keep.then(|| (a.index, p.clone()))
                })
            })
            .collect();
        self.pool(intentional)
    }

    pub fn goal_final_state(&self) -> Goal {
        Goal::new(
            self.final_state
                .iter()
                .filter(|p| self.scene.is_goal_eligible(p))
                .cloned(),
        )
        .expect("filtered to eligible predicates")
    }

    pub fn goal(&self, method: Method, prior_task: f64, delta_plan: f64) -> Result<Goal, RecognizeError> {
        match method {
            Method::FinalState => Ok(self.goal_final_state()),
            Method::TaskPredicates => self.goal_task_predicates(),
            Method::NoMotion { tau } => self.goal_no_motion(tau, delta_plan),
            Method::Ours => self.goal_ours(prior_task),
        }
    }

    pub fn trace(&self, method: Method, prior_task: f64, delta_plan: f64) -> Result<Trace, RecognizeError> {
        let goal = self.goal(method, prior_task, delta_plan)?;
        let segments = self
            .segments
            .iter()
            .zip(self.analyses.iter())
            .map(|(s, a)| {
                let si = a.decide(prior_task);
                TraceSegment {
                    index: a.index,
                    object: s.object.clone(),
                    frame_range: s.frame_range,
                    trajectory: s.trajectory.clone(),
                    achieved: s.achieved.iter().cloned().collect(),
                    decision: si.decision,
                    scores: si.scores,
                    motion: a.motion.clone(),
                    intentional: si.intentional,
                }
            })
            .collect();
        Ok(Trace {
            schema_version: crate::SCHEMA_VERSION.to_string(),
            method: method.name().to_string(),
            segments,
            goal: goal.iter().cloned().collect(),
        })
    }
}

/// Recognizes the goal of a demonstration and returns the per-segment trace.
pub fn recognize(demo: &Demonstration, params: &RecognizerParams) -> Result<(Goal, Trace), RecognizeError> {
    let a = analyze(demo, params, false)?;
    let trace = a.trace(Method::Ours, params.intent.prior_task, params.intent.delta_plan)?;
    Ok((a.goal_ours(params.intent.prior_task)?, trace))
}

pub fn recognize_baseline(demo: &Demonstration, method: Method, params: &RecognizerParams) -> Result<Goal, RecognizeError> {
    let score_all = matches!(method, Method::NoMotion { .. });
    analyze(demo, params, score_all)?.goal(method, params.intent.prior_task, params.intent.delta_plan)
}

/// Parallel analysis; output order follows input order.
pub fn analyze_batch(
    demos: &[Demonstration],
    params: &RecognizerParams,
    score_all: bool,
) -> Vec<Result<DemoAnalysis, RecognizeError>> {
    demos.par_iter().map(|d| analyze(d, params, score_all)).collect()
}
