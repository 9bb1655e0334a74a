//! Temporal segmentation of a pose log into single-object manipulation
//! segments, with the predicate changes each segment achieves.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    diff_predicates, eval_predicates, DomainError, Event, ObjectId, Predicate, RegionId, SceneConfig,
    StateSet,
};
use crate::geometry::{Point2, Polyline, Pose2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegmentationError {
    #[error("invalid demonstration: {0}")]
    InvalidDemo(String),
    #[error("`{a}` and `{b}` are manipulated simultaneously around frame {frame}")]
    SimultaneousMotion { a: ObjectId, b: ObjectId, frame: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationParams {
    /// Mean-displacement threshold in meters.
    pub theta_move: f64,
    /// Half-width of the sliding window, in frames.
    pub window: usize,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            theta_move: 0.005,
            window: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub poses: BTreeMap<ObjectId, Pose2>,
    pub in_hand: Option<ObjectId>,
    /// Logged events (pour) firing at `t`.
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demonstration {
    scene: SceneConfig,
    frames: Vec<Frame>,
}

impl Demonstration {
    pub fn new(scene: SceneConfig, frames: Vec<Frame>) -> Result<Self, SegmentationError> {
        let bad = |m: String| Err(SegmentationError::InvalidDemo(m));
        scene.validate()?;
        if frames.len() < 2 {
            return bad(format!("need at least 2 frames, got {}", frames.len()));
        }
        let max_gap = 3.0 / scene.nominal_hz + 1e-9;
        for (i, w) in frames.windows(2).enumerate() {
            let dt = w[1].t - w[0].t;
            if !(dt > 0.0) {
                return bad(format!("timestamps not strictly increasing at frame {}", i + 1));
            }
            if dt > max_gap {
                return bad(format!("gap of {dt:.3} s before frame {} exceeds 3 nominal periods", i + 1));
            }
        }
        for (i, f) in frames.iter().enumerate() {
            if !f.t.is_finite() {
                return bad(format!("non-finite timestamp at frame {i}"));
            }
            for (id, p) in &f.poses {
                scene.object(id)?;
                if !p.position.is_finite() {
                    return bad(format!("non-finite pose for `{id}` at frame {i}"));
                }
            }
            if let Some(h) = &f.in_hand {
                scene.object(h)?;
            }
            for o in &scene.objects {
                if !f.poses.contains_key(&o.name) && f.in_hand.as_ref() != Some(&o.name) {
                    return Err(DomainError::MissingPose(o.name.to_string()).into());
                }
            }
        }
        Ok(Self { scene, frames })
    }

    pub fn scene(&self) -> &SceneConfig {
        &self.scene
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn position(&self, frame: usize, obj: &ObjectId) -> Option<Point2> {
        self.frames[frame].poses.get(obj).map(|p| p.position)
    }

    /// Positions of all objects except `exclude` at `frame`.
    pub fn others_at(&self, frame: usize, exclude: &ObjectId) -> Vec<(ObjectId, Point2)> {
        self.frames[frame]
            .poses
            .iter()
            .filter(|(id, _)| *id != exclude)
            .map(|(id, p)| (id.clone(), p.position))
            .collect()
    }
}

/// Per-frame grounded states plus every event (logged and derived) with the
/// frame index at which it fired.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub states: Vec<StateSet>,
    pub events: Vec<(usize, Event)>,
}

/// Grounds every frame, deriving cook events from the dwell rule: an
/// ingredient is cooked once it has been in the container while the
/// container rests on a stove for `t_cook` seconds without interruption.
pub fn annotate(demo: &Demonstration) -> Result<Annotation, DomainError> {
    let scene = demo.scene();
    let container = scene.container().clone();
    let mut events: Vec<(usize, Event)> = Vec::new();
    let mut so_far: Vec<Event> = Vec::new();
    let mut hold_start: BTreeMap<ObjectId, (f64, RegionId)> = BTreeMap::new();
    let mut states = Vec::with_capacity(demo.len());

    for (i, f) in demo.frames().iter().enumerate() {
        for e in &f.events {
            so_far.push(e.clone());
            events.push((i, e.clone()));
        }
        let state = eval_predicates(&f.poses, f.in_hand.as_ref(), &so_far, scene)?;
        let stove = RegionId::ALL
            .into_iter()
            .filter(|r| r.is_stove())
            .find(|r| state.contains(&Predicate::InRegion(container.clone(), *r)));

        let mut fired = Vec::new();
        for p in &state {
            let Predicate::In(x, c) = p else { continue };
            if c != &container || state.contains(&Predicate::Cooked(x.clone())) {
                continue;
            }
            match stove {
                Some(s) => {
                    let entry = hold_start.entry(x.clone()).or_insert((f.t, s));
                    if entry.1 != s {
                        *entry = (f.t, s);
                    }
                    if f.t - entry.0 >= scene.t_cook - 1e-6 {
                        fired.push(Event::Cook {
                            ingredient: x.clone(),
                            container: container.clone(),
                            stove: s,
                        });
                    }
                }
                None => {
                    hold_start.remove(x);
                }
            }
        }
        let mut state = state;
        for e in fired {
            if let Event::Cook { ingredient, .. } = &e {
                state.insert(Predicate::Cooked(ingredient.clone()));
                hold_start.remove(ingredient);
            }
            so_far.push(e.clone());
            events.push((i, e));
        }
        states.push(state);
    }
    Ok(Annotation { states, events })
}

fn mean_position(demo: &Demonstration, obj: &ObjectId, lo: usize, hi: usize) -> Option<Point2> {
    let mut sum = Point2::default();
    let mut n = 0usize;
    for i in lo..=hi {
        if let Some(p) = demo.position(i, obj) {
            sum = sum + p;
            n += 1;
        }
    }
    (n > 0).then(|| sum * (1.0 / n as f64))
}

/// Per-frame motion mask for `obj`: in hand, or the mean position over the
/// next `window` frames differs from the mean over the previous `window`
/// frames by more than `theta_move`. Windows are clipped at the ends.
pub fn detect_motion(demo: &Demonstration, obj: &ObjectId, params: &SegmentationParams) -> Vec<bool> {
    let n = demo.len();
    let w = params.window;
    (0..n)
        .map(|t| {
            if demo.frames()[t].in_hand.as_ref() == Some(obj) {
                return true;
            }
            let before = mean_position(demo, obj, t.saturating_sub(w), t);
            let after = mean_position(demo, obj, t, (t + w).min(n - 1));
            match (before, after) {
                (Some(a), Some(b)) => a.distance(b) > params.theta_move,
                _ => false,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub object: ObjectId,
    /// Inclusive; segments tile the demonstration.
    pub frame_range: [usize; 2],
    /// Inclusive run of the motion mask.
    pub motion_range: [usize; 2],
    /// Inclusive range actually manipulated (in-hand frames when present).
    pub core_range: [usize; 2],
    pub trajectory: Polyline,
    pub achieved: StateSet,
    pub removed: StateSet,
    pub events: Vec<Event>,
    pub start_state: StateSet,
    pub end_state: StateSet,
}

impl Segment {
    pub fn start(&self) -> Point2 {
        self.trajectory.first()
    }

    pub fn end(&self) -> Point2 {
        self.trajectory.last()
    }
}

fn runs(mask: &[bool]) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &m) in mask.iter().enumerate() {
        match (m, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                out.push([s, i - 1]);
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        out.push([s, mask.len() - 1]);
    }
    out
}

/// Object-center polyline: the rest pose before the core, the core frames,
/// then the rest pose after it. Rest poses are averaged over up to `window`
/// frames next to the core, which suppresses per-frame pose jitter.
pub fn segment_trajectory(demo: &Demonstration, seg: &Segment, window: usize) -> Polyline {
    build_trajectory(demo, &seg.object, seg.frame_range, seg.core_range, window)
}

fn build_trajectory(demo: &Demonstration, obj: &ObjectId, range: [usize; 2], core: [usize; 2], window: usize) -> Polyline {
    let w = window.max(1);
    let before = if core[0] > range[0] {
        mean_position(demo, obj, core[0].saturating_sub(w).max(range[0]), core[0] - 1)
    } else {
        demo.position(range[0], obj)
    };
    let after = if core[1] < range[1] {
        mean_position(demo, obj, core[1] + 1, (core[1] + w).min(range[1]))
    } else {
        demo.position(range[1], obj)
    };
    let pts: Vec<Point2> = before
        .into_iter()
        .chain((core[0]..=core[1]).filter_map(|i| demo.position(i, obj)))
        .chain(after)
        .collect();
    if pts.is_empty() {
        return Polyline::new([Point2::default()]).expect("finite");
    }
    Polyline::new(pts).expect("finite positions")
}

struct Run {
    object: ObjectId,
    run: [usize; 2],
    core: [usize; 2],
}

/// Splits a demonstration into ordered single-object segments.
pub fn segment(demo: &Demonstration, params: &SegmentationParams) -> Result<Vec<Segment>, SegmentationError> {
    let ann = annotate(demo)?;
    let mut all: Vec<Run> = Vec::new();
    for o in &demo.scene().objects {
        let mask = detect_motion(demo, &o.name, params);
        for run in runs(&mask) {
            let held: Vec<usize> = (run[0]..=run[1])
                .filter(|&i| demo.frames()[i].in_hand.as_ref() == Some(&o.name))
                .collect();
            let core = match (held.first(), held.last()) {
                (Some(&a), Some(&b)) => [a, b],
                _ => run,
            };
            all.push(Run {
                object: o.name.clone(),
                run,
                core,
            });
        }
    }
    all.sort_by(|a, b| a.core[0].cmp(&b.core[0]).then(a.object.cmp(&b.object)));
    for w in all.windows(2) {
        if w[1].core[0] <= w[0].core[1] {
            return Err(SegmentationError::SimultaneousMotion {
                a: w[0].object.clone(),
                b: w[1].object.clone(),
                frame: w[1].core[0],
            });
        }
    }

    let last = demo.len() - 1;
    let mut segments = Vec::with_capacity(all.len());
    let mut next_start = 0usize;
    for (k, r) in all.iter().enumerate() {
        let start = next_start;
        // end on the run's tail, but never inside the next core
        let mut end = if k + 1 == all.len() {
            last
        } else {
            r.run[1].max(r.core[1]).min(all[k + 1].core[0] - 1)
        };
        end = end.max(start);
        let motion_range = [r.run[0].max(start), r.run[1].min(end)];
        let core_range = [r.core[0].max(start), r.core[1].min(end)];
        // diffs chain: each segment starts from the previous segment's end
        let start_state = ann.states[start.saturating_sub(1)].clone();
        let end_state = ann.states[end].clone();
        let (achieved, removed) = diff_predicates(&start_state, &end_state);
        let events = ann
            .events
            .iter()
            .filter(|(i, _)| (start..=end).contains(i))
            .map(|(_, e)| e.clone())
            .collect();
        segments.push(Segment {
            object: r.object.clone(),
            frame_range: [start, end],
            motion_range,
            core_range,
            trajectory: build_trajectory(demo, &r.object, [start, end], core_range, params.window),
            achieved,
            removed,
            events,
            start_state,
            end_state,
        });
        next_start = end + 1;
    }
    Ok(segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::StateSet;

    fn frame(t: f64, poses: &[(&str, (f64, f64))], in_hand: Option<&str>) -> Frame {
        Frame {
            t,
            poses: poses
                .iter()
                .map(|(n, (x, y))| (ObjectId::new(*n), Pose2::new(Point2::new(*x, *y), 0.0)))
                .collect(),
            in_hand: in_hand.map(ObjectId::new),
            events: vec![],
        }
    }

    fn parked() -> Vec<(&'static str, (f64, f64))> {
        vec![
            ("bowl", (0.5, 0.1)),
            ("cracker_box", (1.0, 0.1)),
            ("sugar_box", (0.1, 0.75)),
            ("mustard_bottle", (0.3, 0.75)),
            ("spam", (0.1, 0.6)),
            ("tomato_soup", (0.3, 0.6)),
        ]
    }

    fn static_demo(n: usize) -> Demonstration {
        let frames = (0..n).map(|i| frame(i as f64 * 0.1, &parked(), None)).collect();
        Demonstration::new(SceneConfig::mockup_kitchen(), frames).unwrap()
    }

    #[test]
    fn static_demo_has_no_motion() {
        let d = static_demo(30);
        let p = SegmentationParams::default();
        assert!(detect_motion(&d, &ObjectId::new("bowl"), &p).iter().all(|m| !m));
        assert!(segment(&d, &p).unwrap().is_empty());
    }

    #[test]
    fn single_carry_is_one_segment() {
        let mut frames = Vec::new();
        let mut t = 0.0;
        let mut push = |pos: (f64, f64), hand: Option<&str>| {
            let mut p = parked();
            p[1] = ("cracker_box", pos);
            frames.push(frame(t, &p, hand));
            t += 0.1;
        };
        for _ in 0..10 {
            push((1.0, 0.1), None);
        }
        for k in 0..=10 {
            push((1.0 - 0.03 * k as f64, 0.1), Some("cracker_box"));
        }
        for _ in 0..10 {
            push((0.7, 0.1), None);
        }
        let d = Demonstration::new(SceneConfig::mockup_kitchen(), frames).unwrap();
        let segs = segment(&d, &SegmentationParams::default()).unwrap();
        assert_eq!(segs.len(), 1);
        let s = &segs[0];
        assert_eq!(s.object.as_str(), "cracker_box");
        assert_eq!(s.core_range, [10, 20]);
        assert_eq!(s.frame_range, [0, d.len() - 1]);
        assert!((s.trajectory.length() - 0.3).abs() < 1e-9);
        assert!(s.achieved.is_empty());
    }

    #[test]
    fn simultaneous_motion_is_rejected() {
        let mut frames = Vec::new();
        for i in 0..20 {
            let mut p = parked();
            if i >= 5 {
                let k = (i - 5) as f64;
                p[0] = ("bowl", (0.5 + 0.02 * k, 0.1));
                p[1] = ("cracker_box", (1.0 - 0.02 * k, 0.2));
            }
            frames.push(frame(i as f64 * 0.1, &p, None));
        }
        let d = Demonstration::new(SceneConfig::mockup_kitchen(), frames).unwrap();
        assert!(matches!(
            segment(&d, &SegmentationParams::default()),
            Err(SegmentationError::SimultaneousMotion { .. })
        ));
    }

    #[test]
    fn demo_validation() {
        let scene = SceneConfig::mockup_kitchen();
        let one = vec![frame(0.0, &parked(), None)];
        assert!(Demonstration::new(scene.clone(), one).is_err());
        let backwards = vec![frame(0.1, &parked(), None), frame(0.0, &parked(), None)];
        assert!(Demonstration::new(scene.clone(), backwards).is_err());
        let gap = vec![frame(0.0, &parked(), None), frame(0.5, &parked(), None)];
        assert!(Demonstration::new(scene.clone(), gap).is_err());
        let mut missing = parked();
        missing.pop();
        let m = vec![frame(0.0, &missing, None), frame(0.1, &missing, None)];
        assert!(Demonstration::new(scene, m).is_err());
    }

    #[test]
    fn dwell_fires_cook_once() {
        let mut frames = Vec::new();
        for i in 0..50 {
            let mut p = parked();
            p[0] = ("bowl", (0.75, 0.675));
            let mut f = frame(i as f64 * 0.1, &p, None);
            if i == 2 {
                f.events.push(Event::Pour {
                    from: ObjectId::new("spam"),
                    to: ObjectId::new("bowl"),
                });
            }
            frames.push(f);
        }
        let d = Demonstration::new(SceneConfig::mockup_kitchen(), frames).unwrap();
        let ann = annotate(&d).unwrap();
        let cooks: Vec<usize> = ann
            .events
            .iter()
            .filter(|(_, e)| matches!(e, Event::Cook { .. }))
            .map(|(i, _)| *i)
            .collect();
        assert_eq!(cooks, vec![32]);
        let cooked = Predicate::Cooked(ObjectId::new("spam"));
        assert!(!ann.states[31].contains(&cooked));
        assert!(ann.states[32..].iter().all(|s: &StateSet| s.contains(&cooked)));
    }
}
