//! Symbolic cooking domain: object catalog, regions, predicates, grounded
//! operators, goal semantics and predicate grounding from planar poses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{point_in_rect, Footprint, Point2, Pose2, Rect};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("object `{0}` has no pose and is not in hand")]
    MissingPose(String),
    #[error("`{0}` is not a container")]
    NotAContainer(String),
    #[error("unmet preconditions for {op}: {missing}")]
    UnmetPreconditions { op: String, missing: String },
    #[error("predicate {0} is not goal-eligible")]
    NotGoalEligible(Predicate),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("unknown predicate `{0}` with {1} argument(s)")]
    UnknownPredicate(String, usize),
    #[error("unknown region `{0}`")]
    UnknownRegion(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(String);

impl ObjectId {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Container,
    Ingredient,
    Blocker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionId {
    Workspace,
    Storage,
    StoveLeft,
    StoveRight,
}

impl RegionId {
    pub const ALL: [RegionId; 4] = [
        RegionId::Workspace,
        RegionId::Storage,
        RegionId::StoveLeft,
        RegionId::StoveRight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionId::Workspace => "workspace",
            RegionId::Storage => "storage",
            RegionId::StoveLeft => "stove_left",
            RegionId::StoveRight => "stove_right",
        }
    }

    pub fn is_stove(self) -> bool {
        matches!(self, RegionId::StoveLeft | RegionId::StoveRight)
    }

    /// Human-facing predicate name, e.g. `in_storage` or `on_stove_left`.
    pub fn predicate_name(self) -> &'static str {
        match self {
            RegionId::Workspace => "in_workspace",
            RegionId::Storage => "in_storage",
            RegionId::StoveLeft => "on_stove_left",
            RegionId::StoveRight => "on_stove_right",
        }
    }

    pub fn parse(s: &str) -> Result<Self, DomainError> {
        RegionId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| DomainError::UnknownRegion(s.to_string()))
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "PredicateRepr", into = "PredicateRepr")]
pub enum Predicate {
    InRegion(ObjectId, RegionId),
    InHand(ObjectId),
    On(ObjectId, ObjectId),
    In(ObjectId, ObjectId),
    Cooked(ObjectId),
}

#[derive(Serialize, Deserialize)]
struct PredicateRepr {
    pred: String,
    args: Vec<String>,
}

impl From<Predicate> for PredicateRepr {
    fn from(p: Predicate) -> Self {
        let (pred, args): (&str, Vec<String>) = match p {
            Predicate::InRegion(o, r) => ("in_region", vec![o.0, r.as_str().to_string()]),
            Predicate::InHand(o) => ("in_hand", vec![o.0]),
            Predicate::On(a, b) => ("on", vec![a.0, b.0]),
            Predicate::In(a, b) => ("in", vec![a.0, b.0]),
            Predicate::Cooked(o) => ("cooked", vec![o.0]),
        };
        PredicateRepr {
            pred: pred.to_string(),
            args,
        }
    }
}

impl TryFrom<PredicateRepr> for Predicate {
    type Error = DomainError;
    fn try_from(r: PredicateRepr) -> Result<Self, Self::Error> {
        let mut a = r.args.into_iter();
        let p = match (r.pred.as_str(), a.len()) {
            ("in_region", 2) => {
                let o = ObjectId(a.next().unwrap_or_default());
                Predicate::InRegion(o, RegionId::parse(&a.next().unwrap_or_default())?)
            }
            ("in_hand", 1) => Predicate::InHand(ObjectId(a.next().unwrap_or_default())),
            ("on", 2) => Predicate::On(
                ObjectId(a.next().unwrap_or_default()),
                ObjectId(a.next().unwrap_or_default()),
            ),
            ("in", 2) => Predicate::In(
                ObjectId(a.next().unwrap_or_default()),
                ObjectId(a.next().unwrap_or_default()),
            ),
            ("cooked", 1) => Predicate::Cooked(ObjectId(a.next().unwrap_or_default())),
            (name, n) => return Err(DomainError::UnknownPredicate(name.to_string(), n)),
        };
        Ok(p)
    }
}

impl Predicate {
    /// First argument; the object the predicate is "about".
    pub fn subject(&self) -> &ObjectId {
        match self {
            Predicate::InRegion(o, _)
            | Predicate::InHand(o)
            | Predicate::On(o, _)
            | Predicate::In(o, _)
            | Predicate::Cooked(o) => o,
        }
    }

    /// Shape check only; `In`'s second argument is validated against a scene
    /// by [`SceneConfig::is_goal_eligible`].
    pub fn is_goal_eligible_kind(&self) -> bool {
        matches!(
            self,
            Predicate::InRegion(..) | Predicate::In(..) | Predicate::Cooked(..)
        )
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::InRegion(o, r) => write!(f, "{}({o})", r.predicate_name()),
            Predicate::InHand(o) => write!(f, "in_hand({o})"),
            Predicate::On(a, b) => write!(f, "on({a},{b})"),
            Predicate::In(a, b) => write!(f, "in({a},{b})"),
            Predicate::Cooked(o) => write!(f, "cooked({o})"),
        }
    }
}

pub type StateSet = BTreeSet<Predicate>;

fn join(preds: &StateSet) -> String {
    preds.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

/// A discrete event from the log (pour) or derived from the dwell rule (cook).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Pour {
        from: ObjectId,
        to: ObjectId,
    },
    Cook {
        ingredient: ObjectId,
        container: ObjectId,
        stove: RegionId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    pub name: &'static str,
    pub args: Vec<String>,
    pub preconditions: StateSet,
    pub add: StateSet,
    pub del: StateSet,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.args.join(","))
    }
}

impl Operator {
    fn build(
        name: &'static str,
        args: Vec<String>,
        pre: impl IntoIterator<Item = Predicate>,
        add: impl IntoIterator<Item = Predicate>,
        del: impl IntoIterator<Item = Predicate>,
    ) -> Self {
        let add: StateSet = add.into_iter().collect();
        let del: StateSet = del.into_iter().filter(|p| !add.contains(p)).collect();
        Self {
            name,
            args,
            preconditions: pre.into_iter().collect(),
            add,
            del,
        }
    }

    pub fn pick(object: &ObjectId, from: Option<RegionId>) -> Self {
        let at = from.map(|r| Predicate::InRegion(object.clone(), r));
        let mut args = vec![object.to_string()];
        args.extend(from.map(|r| r.to_string()));
        Self::build(
            "pick",
            args,
            at.clone(),
            [Predicate::InHand(object.clone())],
            at,
        )
    }

    pub fn place(object: &ObjectId, region: Option<RegionId>) -> Self {
        let mut args = vec![object.to_string()];
        args.extend(region.map(|r| r.to_string()));
        Self::build(
            "place",
            args,
            [Predicate::InHand(object.clone())],
            region.map(|r| Predicate::InRegion(object.clone(), r)),
            [Predicate::InHand(object.clone())],
        )
    }

    pub fn hover(object: &ObjectId, over: &ObjectId) -> Self {
        Self::build(
            "hover",
            vec![object.to_string(), over.to_string()],
            [Predicate::InHand(object.clone())],
            [Predicate::On(object.clone(), over.clone())],
            [],
        )
    }

    pub fn withdraw(object: &ObjectId, from: &ObjectId) -> Self {
        Self::build(
            "withdraw",
            vec![object.to_string(), from.to_string()],
            [Predicate::On(object.clone(), from.clone())],
            [],
            [Predicate::On(object.clone(), from.clone())],
        )
    }

    pub fn pour(x: &ObjectId, container: &ObjectId, scene: &SceneConfig) -> Result<Self, DomainError> {
        if scene.kind(container)? != ObjectKind::Container {
            return Err(DomainError::NotAContainer(container.to_string()));
        }
        Ok(Self::build(
            "pour",
            vec![x.to_string(), container.to_string()],
            [
                Predicate::InHand(x.clone()),
                Predicate::On(x.clone(), container.clone()),
            ],
            [Predicate::In(x.clone(), container.clone())],
            [],
        ))
    }

    pub fn cook(ingredient: &ObjectId, container: &ObjectId, stove: RegionId) -> Self {
        Self::build(
            "cook",
            vec![ingredient.to_string()],
            [
                Predicate::In(ingredient.clone(), container.clone()),
                Predicate::InRegion(container.clone(), stove),
            ],
            [Predicate::Cooked(ingredient.clone())],
            [],
        )
    }
}

/// `(state ∖ del) ∪ add`, failing when a precondition is missing.
pub fn apply_operator(state: &StateSet, op: &Operator) -> Result<StateSet, DomainError> {
    let missing: StateSet = op.preconditions.difference(state).cloned().collect();
    if !missing.is_empty() {
        return Err(DomainError::UnmetPreconditions {
            op: op.to_string(),
            missing: join(&missing),
        });
    }
    let mut next: StateSet = state.difference(&op.del).cloned().collect();
    next.extend(op.add.iter().cloned());
    Ok(next)
}

/// `(after ∖ before, before ∖ after)`.
pub fn diff_predicates(before: &StateSet, after: &StateSet) -> (StateSet, StateSet) {
    (
        after.difference(before).cloned().collect(),
        before.difference(after).cloned().collect(),
    )
}

/// A validated set of goal-eligible predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GoalRepr", into = "GoalRepr")]
pub struct Goal(BTreeSet<Predicate>);

#[derive(Serialize, Deserialize)]
struct GoalRepr {
    goal: Vec<Predicate>,
}

impl TryFrom<GoalRepr> for Goal {
    type Error = DomainError;
    fn try_from(r: GoalRepr) -> Result<Self, Self::Error> {
        Goal::new(r.goal)
    }
}

impl From<Goal> for GoalRepr {
    fn from(g: Goal) -> Self {
        GoalRepr {
            goal: g.0.into_iter().collect(),
        }
    }
}

impl Goal {
    pub fn new(preds: impl IntoIterator<Item = Predicate>) -> Result<Self, DomainError> {
        let set: BTreeSet<Predicate> = preds.into_iter().collect();
        if let Some(p) = set.iter().find(|p| !p.is_goal_eligible_kind()) {
            return Err(DomainError::NotGoalEligible(p.clone()));
        }
        Ok(Self(set))
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn predicates(&self) -> &BTreeSet<Predicate> {
        &self.0
    }

    pub fn contains(&self, p: &Predicate) -> bool {
        self.0.contains(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &Goal) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Predicate> {
        self.0.iter()
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn goal_holds(state: &StateSet, goal: &Goal) -> bool {
    goal.0.is_subset(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub name: ObjectId,
    pub kind: ObjectKind,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    #[serde(flatten)]
    pub bounds: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub scene: String,
    pub table: Rect,
    pub objects: Vec<ObjectSpec>,
    pub regions: Vec<Region>,
    pub t_cook: f64,
    pub epsilon_on: f64,
    pub nominal_hz: f64,
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
    Rect::new(Point2::new(x0, y0), Point2::new(x1, y1)).expect("static rect")
}

impl SceneConfig {
    /// The default kitchen mockup: a 1.2 × 0.8 m table with four regions.
    pub fn mockup_kitchen() -> Self {
        let obj = |name: &str, kind, radius| ObjectSpec {
            name: ObjectId::new(name),
            kind,
            radius,
        };
        Self {
            scene: "mockup_kitchen".into(),
            table: rect(0.0, 0.0, 1.2, 0.8),
            objects: vec![
                obj("bowl", ObjectKind::Container, 0.08),
                obj("cracker_box", ObjectKind::Blocker, 0.06),
                obj("sugar_box", ObjectKind::Blocker, 0.05),
                obj("mustard_bottle", ObjectKind::Blocker, 0.04),
                obj("spam", ObjectKind::Ingredient, 0.045),
                obj("tomato_soup", ObjectKind::Ingredient, 0.035),
            ],
            regions: vec![
                Region {
                    id: RegionId::Workspace,
                    bounds: rect(0.0, 0.0, 1.2, 0.30),
                },
                Region {
                    id: RegionId::Storage,
                    bounds: rect(0.0, 0.55, 0.5, 0.8),
                },
                Region {
                    id: RegionId::StoveLeft,
                    bounds: rect(0.65, 0.575, 0.85, 0.775),
                },
                Region {
                    id: RegionId::StoveRight,
                    bounds: rect(0.9, 0.575, 1.1, 0.775),
                },
            ],
            t_cook: 3.0,
            epsilon_on: 0.02,
            nominal_hz: 10.0,
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let bad = |m: String| Err(DomainError::InvalidScene(m));
        let mut names = BTreeSet::new();
        for o in &self.objects {
            if !names.insert(&o.name) {
                return bad(format!("duplicate object `{}`", o.name));
            }
            if Footprint::new(o.radius).is_err() {
                return bad(format!("object `{}` has non-positive radius", o.name));
            }
        }
        let containers = self
            .objects
            .iter()
            .filter(|o| o.kind == ObjectKind::Container)
            .count();
        if containers != 1 {
            return bad(format!("expected exactly one container, found {containers}"));
        }
        let mut ids = BTreeSet::new();
        for r in &self.regions {
            if !ids.insert(r.id) {
                return bad(format!("duplicate region `{}`", r.id));
            }
        }
        for (i, a) in self.regions.iter().enumerate() {
            for b in &self.regions[i + 1..] {
                if a.bounds.overlaps(&b.bounds) {
                    return bad(format!("regions `{}` and `{}` overlap", a.id, b.id));
                }
            }
        }
        if !(self.t_cook > 0.0 && self.epsilon_on > 0.0 && self.nominal_hz > 0.0) {
            return bad("t_cook, epsilon_on and nominal_hz must be positive".into());
        }
        Ok(())
    }

    pub fn object(&self, id: &ObjectId) -> Result<&ObjectSpec, DomainError> {
        self.objects
            .iter()
            .find(|o| &o.name == id)
            .ok_or_else(|| DomainError::UnknownObject(id.to_string()))
    }

    pub fn kind(&self, id: &ObjectId) -> Result<ObjectKind, DomainError> {
        Ok(self.object(id)?.kind)
    }

    pub fn radius(&self, id: &ObjectId) -> Result<f64, DomainError> {
        Ok(self.object(id)?.radius)
    }

    pub fn container(&self) -> &ObjectId {
        &self
            .objects
            .iter()
            .find(|o| o.kind == ObjectKind::Container)
            .expect("validated scene has a container")
            .name
    }

    pub fn objects_of(&self, kind: ObjectKind) -> impl Iterator<Item = &ObjectId> {
        self.objects.iter().filter(move |o| o.kind == kind).map(|o| &o.name)
    }

    pub fn region(&self, id: RegionId) -> Option<&Rect> {
        self.regions.iter().find(|r| r.id == id).map(|r| &r.bounds)
    }

    pub fn region_of(&self, p: Point2) -> Option<RegionId> {
        self.regions
            .iter()
            .find(|r| point_in_rect(p, &r.bounds))
            .map(|r| r.id)
    }

    pub fn is_goal_eligible(&self, p: &Predicate) -> bool {
        match p {
            Predicate::InRegion(..) | Predicate::Cooked(..) => true,
            Predicate::In(_, c) => c == self.container(),
            _ => false,
        }
    }
}

/// Grounds the state at one frame from poses, the in-hand flag and the
/// ordered events that fired at or before the frame.
pub fn eval_predicates(
    poses: &BTreeMap<ObjectId, Pose2>,
    in_hand: Option<&ObjectId>,
    events_so_far: &[Event],
    scene: &SceneConfig,
) -> Result<StateSet, DomainError> {
    for id in poses.keys() {
        scene.object(id)?;
    }
    if let Some(h) = in_hand {
        scene.object(h)?;
    }
    let mut state = StateSet::new();
    for o in &scene.objects {
        let held = in_hand == Some(&o.name);
        match (poses.get(&o.name), held) {
            (None, false) => return Err(DomainError::MissingPose(o.name.to_string())),
            (_, true) => {
                state.insert(Predicate::InHand(o.name.clone()));
            }
            (Some(pose), false) => {
                if let Some(r) = scene.region_of(pose.position) {
                    state.insert(Predicate::InRegion(o.name.clone(), r));
                }
            }
        }
    }
    if let Some(h) = in_hand {
        if let Some(hp) = poses.get(h) {
            for o in &scene.objects {
                if &o.name == h {
                    continue;
                }
                if let Some(op) = poses.get(&o.name) {
                    if hp.position.distance(op.position) <= scene.epsilon_on {
                        state.insert(Predicate::On(h.clone(), o.name.clone()));
                    }
                }
            }
        }
    }
    for e in events_so_far {
        match e {
            Event::Pour { from, to } => {
                scene.object(from)?;
                if scene.kind(to)? != ObjectKind::Container {
                    return Err(DomainError::NotAContainer(to.to_string()));
                }
                state.insert(Predicate::In(from.clone(), to.clone()));
            }
            Event::Cook { ingredient, .. } => {
                scene.object(ingredient)?;
                state.insert(Predicate::Cooked(ingredient.clone()));
            }
        }
    }
    Ok(state)
}

/// The operator whose add list produces `p`, given the event stream of the
/// segment that achieved it. Returns `None` for transient predicates.
pub fn achieving_operator(
    p: &Predicate,
    segment_events: &[Event],
    segment_end_state: &StateSet,
    scene: &SceneConfig,
) -> Option<Operator> {
    match p {
        Predicate::InRegion(o, r) => Some(Operator::place(o, Some(*r))),
        Predicate::In(x, c) => Operator::pour(x, c, scene).ok(),
        Predicate::Cooked(x) => {
            let from_event = segment_events.iter().find_map(|e| match e {
                Event::Cook {
                    ingredient,
                    container,
                    stove,
                } if ingredient == x => Some(Operator::cook(x, container, *stove)),
                _ => None,
            });
            from_event.or_else(|| {
                let c = scene.container();
                RegionId::ALL
                    .into_iter()
                    .filter(|r| r.is_stove())
                    .find(|r| segment_end_state.contains(&Predicate::InRegion(c.clone(), *r)))
                    .map(|r| Operator::cook(x, c, r))
            })
        }
        Predicate::InHand(_) | Predicate::On(..) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> ObjectId {
        ObjectId::new(s)
    }

    fn rest_poses(scene: &SceneConfig, overrides: &[(&str, (f64, f64))]) -> BTreeMap<ObjectId, Pose2> {
        // everything parked in a region-free band unless overridden
        let mut m: BTreeMap<ObjectId, Pose2> = scene
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| {
                (
                    o.name.clone(),
                    Pose2::new(Point2::new(0.1 + 0.15 * i as f64, 0.42), 0.0),
                )
            })
            .collect();
        for (name, (x, y)) in overrides {
            m.insert(id(name), Pose2::new(Point2::new(*x, *y), 0.0));
        }
        m
    }

    #[test]
    fn default_scene_is_valid() {
        SceneConfig::mockup_kitchen().validate().unwrap();
    }

    #[test]
    fn bowl_on_stove_left() {
        let scene = SceneConfig::mockup_kitchen();
        let poses = rest_poses(&scene, &[("bowl", (0.75, 0.675))]);
        let s = eval_predicates(&poses, None, &[], &scene).unwrap();
        assert_eq!(
            s,
            [Predicate::InRegion(id("bowl"), RegionId::StoveLeft)].into_iter().collect()
        );
    }

    #[test]
    fn pour_event_adds_in() {
        let scene = SceneConfig::mockup_kitchen();
        let poses = rest_poses(&scene, &[]);
        let ev = [Event::Pour {
            from: id("spam"),
            to: id("bowl"),
        }];
        let s = eval_predicates(&poses, None, &ev, &scene).unwrap();
        assert!(s.contains(&Predicate::In(id("spam"), id("bowl"))));
    }

    #[test]
    fn in_hand_and_on() {
        let scene = SceneConfig::mockup_kitchen();
        let poses = rest_poses(&scene, &[("bowl", (0.5, 0.1)), ("spam", (0.51, 0.1))]);
        let s = eval_predicates(&poses, Some(&id("spam")), &[], &scene).unwrap();
        assert!(s.contains(&Predicate::InHand(id("spam"))));
        assert!(s.contains(&Predicate::On(id("spam"), id("bowl"))));
        assert!(!s.iter().any(|p| matches!(p, Predicate::InRegion(o, _) if o.as_str() == "spam")));
    }

    #[test]
    fn eval_rejects_bad_inputs() {
        let scene = SceneConfig::mockup_kitchen();
        let mut poses = rest_poses(&scene, &[]);
        poses.insert(id("ghost"), Pose2::default());
        assert_eq!(
            eval_predicates(&poses, None, &[], &scene),
            Err(DomainError::UnknownObject("ghost".into()))
        );
        let mut poses = rest_poses(&scene, &[]);
        poses.remove(&id("spam"));
        assert_eq!(
            eval_predicates(&poses, None, &[], &scene),
            Err(DomainError::MissingPose("spam".into()))
        );
        assert!(eval_predicates(&poses, Some(&id("spam")), &[], &scene).is_ok());
    }

    #[test]
    fn diff_examples() {
        let a: StateSet = [Predicate::InRegion(id("box"), RegionId::Workspace)].into();
        let b: StateSet = [Predicate::InRegion(id("box"), RegionId::Storage)].into();
        assert_eq!(diff_predicates(&a, &a), (StateSet::new(), StateSet::new()));
        assert_eq!(diff_predicates(&a, &b), (b.clone(), a.clone()));
        let c: StateSet = [Predicate::Cooked(id("spam"))].into();
        assert_eq!(diff_predicates(&StateSet::new(), &c), (c, StateSet::new()));
    }

    #[test]
    fn operator_examples() {
        let scene = SceneConfig::mockup_kitchen();
        let spam = id("spam");
        let bowl = id("bowl");
        let s: StateSet = [Predicate::InHand(spam.clone()), Predicate::On(spam.clone(), bowl.clone())].into();
        let next = apply_operator(&s, &Operator::pour(&spam, &bowl, &scene).unwrap()).unwrap();
        assert!(next.contains(&Predicate::In(spam.clone(), bowl.clone())));

        let err = apply_operator(&next, &Operator::cook(&spam, &bowl, RegionId::StoveLeft)).unwrap_err();
        match err {
            DomainError::UnmetPreconditions { missing, .. } => assert_eq!(missing, "on_stove_left(bowl)"),
            e => panic!("unexpected {e}"),
        }

        let b = id("cracker_box");
        let placed = apply_operator(
            &[Predicate::InHand(b.clone())].into(),
            &Operator::place(&b, Some(RegionId::Storage)),
        )
        .unwrap();
        assert_eq!(placed, [Predicate::InRegion(b, RegionId::Storage)].into());

        assert_eq!(
            Operator::pour(&spam, &id("spam"), &scene),
            Err(DomainError::NotAContainer("spam".into()))
        );
    }

    #[test]
    fn operators_are_consistent() {
        let scene = SceneConfig::mockup_kitchen();
        let (a, b) = (id("spam"), id("bowl"));
        for op in [
            Operator::pick(&a, Some(RegionId::Storage)),
            Operator::place(&a, Some(RegionId::Workspace)),
            Operator::hover(&a, &b),
            Operator::withdraw(&a, &b),
            Operator::pour(&a, &b, &scene).unwrap(),
            Operator::cook(&a, &b, RegionId::StoveRight),
        ] {
            assert!(op.add.is_disjoint(&op.del), "{op}");
        }
    }

    #[test]
    fn goal_semantics() {
        let s: StateSet = [Predicate::Cooked(id("spam"))].into();
        assert!(goal_holds(&s, &Goal::empty()));
        assert!(goal_holds(&s, &Goal::new([Predicate::Cooked(id("spam"))]).unwrap()));
        assert!(!goal_holds(&StateSet::new(), &Goal::new([Predicate::Cooked(id("spam"))]).unwrap()));
        assert!(Goal::new([Predicate::InHand(id("spam"))]).is_err());
    }

    #[test]
    fn predicate_serde_and_display() {
        let p = Predicate::InRegion(id("cracker_box"), RegionId::Storage);
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"pred":"in_region","args":["cracker_box","storage"]}"#);
        assert_eq!(serde_json::from_str::<Predicate>(&j).unwrap(), p);
        assert_eq!(p.to_string(), "in_storage(cracker_box)");
        assert_eq!(Predicate::In(id("spam"), id("bowl")).to_string(), "in(spam,bowl)");
        let g = Goal::new([Predicate::Cooked(id("spam")), p]).unwrap();
        let gj = serde_json::to_string(&g).unwrap();
        assert!(gj.starts_with(r#"{"goal":["#));
        assert_eq!(serde_json::from_str::<Goal>(&gj).unwrap(), g);
        assert!(serde_json::from_str::<Predicate>(r#"{"pred":"floats","args":["x"]}"#).is_err());
    }

    #[test]
    fn scene_roundtrips_through_json() {
        let scene = SceneConfig::mockup_kitchen();
        let j = serde_json::to_string(&scene).unwrap();
        assert_eq!(serde_json::from_str::<SceneConfig>(&j).unwrap(), scene);
    }
}
