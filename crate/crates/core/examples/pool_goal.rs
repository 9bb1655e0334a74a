//! Pooling keeps intentional predicates unless they only enabled a later
//! step and no longer hold: a bowl put on the stove to cook, then served.

use motion_reasoning::domain::{Event, Predicate, RegionId, StateSet};
use motion_reasoning::geometry::{Point2, Polyline};
use motion_reasoning::pooling::pool;
use motion_reasoning::{ObjectId, SceneConfig, Segment};

fn seg(object: &str, achieved: &[Predicate], events: Vec<Event>) -> Segment {
    let set: StateSet = achieved.iter().cloned().collect();
    Segment {
        object: ObjectId::new(object),
        frame_range: [0, 1],
        motion_range: [0, 1],
        core_range: [0, 1],
        trajectory: Polyline::new([Point2::new(0.0, 0.0)]).unwrap(),
        achieved: set.clone(),
        removed: StateSet::new(),
        events,
        start_state: StateSet::new(),
        end_state: set,
    }
}

fn main() {
    let scene = SceneConfig::mockup_kitchen();
    let (bowl, spam) = (ObjectId::new("bowl"), ObjectId::new("spam"));
    let on_stove = Predicate::InRegion(bowl.clone(), RegionId::StoveLeft);
    let cooked = Predicate::Cooked(spam.clone());
    let served = Predicate::InRegion(bowl.clone(), RegionId::Workspace);
    let cook = Event::Cook {
        ingredient: spam.clone(),
        container: bowl.clone(),
        stove: RegionId::StoveLeft,
    };
    let segments = vec![
        seg("bowl", std::slice::from_ref(&on_stove), vec![]),
        seg("bowl", &[cooked.clone(), served.clone()], vec![cook]),
    ];
    let intentional = [(0, on_stove), (1, cooked.clone()), (1, served.clone())];
    let final_state: StateSet = [cooked, served, Predicate::In(spam, bowl)].into_iter().collect();
    let goal = pool(&intentional, &segments, &final_state, &scene).unwrap();
    println!("goal: {goal}");
}
