//! RRT* from a workspace spot into the storage region around two obstacles,
//! showing the anytime cost improvements.

use motion_reasoning::geometry::Point2;
use motion_reasoning::intent::task_goal_set;
use motion_reasoning::planner::{plan, ConfigSpace, PlannerParams};
use motion_reasoning::{ObjectId, Predicate, RegionId, SceneConfig};

fn main() {
    let scene = SceneConfig::mockup_kitchen();
    let boxed = ObjectId::new("cracker_box");
    let r = scene.radius(&boxed).unwrap();
    let cs = ConfigSpace::new(
        scene.table,
        r,
        [(Point2::new(0.35, 0.42), 0.05), (Point2::new(0.55, 0.45), 0.05)],
    );
    let goal = task_goal_set(&Predicate::InRegion(boxed, RegionId::Storage), &scene).unwrap();
    let start = Point2::new(0.55, 0.18);

    let params = PlannerParams::default().with_seed(1);
    let res = plan(&cs, start, &goal, &params).expect("valid start");
    println!("reached = {}, cost = {:.4} m after {} iterations", res.goal_reached, res.cost, res.iterations_used);
    for (it, c) in &res.improvements {
        println!("  iteration {it:>5}: {c:.4}");
    }
    println!("path:");
    for v in res.path.vertices() {
        println!("  {v}");
    }
}
