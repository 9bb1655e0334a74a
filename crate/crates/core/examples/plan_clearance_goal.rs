//! Planning to "anywhere out of the way": the goal set is every placement
//! whose footprint misses an inflated convex hull.

use motion_reasoning::geometry::{convex_hull, Point2};
use motion_reasoning::planner::{optimal_cost, plan, ConfigSpace, GoalSpec, PlannerParams};
use motion_reasoning::SceneConfig;

fn main() {
    let scene = SceneConfig::mockup_kitchen();
    // the bowl's later path from the workspace to the left stove
    let hull = convex_hull(&[Point2::new(0.5, 0.1), Point2::new(0.63, 0.4), Point2::new(0.75, 0.675)]).unwrap();
    let goal = GoalSpec::Clearance {
        hull,
        clearance_radius: 0.06 + 0.08,
    };
    let cs = ConfigSpace::new(scene.table, 0.06, [(Point2::new(0.45, 0.5), 0.045)]);
    let start = Point2::new(0.6, 0.32);

    let res = plan(&cs, start, &goal, &PlannerParams::default()).unwrap();
    println!("clearing move: {:.4} m to {}", res.cost, res.path.last());

    // the recognizer takes the best of a few seeds
    let best = (0..3)
        .map(|s| optimal_cost(&cs, start, &goal, &PlannerParams::default().with_seed(s)).unwrap())
        .fold(f64::INFINITY, f64::min);
    println!("best of three seeds: {best:.4} m");
}
