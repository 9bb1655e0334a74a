//! Convex hull of a carried object's trajectory and the clearance test used
//! to decide whether a resting object was in its way.

use motion_reasoning::geometry::{convex_hull, disc_hull_intersects, Point2};

fn main() {
    let trajectory = [
        Point2::new(0.42, 0.10),
        Point2::new(0.55, 0.28),
        Point2::new(0.70, 0.50),
        Point2::new(0.76, 0.66),
        Point2::new(0.60, 0.40),
    ];
    let hull = convex_hull(&trajectory).expect("nonempty input");
    println!("hull ({:?}):", hull.kind());
    for v in hull.vertices() {
        println!("  {v}");
    }

    let clearance = 0.06 + 0.08; // blocker radius plus bowl radius
    for p in [Point2::new(0.55, 0.33), Point2::new(0.40, 0.40), Point2::new(0.20, 0.15)] {
        let blocked = disc_hull_intersects(p, clearance, &hull);
        let q = hull.nearest_clear_point(p, clearance);
        println!(
            "{p}: in the way = {blocked}, nearest clear spot {q} ({:.3} m away)",
            p.distance(q)
        );
    }
}
