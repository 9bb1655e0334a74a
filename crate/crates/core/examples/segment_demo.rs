//! Generates the motivating cook demonstration and prints its segments.

use motion_reasoning::demogen::{fig1_spec, generate, NoiseParams};
use motion_reasoning::segmentation::{segment, SegmentationParams};
use motion_reasoning::SceneConfig;

fn main() {
    let g = generate(fig1_spec(false), 3, NoiseParams::default(), &SceneConfig::mockup_kitchen()).unwrap();
    println!("{}: {} frames", g.spec, g.demo.len());
    for (i, s) in segment(&g.demo, &SegmentationParams::default()).unwrap().iter().enumerate() {
        let achieved: Vec<String> = s.achieved.iter().map(|p| p.to_string()).collect();
        println!(
            "#{i} {:<14} frames {:>3}..{:<3} held {:>3}..{:<3} {:.3} m  achieved [{}]",
            s.object.as_str(),
            s.frame_range[0],
            s.frame_range[1],
            s.core_range[0],
            s.core_range[1],
            s.trajectory.length(),
            achieved.join(", ")
        );
    }
}
