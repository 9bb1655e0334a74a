//! Renders the incidental cook demonstration and its recognition trace to
//! `fig1.svg` (or the path given).

use motion_reasoning::demogen::{fig1_spec, generate, NoiseParams};
use motion_reasoning::recognizer::{recognize, RecognizerParams};
use motion_reasoning::render::render_svg;
use motion_reasoning::SceneConfig;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "fig1.svg".into());
    let g = generate(fig1_spec(false), 3, NoiseParams::default(), &SceneConfig::mockup_kitchen()).unwrap();
    let p = RecognizerParams::default();
    let (goal, trace) = recognize(&g.demo, &p).unwrap();
    let svg = render_svg(&g.demo, &trace, &p.intent.planner).unwrap();
    std::fs::write(&out, svg).unwrap();
    println!("goal {goal}; wrote {out}");
}
