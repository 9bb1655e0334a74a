//! Recognizes the goal of a logged demonstration with every method.
//!
//! `cargo run --example recognize_demo -- path/to/demo.jsonl`; without an
//! argument a demonstration is generated.

use motion_reasoning::demogen::{fig1_spec, generate, NoiseParams};
use motion_reasoning::io::read_demo;
use motion_reasoning::recognizer::{analyze, Method, RecognizerParams};
use motion_reasoning::SceneConfig;

fn main() {
    let demo = match std::env::args().nth(1) {
        Some(path) => read_demo(path.as_ref()).unwrap_or_else(|e| {
            eprintln!("{e}");
            std::process::exit(2)
        }),
        None => generate(fig1_spec(false), 5, NoiseParams::default(), &SceneConfig::mockup_kitchen())
            .unwrap()
            .demo,
    };
    let p = RecognizerParams::default();
    let a = analyze(&demo, &p, true).unwrap();
    for m in [Method::FinalState, Method::TaskPredicates, Method::NoMotion { tau: p.tau }, Method::Ours] {
        let g = a.goal(m, p.intent.prior_task, p.intent.delta_plan).unwrap();
        println!("{:<12} {g}", m.name());
    }
}
