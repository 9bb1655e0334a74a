//! The cracker box blocks the bowl's way to the stove. Moved to the nearest
//! clear spot, the move reads as clearing the path; carried all the way to
//! storage, it reads as a task of its own.

use motion_reasoning::demogen::{fig1_spec, generate, NoiseParams};
use motion_reasoning::recognizer::{analyze, RecognizerParams};
use motion_reasoning::SceneConfig;

fn main() {
    let scene = SceneConfig::mockup_kitchen();
    let params = RecognizerParams::default();
    for intentional in [false, true] {
        let g = generate(fig1_spec(intentional), 3, NoiseParams::default(), &scene).unwrap();
        let a = analyze(&g.demo, &params, false).unwrap();
        println!("{}", g.spec);
        for (seg, intent) in a.analyses.iter().zip(a.intents(params.intent.prior_task)) {
            let scores: Vec<String> = intent
                .scores
                .iter()
                .map(|(k, s)| format!("{k} {:+.4}", s.log_likelihood))
                .collect();
            println!("  {:<14} {:<17} {}", seg.object.as_str(), intent.decision.as_str(), scores.join("  "));
        }
        println!("  goal: {}", a.goal_ours(params.intent.prior_task).unwrap());
    }
}
