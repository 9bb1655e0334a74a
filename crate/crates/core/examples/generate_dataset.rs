//! Writes the 96-demonstration dataset, e.g.
//! `cargo run --release --example generate_dataset -- out/`.

use motion_reasoning::cli::{cmd_gen, DEMOS_PER_TASK};
use motion_reasoning::io::Config;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "dataset".into());
    let cfg = Config::default();
    match cmd_gen(&cfg, out.as_ref(), None, DEMOS_PER_TASK) {
        Ok(m) => {
            println!("{} demonstrations, master seed {}", m.entries.len(), m.master_seed);
            for e in m.entries.iter().step_by(DEMOS_PER_TASK) {
                println!("  task {:>2} {}", e.task_index, e.task);
            }
        }
        Err(e) => {
            eprintln!("{}", e.message);
            std::process::exit(e.code);
        }
    }
}
