//! The full protocol: generate (or reuse) a dataset, then run the ten
//! train/test splits and print the comparison table.

use motion_reasoning::cli::{cmd_eval, cmd_gen, DEMOS_PER_TASK};
use motion_reasoning::io::{Config, MANIFEST_FILE};

fn main() {
    let cfg = Config::default();
    let dir = std::env::args().nth(1).unwrap_or_else(|| "dataset".into());
    let dir = std::path::Path::new(&dir);
    if !dir.join(MANIFEST_FILE).exists() {
        cmd_gen(&cfg, dir, None, DEMOS_PER_TASK).unwrap_or_else(|e| panic!("{}", e.message));
    }
    let (table, _json) = cmd_eval(&cfg, dir, None).unwrap_or_else(|e| panic!("{}", e.message));
    print!("{table}");
}
