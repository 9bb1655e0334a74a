//! Prints the default configuration document.

fn main() {
    print!("{}", motion_reasoning::io::to_pretty_json(&motion_reasoning::io::Config::default()));
}
