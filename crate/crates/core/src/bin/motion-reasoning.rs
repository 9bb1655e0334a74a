fn main() {
    std::process::exit(motion_reasoning::cli::run(std::env::args_os()));
}
