fn main() {
    std::process::exit(aperiodic::cli::run_command(std::env::args_os()));
}
