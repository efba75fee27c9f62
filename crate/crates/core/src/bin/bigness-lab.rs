fn main() {
    std::process::exit(bigness_core::cli::run_cli(std::env::args_os()));
}
