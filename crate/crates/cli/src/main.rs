fn main() {
    std::process::exit(stablelab_cli::run(std::env::args_os()));
}
