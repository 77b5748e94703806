fn main() {
    std::process::exit(pivotsweep_cli::run(std::env::args_os()));
}
