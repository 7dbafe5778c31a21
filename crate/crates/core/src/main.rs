fn main() {
    std::process::exit(phiface::cli::run_command(std::env::args_os()));
}
