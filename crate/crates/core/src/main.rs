fn main() {
    std::process::exit(thetaforge::cli::run(std::env::args_os()));
}
