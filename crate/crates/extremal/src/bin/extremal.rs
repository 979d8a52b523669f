fn main() {
    std::process::exit(extremal::cli::run(std::env::args()));
}
