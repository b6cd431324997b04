fn main() {
    std::process::exit(trapmode::cli::run(std::env::args()));
}
