fn main() {
    std::process::exit(cefsim::cli::main());
}
