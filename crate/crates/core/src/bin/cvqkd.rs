fn main() {
    std::process::exit(cvqkd::cli::main());
}
