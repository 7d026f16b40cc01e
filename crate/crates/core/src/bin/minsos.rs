fn main() {
    std::process::exit(minsos::cli::main());
}
