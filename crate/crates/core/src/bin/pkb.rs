fn main() {
    std::process::exit(pkb::cli::main());
}
