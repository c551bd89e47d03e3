fn main() {
    std::process::exit(desira::cli::main());
}
