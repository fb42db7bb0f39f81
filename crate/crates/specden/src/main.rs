fn main() {
    std::process::exit(specden::cli::run());
}
