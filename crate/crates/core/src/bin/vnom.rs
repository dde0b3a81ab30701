fn main() {
    std::process::exit(vertex_nomination::cli::run());
}
