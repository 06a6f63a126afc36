fn main() {
    std::process::exit(qdicut::cli::run());
}
