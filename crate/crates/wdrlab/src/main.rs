fn main() {
    std::process::exit(wdrlab::cli::run());
}
