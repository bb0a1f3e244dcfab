fn main() {
    std::process::exit(kframes::cli::run());
}
