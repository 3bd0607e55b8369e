fn main() {
    std::process::exit(windsteer::cli::run());
}
