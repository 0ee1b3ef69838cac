fn main() {
    std::process::exit(dd_metrology::cli::run());
}
