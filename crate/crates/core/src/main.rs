fn main() {
    std::process::exit(curved_cc::cli::run());
}
