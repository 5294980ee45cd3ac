fn main() {
    std::process::exit(dq::cli::run_from_env());
}
