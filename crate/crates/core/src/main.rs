fn main() {
    let code = symext::cli::run_from_env();
    std::process::exit(code);
}
