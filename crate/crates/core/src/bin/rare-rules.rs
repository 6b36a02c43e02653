fn main() {
    std::process::exit(rare_rules::cli::run(std::env::args_os()));
}
