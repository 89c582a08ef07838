fn main() {
    std::process::exit(somor::cli::cli_run(std::env::args_os()));
}
