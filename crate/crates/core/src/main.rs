fn main() {
    std::process::exit(percor::cli::run(std::env::args_os()));
}
