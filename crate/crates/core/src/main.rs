fn main() {
    std::process::exit(jacketopt::cli::run(std::env::args_os()));
}
