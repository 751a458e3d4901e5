fn main() {
    std::process::exit(trajmap::cli::run(std::env::args_os()));
}
