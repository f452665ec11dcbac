fn main() {
    std::process::exit(ucut::cli::run(std::env::args_os()));
}
