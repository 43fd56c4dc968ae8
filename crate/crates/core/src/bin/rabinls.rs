fn main() {
    std::process::exit(rabinls::cli::run(std::env::args_os()));
}
