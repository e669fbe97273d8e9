fn main() {
    std::process::exit(hotelling::cli::run(std::env::args_os()));
}
