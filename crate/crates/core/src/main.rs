fn main() {
    std::process::exit(x049::cli::run(std::env::args_os()));
}
