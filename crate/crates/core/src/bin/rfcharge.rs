fn main() {
    std::process::exit(rfcharge::cli::run(std::env::args_os()));
}
