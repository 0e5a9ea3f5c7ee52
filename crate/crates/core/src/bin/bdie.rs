fn main() {
    std::process::exit(bdie::cli::run(std::env::args_os()));
}
