fn main() {
    std::process::exit(cyclesmooth::cli::run(std::env::args_os()));
}
