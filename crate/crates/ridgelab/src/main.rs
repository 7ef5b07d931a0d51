fn main() {
    std::process::exit(ridgelab::cli::run(std::env::args_os()));
}
