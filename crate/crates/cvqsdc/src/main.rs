fn main() {
    std::process::exit(cvqsdc::cli::run(std::env::args_os()));
}
