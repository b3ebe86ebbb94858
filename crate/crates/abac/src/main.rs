fn main() {
    std::process::exit(abac::cli::run(std::env::args_os()));
}
