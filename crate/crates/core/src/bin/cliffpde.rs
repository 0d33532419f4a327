fn main() {
    std::process::exit(cliffpde::cli::run(std::env::args_os()));
}
