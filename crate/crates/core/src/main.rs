fn main() {
    std::process::exit(grassmann_designs::cli::run(std::env::args_os()));
}
