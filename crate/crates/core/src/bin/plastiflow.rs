fn main() {
    std::process::exit(plastiflow::cli::run(std::env::args_os()));
}
