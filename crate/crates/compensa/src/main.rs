fn main() {
    std::process::exit(compensa::cli::main_with_args(std::env::args_os()));
}
