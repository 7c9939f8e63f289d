fn main() {
    std::process::exit(twocopy::cli::main_with_args(std::env::args_os()));
}
