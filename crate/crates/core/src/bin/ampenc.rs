fn main() {
    std::process::exit(ampenc::cli::main_with_args(std::env::args_os()));
}
