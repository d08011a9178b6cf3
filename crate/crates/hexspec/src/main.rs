fn main() {
    std::process::exit(hexspec::cli::main_with_args(std::env::args_os()));
}
