fn main() {
    std::process::exit(whittaker_hill::cli::main_with_args(std::env::args_os()));
}
