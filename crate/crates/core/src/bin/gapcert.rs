fn main() {
    std::process::exit(gapcert::cli::main_with_args(std::env::args_os()));
}
