fn main() {
    std::process::exit(qadvice::cli::main_with_args(std::env::args_os()));
}
