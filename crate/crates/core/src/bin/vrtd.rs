fn main() {
    std::process::exit(vrtd::cli::main_with_args(std::env::args_os()));
}
