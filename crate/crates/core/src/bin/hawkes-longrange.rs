fn main() {
    std::process::exit(hawkes_longrange::cli::main_with(std::env::args_os()));
}
