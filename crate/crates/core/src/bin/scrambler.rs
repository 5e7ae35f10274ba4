fn main() {
    std::process::exit(scrambler_core::cli::main_with_args(std::env::args_os()));
}
