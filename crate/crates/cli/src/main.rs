fn main() {
    std::process::exit(shiftlab_cli::main_with(std::env::args_os()));
}
