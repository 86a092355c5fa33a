fn main() {
    std::process::exit(astrogibbs_cli::main_with(std::env::args_os()));
}
