fn main() {
    std::process::exit(fnbrack::cli::main_with(std::env::args_os()));
}
