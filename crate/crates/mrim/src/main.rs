fn main() {
    std::process::exit(mrim::cli::main_with(std::env::args_os()));
}
