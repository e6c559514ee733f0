fn main() {
    std::process::exit(symbb_core::cli::run(std::env::args_os()));
}
