fn main() {
    std::process::exit(modcancel::cli::run(std::env::args_os()));
}
