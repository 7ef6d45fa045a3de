fn main() {
    let code = ricci::cli::run_from_args(std::env::args_os());
    std::process::exit(code);
}
