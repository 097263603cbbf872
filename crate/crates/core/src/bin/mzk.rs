fn main() {
    std::process::exit(mzk::cli::run(std::env::args_os()));
}
