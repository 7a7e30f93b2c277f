fn main() {
    std::process::exit(isoparam::cli::run(std::env::args_os()));
}
