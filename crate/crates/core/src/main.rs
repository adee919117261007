fn main() {
    std::process::exit(bast::cli::run(std::env::args_os()));
}
