fn main() {
    std::process::exit(arbocert::cli::run(std::env::args_os()));
}
