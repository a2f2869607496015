fn main() {
    std::process::exit(kova_cli::run(std::env::args_os()));
}
