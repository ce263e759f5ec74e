fn main() {
    std::process::exit(landau_cli::run(std::env::args_os()));
}
