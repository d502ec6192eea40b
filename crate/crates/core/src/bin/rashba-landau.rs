fn main() {
    std::process::exit(rashba_landau::cli::run(std::env::args_os()));
}
