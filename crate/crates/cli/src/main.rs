fn main() {
    std::process::exit(mallestat_cli::run(std::env::args_os()));
}
