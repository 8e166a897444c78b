fn main() {
    std::process::exit(scartower_cli::run(std::env::args_os()));
}
