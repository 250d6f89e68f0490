fn main() {
    std::process::exit(pagen::cli::run(std::env::args_os()));
}
