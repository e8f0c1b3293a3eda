fn main() {
    std::process::exit(fbs_cli::run(std::env::args_os()));
}
