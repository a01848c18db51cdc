fn main() {
    std::process::exit(aqrm_cli::run(std::env::args_os()));
}
