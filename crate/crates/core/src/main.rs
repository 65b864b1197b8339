fn main() {
    std::process::exit(rsrr::cli::run(std::env::args_os()));
}
