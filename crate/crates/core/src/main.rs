fn main() {
    std::process::exit(basinlab::cli::run(std::env::args_os()));
}
