fn main() {
    std::process::exit(bandfold::experiments::cli::run(std::env::args_os()));
}
