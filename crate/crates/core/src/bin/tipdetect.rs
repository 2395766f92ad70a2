fn main() {
    std::process::exit(tipdetect::cli::run(std::env::args_os()));
}
