fn main() {
    std::process::exit(wikiprofiles::cli::run(std::env::args_os()));
}
