fn main() {
    std::process::exit(diffuse::cli::run(std::env::args_os()));
}
