fn main() {
    std::process::exit(xspectra::cli::run(std::env::args_os()));
}
