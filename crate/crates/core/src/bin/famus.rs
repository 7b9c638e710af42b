fn main() {
    std::process::exit(famus::cli::run(std::env::args_os()));
}
