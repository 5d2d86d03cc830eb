fn main() {
    std::process::exit(ocelf::cli::run(std::env::args_os()));
}
