fn main() {
    std::process::exit(supereight::cli::run(std::env::args_os()));
}
