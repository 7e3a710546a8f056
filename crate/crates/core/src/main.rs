fn main() {
    std::process::exit(wyner_mg::cli::run(std::env::args_os()));
}
