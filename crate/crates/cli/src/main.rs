fn main() {
    std::process::exit(rankone_cli::run(std::env::args_os()));
}
