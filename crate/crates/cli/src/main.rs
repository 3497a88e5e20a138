fn main() {
    std::process::exit(corefud_cli::run(std::env::args_os()));
}
