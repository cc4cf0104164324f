fn main() {
    std::process::exit(synthaudit_cli::run(std::env::args_os()));
}
