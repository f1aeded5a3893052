fn main() {
    std::process::exit(qmp_cli::run(std::env::args_os()));
}
