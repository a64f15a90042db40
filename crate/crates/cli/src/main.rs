fn main() {
    std::process::exit(mssvcj_cli::run(std::env::args_os()));
}
