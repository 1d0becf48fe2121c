fn main() -> std::process::ExitCode {
    hamcert::cli::run(std::env::args_os())
}
