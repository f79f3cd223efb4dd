fn main() -> std::process::ExitCode {
    partmatch::cli::run(std::env::args_os())
}
