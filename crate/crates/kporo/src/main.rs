use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(kporo::cli::run(std::env::args()))
}
