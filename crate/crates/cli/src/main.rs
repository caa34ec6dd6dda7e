use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(creyes_cli::run(std::env::args_os()))
}
