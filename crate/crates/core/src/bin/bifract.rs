use std::process::ExitCode;

fn main() -> ExitCode {
    bifract::cli::main_with_args(std::env::args_os())
}
