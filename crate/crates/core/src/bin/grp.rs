use std::process::ExitCode;

fn main() -> ExitCode {
    l2approx::cli::main_with_args(std::env::args_os())
}
