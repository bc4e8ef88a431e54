use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(natprog_driver::cli::main(std::env::args_os()))
}
