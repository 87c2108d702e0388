use std::process::ExitCode;

fn main() -> ExitCode {
    gn_rigidity::cli::run(std::env::args_os())
}
