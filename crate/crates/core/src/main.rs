use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(seedkit::cli::run(std::env::args()) as u8)
}
