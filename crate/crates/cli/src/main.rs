use std::process::ExitCode;

fn main() -> ExitCode {
    let threads = std::env::var("LMMSE_THREADS").ok();
    ExitCode::from(lmmse_cli::main_with(std::env::args_os(), threads.as_deref()))
}
