use std::io::IsTerminal;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let color = stdout.is_terminal() && std::env::var_os("NO_COLOR").is_none();
    let mut out = stdout.lock();
    match evar::cli::run(std::env::args_os(), &mut out, color) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("evar: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
