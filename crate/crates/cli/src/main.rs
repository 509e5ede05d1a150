use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let execution = cycpres_cli::run(std::env::args_os());
    print!("{}", execution.stdout);
    eprint!("{}", execution.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(execution.code as u8)
}
