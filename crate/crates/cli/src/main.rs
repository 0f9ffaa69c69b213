use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_tol = std::env::var(retrodict_cli::TOL_ENV).ok();
    let out = retrodict_cli::run(std::env::args_os(), env_tol.as_deref());
    // A closed pipe is not worth a panic.
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code)
}
