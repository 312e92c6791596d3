use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = lassocheck_cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code)
}
