use std::io;
use std::process::ExitCode;

use qficoe::cli;

fn main() -> ExitCode {
    let env_out = std::env::var(cli::OUT_DIR_ENV).ok();
    let code = cli::run(
        std::env::args_os(),
        env_out.as_deref(),
        &mut io::stdout(),
        &mut io::stderr(),
    );
    ExitCode::from(code as u8)
}
