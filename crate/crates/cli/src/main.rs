use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use trunclsq_cli::app::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out, &mut io::stderr());
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(true), Ok(())) => ExitCode::SUCCESS,
        (Ok(false), Ok(())) => ExitCode::from(1),
        (Err(e), _) => {
            eprintln!("trunclsq: {e}");
            ExitCode::from(e.exit_code())
        }
        (_, Err(e)) => {
            eprintln!("trunclsq: {e}");
            ExitCode::from(1)
        }
    }
}
