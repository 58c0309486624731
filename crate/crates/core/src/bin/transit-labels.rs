use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use transit_labels::cli::{run, Cli};

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let mut out = io::BufWriter::new(io::stdout().lock());
    let outcome = run(cli, &mut out)?;
    out.flush()?;
    Ok(ExitCode::from(outcome.exit_code()))
}
