use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use pseudoherm_cli::{execute, Cli, CliError};

const THREADS_VAR: &str = "PSEUDOHERM_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::InvalidArgument(format!("{THREADS_VAR}='{raw}' is not a thread count"))
    })?;
    // 0 leaves rayon's default (one thread per core).
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::InvalidArgument(format!("{THREADS_VAR}: {e}")))?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let report = execute(cli)?;
    for (path, text) in &report.side_files {
        write_file(path, text)?;
    }
    match &cli.out {
        Some(path) => {
            write_file(path, &report.body)?;
            println!("{}", report.summary);
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(report.body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
            eprintln!("{}", report.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
