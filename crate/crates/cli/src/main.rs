use clap::Parser;
use rotminkowski_cli::{run, Cli, CliError};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.run_config().and_then(run);
    match result {
        Ok(output) => {
            let written = match &output.config.out {
                Some(path) => {
                    std::fs::write(path, &output.text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
                }
                None => {
                    print!("{}", output.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {}", e.message());
                return ExitCode::from(e.exit_code() as u8);
            }
            if let Some(f) = &output.failure {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(output.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
