use std::process::ExitCode;

use clap::Parser;
use wdistill_cli::{data_path, run, Cli, CliError, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(report) => {
            let rendered = report.render(cli.json);
            let writes_data = matches!(cli.command, Command::GapCurve { .. } | Command::ExportSdpa { .. });
            match (&cli.output, writes_data) {
                (Some(_), false) => {
                    let path = data_path(&cli, "");
                    if let Err(e) = std::fs::write(&path, rendered) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                _ => print!("{rendered}"),
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Failed(report)) => {
            print!("{report}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
