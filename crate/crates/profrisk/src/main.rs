use std::process::ExitCode;

use clap::Parser;

use profrisk::cli::{AnalyzeArgs, Cli, Command};
use profrisk::corpus::{self, OutputFormat};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => analyze(&args),
    }
}

fn analyze(args: &AnalyzeArgs) -> ExitCode {
    let config = match args.to_run_config() {
        Ok(config) => config,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    match corpus::run_analysis(&config) {
        Ok(run) => {
            if config.formats.contains(&OutputFormat::Table) {
                print!("{}", corpus::render_tables(&run.summary));
            }
            eprintln!(
                "analyzed {} files ({} parsed, {} skipped), {} joined cases -> {}",
                run.manifest.files_attempted,
                run.manifest.files_parsed,
                run.manifest.files_skipped,
                run.outcome.cases.len(),
                config.output_dir.display(),
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
