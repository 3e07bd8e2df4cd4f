use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "yardstick", version, about = "Relativistic wave-packet localization experiments")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// List the available scenarios and their defaults.
    List,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.cmd {
        Cmd::List => {
            print!("{}", yardstick::cli::list_scenarios());
            ExitCode::SUCCESS
        }
        Cmd::Run { config } => match yardstick::cli::run(&config) {
            Ok(out) => {
                println!("wrote {} files to {}", out.files.len() + 1, out.output_dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
