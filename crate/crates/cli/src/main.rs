mod args;
mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::{FileConfig, Settings};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
    Data(tweetscope::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Data(e) if e.is_io() => 1,
            CliError::Data(tweetscope::Error::InvalidParameter(_)) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<tweetscope::Error> for CliError {
    fn from(e: tweetscope::Error) -> Self {
        CliError::Data(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut s = Settings::resolve(&cli.global, file);
    let written = match &cli.command {
        Command::Stats => commands::stats(&s)?,
        Command::Preprocess(a) => {
            s.apply_vocab(a);
            commands::preprocess(&s)?
        }
        Command::Train(a) => {
            s.apply_train(a);
            commands::train(&s)?
        }
        Command::Sweep(a) => {
            s.apply_sweep(a);
            commands::sweep(&s)?
        }
        Command::Emotions(a) => {
            if a.lexicon.is_some() {
                s.lexicon = a.lexicon.clone();
            }
            commands::emotions(&s)?
        }
    };
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
