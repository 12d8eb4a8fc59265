mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Settings, UsageError};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<effnoise::Error>() {
            return match e {
                effnoise::Error::ResourceLimit(_) => EXIT_RESOURCE,
                effnoise::Error::InvalidArgument(_)
                | effnoise::Error::UnsupportedParameter(_)
                | effnoise::Error::Parse { .. }
                | effnoise::Error::ConstructionFailure(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            };
        }
    }
    EXIT_FAILURE
}

fn emit(settings: &Settings, text: &str) -> anyhow::Result<()> {
    match &settings.out {
        Some(path) => std::fs::write(path, text).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let settings = Settings::resolve(&cli.common)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = settings.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build()?;
    pool.install(|| {
        let output = match cli.command {
            Command::Validate => {
                let (text, ok) = commands::validate(&settings)?;
                emit(&settings, &text)?;
                return Ok(if ok { 0 } else { EXIT_VALIDATION });
            }
            Command::Channel => commands::channel(&settings)?,
            Command::Lifetime => commands::lifetime(&settings)?,
            Command::Negativity => commands::negativity(&settings)?,
            Command::Concat => commands::concat(&settings)?,
        };
        for note in &output.notes {
            eprintln!("{note}");
        }
        emit(&settings, &output.csv)?;
        Ok(0)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
