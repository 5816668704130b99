mod args;
mod commands;
mod inputs;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::de::DeserializeOwned;
use serde_json::json;

use args::{Cli, Command, Format, RunConfig};
use output::Outcome;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_NO_WITNESS: u8 = 2;

struct Failure {
    kind: String,
    message: String,
}

impl From<multicorr::Error> for Failure {
    fn from(e: multicorr::Error) -> Self {
        Self { kind: e.kind().into(), message: e.to_string() }
    }
}

impl Failure {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        Self { kind: kind.into(), message: message.into() }
    }
}

fn fail(f: Failure) -> ExitCode {
    let doc = json!({ "error": { "kind": f.kind, "message": f.message } });
    eprintln!("{doc}");
    ExitCode::from(EXIT_ERROR)
}

fn params<T: DeserializeOwned>(v: serde_json::Value) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::new("invalid_config", e.to_string()))
}

fn dispatch(command: Command, seed: u64) -> Result<Outcome, Failure> {
    Ok(match command {
        Command::Gowers(a) => commands::gowers(&a, seed)?,
        Command::FormsAverage(a) => commands::forms_average(&a, seed)?,
        Command::Decompose(a) => commands::decompose_cmd(&a)?,
        Command::Prcheck(a) => commands::prcheck(&a)?,
        Command::Recurrence2(a) => commands::recurrence2(&a)?,
        Command::Recurrence3(a) => commands::recurrence3(&a)?,
        Command::Density(a) => commands::density(&a)?,
        Command::Spectral(a) => commands::spectral(&a, seed)?,
        Command::Gauge(a) => commands::gauge(&a, seed)?,
        Command::Profile(a) => commands::profile(&a, seed)?,
        Command::Run(_) => return Err(Failure::new("invalid_config", "a run config cannot start another run")),
    })
}

/// Turns a config file into the equivalent command line values.
fn from_config(path: &Path) -> Result<(Command, u64, Option<PathBuf>, Format), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Failure::new("invalid_config", e.to_string()))?;
    let p = cfg.parameters;
    let command = match cfg.subcommand.as_str() {
        "gowers" => Command::Gowers(params(p)?),
        "forms-average" => Command::FormsAverage(params(p)?),
        "decompose" => Command::Decompose(params(p)?),
        "prcheck" => Command::Prcheck(params(p)?),
        "recurrence2" => Command::Recurrence2(params(p)?),
        "recurrence3" => Command::Recurrence3(params(p)?),
        "density" => Command::Density(params(p)?),
        "spectral" => Command::Spectral(params(p)?),
        "gauge" => Command::Gauge(params(p)?),
        "profile" => Command::Profile(params(p)?),
        other => return Err(Failure::new("invalid_config", format!("unknown subcommand {other:?}"))),
    };
    Ok((command, cfg.seed, cfg.output_path, cfg.format))
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    let (command, seed, output, format) = match cli.command {
        Command::Run(r) => {
            let (command, seed, path, format) = from_config(&r.config)?;
            // The config's own output_path wins over --output.
            (command, seed, path.or(cli.output), format)
        }
        other => (other, cli.seed, cli.output, cli.format),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Failure::new("invalid_argument", "--threads must be positive"));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| Failure::new("internal", e.to_string()))?;
    let outcome = pool.install(|| dispatch(command, seed))?;
    let text = output::render(&outcome, format).map_err(|e| Failure::new("internal", e))?;
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(if outcome.exhausted { EXIT_NO_WITNESS } else { EXIT_OK })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::from(EXIT_OK);
        }
        Err(e) => return fail(Failure::new("usage", e.to_string().trim_end())),
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => fail(f),
    }
}
