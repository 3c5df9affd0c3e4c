use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};
use pizzetti::error::ErrorClass;
use pizzetti::problem::{error_record, parse_spec, run, Task};
use pizzetti::Error;
use serde_json::Value;

const THREADS_ENV: &str = "PIZZETTI_THREADS";

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Solve,
    PizzettiCheck,
    Borel,
    Growth,
    Verdict,
    Symbol,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Solve => Task::Solve,
            TaskArg::PizzettiCheck => Task::PizzettiCheck,
            TaskArg::Borel => Task::Borel,
            TaskArg::Growth => Task::Growth,
            TaskArg::Verdict => Task::Verdict,
            TaskArg::Symbol => Task::Symbol,
        }
    }
}

/// Formal solutions, generalised means and summability verdicts for
/// `(∂_t − P(∂_z))u = 0`.
///
/// Exit codes: 0 success (whatever the verdict), 2 invalid problem,
/// 3 numeric failure, 4 internal error. PIZZETTI_THREADS caps worker threads.
#[derive(Debug, Parser)]
#[command(name = "pizzetti", version)]
struct Cli {
    task: TaskArg,
    /// Problem file (JSON).
    #[arg(long, conflicts_with = "json", required_unless_present = "json")]
    spec: Option<PathBuf>,
    /// Inline problem (JSON).
    #[arg(long)]
    json: Option<String>,
    /// Directory for report.json and CSV sidecars; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the timestamp field null.
    #[arg(long)]
    no_timestamp: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Spec => 2,
        ErrorClass::Numeric => 3,
        ErrorClass::Internal => 4,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::spec(THREADS_ENV, format!("not a thread count: {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

/// Inserts the subcommand as the task, rejecting a conflicting one.
fn with_task(text: &str, task: Task) -> Result<String, Error> {
    let mut v: Value = serde_json::from_str(text)
        .map_err(|e| Error::spec("$", format!("malformed JSON: {e}")))?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| Error::spec("$", "problem must be a JSON object"))?;
    match obj.get("task").and_then(Value::as_str) {
        Some(t) if t != task.as_str() => {
            return Err(Error::spec("task", format!("problem declares {t:?} but the command is {:?}", task.as_str())));
        }
        _ => {
            obj.insert("task".into(), Value::from(task.as_str()));
        }
    }
    Ok(v.to_string())
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), Error> {
    std::fs::write(dir.join(name), contents)
        .map_err(|e| Error::Internal(format!("cannot write {}: {e}", dir.join(name).display())))
}

/// Prints to stdout; a closed pipe is not an error.
fn emit(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn execute(cli: &Cli) -> Result<(), Error> {
    configure_threads()?;
    let text = match (&cli.spec, &cli.json) {
        (Some(path), _) => std::fs::read_to_string(path)
            .map_err(|e| Error::spec("--spec", format!("cannot read {}: {e}", path.display())))?,
        (None, Some(json)) => json.clone(),
        (None, None) => return Err(Error::spec("--spec", "no problem given")),
    };
    let spec = parse_spec(&with_task(&text, cli.task.into())?)?;
    let mut report = run(&spec)?;
    if !cli.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        report.timestamp = Some(secs.to_string());
    }
    let json = report.to_json();
    match &cli.out {
        None => emit(&json),
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::Internal(format!("cannot create {}: {e}", dir.display())))?;
            write_out(dir, "report.json", &(json + "\n"))?;
            for s in &report.sidecars {
                write_out(dir, &s.name, &s.contents)?;
            }
            emit(&dir.join("report.json").display().to_string());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&error_record(&e)).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(exit_code(&e))
        }
    }
}
