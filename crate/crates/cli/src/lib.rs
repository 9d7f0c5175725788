//! Command-line front end: argument and config handling, output writing and
//! plots for every model in `spindle-core`.

pub mod args;
mod commands;
pub mod plot;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use serde_json::Value;

use args::{Cli, FileConfig, Format, PlotMode};

/// Failure of a CLI run, carrying its exit code class.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Io(String),
    Core(spindle_core::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "E_USAGE",
            CliError::Config(_) => "E_CONFIG",
            CliError::Io(_) => "E_IO",
            CliError::Core(e) => e.code(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<spindle_core::Error> for CliError {
    fn from(e: spindle_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn read_file(path: &std::path::Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Resolved global options.
#[derive(Debug, Clone)]
pub struct Global {
    pub out_dir: Option<PathBuf>,
    pub format: Format,
    pub plot: PlotMode,
    pub seed: u64,
}

/// What a subcommand produced.
pub struct Output {
    pub name: &'static str,
    pub csv: String,
    pub json: Value,
    pub svg: Option<String>,
}

/// Round every number in a JSON tree to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => {
                serde_json::Number::from_f64(spindle_core::io::round12(f))
                    .map_or(Value::Null, Value::Number)
            }
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn emit(global: &Global, out: Output, stdout: &mut dyn Write) -> CliResult<()> {
    let body = match global.format {
        Format::Csv => out.csv,
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&round_json(out.json)).expect("JSON values serialize");
            s.push('\n');
            s
        }
    };
    let ext = match global.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match &global.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            let write = |file: String, text: &str| {
                let path = dir.join(file);
                std::fs::write(&path, text)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
            };
            write(format!("{}.{ext}", out.name), &body)?;
            if let (PlotMode::Svg, Some(svg)) = (global.plot, &out.svg) {
                write(format!("{}.svg", out.name), svg)?;
            }
        }
        None => {
            if global.plot == PlotMode::Svg {
                return Err(CliError::Usage("--plot svg needs --out-dir".into()));
            }
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let file: FileConfig = match &cli.config {
        Some(path) => toml::from_str(&read_file(path)?)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))?,
        None => FileConfig::default(),
    };
    let global = Global {
        out_dir: cli.out_dir.or(file.global.out_dir.clone()),
        format: cli.format.or(file.global.format).unwrap_or(Format::Csv),
        plot: cli.plot.or(file.global.plot).unwrap_or(PlotMode::None),
        seed: cli.seed.or(file.global.seed).unwrap_or(0),
    };
    let out = commands::execute(cli.command, file, &global)?;
    emit(&global, out, stdout)
}

/// Run with explicit argv and output streams; returns the exit code.
pub fn dispatch_to<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = writeln!(stderr, "error[E_USAGE]: invalid arguments");
            let _ = write!(stderr, "{}", e.render());
            return 2;
        }
    };
    match run(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

/// Run against the process streams; returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    dispatch_to(argv, &mut out, &mut err)
}
