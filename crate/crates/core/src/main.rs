use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gqms::data::{ingest_csv, ingest_jsonl, merge, Dataset};
use gqms::diagnostic::has_errors;
use gqms::eval::{evaluate, evaluate_series, EvalError, EvaluationReport};
use gqms::model::{detect_conflicts, validate, Model};
use gqms::patterns::{builtin_catalog, instantiate, list_patterns, Catalog};
use gqms::report::{render, Format, RenderOptions};
use gqms::syntax::{format_model, parse_model};

const OK: u8 = 0;
const INVALID: u8 = 1;
const INPUT: u8 = 2;
const USAGE: u8 = 3;

/// Writes to stdout. A closed pipe ends the process quietly.
fn out(args: std::fmt::Arguments) {
    if let Err(e) = io::stdout().lock().write_fmt(args) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(OK.into());
        }
        eprintln!("error: cannot write output: {e}");
        std::process::exit(INPUT.into());
    }
}

macro_rules! say {
    ($($arg:tt)*) => { out(format_args!($($arg)*)) };
}

macro_rules! sayln {
    () => { out(format_args!("\n")) };
    ($fmt:literal $($rest:tt)*) => { out(format_args!(concat!($fmt, "\n") $($rest)*)) };
}

#[derive(Parser)]
#[command(
    name = "gqms",
    version,
    about = "Author, check, evaluate and render GQM+Strategies models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model and print its diagnostics
    Validate {
        model: PathBuf,
        /// Treat every warning as a failure
        #[arg(long)]
        strict: bool,
    },
    /// Evaluate goal statuses against measurement data
    Eval {
        model: PathBuf,
        /// CSV or JSONL data file (repeatable; files are merged)
        #[arg(long = "data", required = true)]
        data: Vec<PathBuf>,
        #[command(flatten)]
        periods: Periods,
        #[arg(long, value_enum, default_value = "md")]
        format: EvalFormat,
    },
    /// Render a model, optionally with statuses
    Render {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "tree")]
        format: RenderFormat,
        #[arg(long = "data", requires = "period")]
        data: Vec<PathBuf>,
        #[arg(long, requires = "data")]
        period: Option<u32>,
    },
    /// Work with the pattern catalog
    Patterns {
        /// Catalog directory (overrides GQMS_PATTERNS)
        #[arg(long, global = true)]
        patterns: Option<PathBuf>,
        #[command(subcommand)]
        command: PatternCommand,
    },
    /// Rewrite a model in canonical form
    Fmt {
        model: PathBuf,
        /// Only report whether the file is canonical
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = true)]
struct Periods {
    #[arg(long, conflicts_with_all = ["from", "to"])]
    period: Option<u32>,
    #[arg(long, requires = "to")]
    from: Option<u32>,
    #[arg(long, requires = "from")]
    to: Option<u32>,
}

#[derive(Subcommand)]
enum PatternCommand {
    /// List the patterns in the catalog
    List,
    /// Print or write a pattern with its parameters bound
    Instantiate {
        id: String,
        /// Parameter binding, `name=value` (repeatable)
        #[arg(long = "set", value_parser = parse_binding)]
        set: Vec<(String, String)>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalFormat {
    Md,
    Tree,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Tree,
    Dot,
    Md,
}

fn parse_binding(arg: &str) -> Result<(String, String), String> {
    match arg.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected name=value, found `{arg}`")),
    }
}

/// Failure with the exit code it maps to; messages already printed.
struct Exit(u8);

type CmdResult = Result<(), Exit>;

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        Exit(INPUT)
    })
}

fn load_model(path: &Path) -> Result<Model, Exit> {
    let text = read(path)?;
    parse_model(&text, &path.display().to_string()).map_err(|errors| {
        for e in errors {
            eprintln!("error {e}");
        }
        Exit(INPUT)
    })
}

/// Loads and validates; errors (never warnings) stop the command.
fn load_valid_model(path: &Path) -> Result<Model, Exit> {
    let model = load_model(path)?;
    let diagnostics = validate(&model, false);
    if has_errors(&diagnostics) {
        for d in &diagnostics {
            eprintln!("{d}");
        }
        return Err(Exit(INVALID));
    }
    Ok(model)
}

fn load_data(paths: &[PathBuf], model: &Model) -> Result<Dataset, Exit> {
    let mut dataset = Dataset::new();
    for path in paths {
        let text = read(path)?;
        let jsonl = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("jsonl") || e.eq_ignore_ascii_case("ndjson"));
        let parsed = if jsonl {
            ingest_jsonl(&text, model)
        } else {
            ingest_csv(&text, model)
        };
        let part = parsed.map_err(|errors| {
            for e in errors {
                eprintln!("error {}: {e}", path.display());
            }
            Exit(INPUT)
        })?;
        dataset = merge(&dataset, &part).map_err(|conflicts| {
            for c in conflicts {
                eprintln!("error {}: {c}", path.display());
            }
            Exit(INPUT)
        })?;
    }
    Ok(dataset)
}

fn eval_failure(e: EvalError) -> Exit {
    match &e {
        EvalError::Invalid(diagnostics) => {
            for d in diagnostics {
                eprintln!("{d}");
            }
        }
        EvalError::EmptyRange { .. } => {
            eprintln!("error: {e}");
            return Exit(USAGE);
        }
        other => eprintln!("error: {other}"),
    }
    Exit(INVALID)
}

fn cmd_validate(path: &Path, strict: bool) -> CmdResult {
    let model = load_model(path)?;
    let mut diagnostics = validate(&model, strict);
    diagnostics.extend(detect_conflicts(&model));
    for d in &diagnostics {
        eprintln!("{d}");
    }
    if has_errors(&diagnostics) || (strict && !diagnostics.is_empty()) {
        return Err(Exit(INVALID));
    }
    Ok(())
}

fn cmd_eval(path: &Path, data: &[PathBuf], periods: &Periods, format: EvalFormat) -> CmdResult {
    let model = load_valid_model(path)?;
    let dataset = load_data(data, &model)?;
    let reports: Vec<EvaluationReport> = match (periods.period, periods.from, periods.to) {
        (Some(t), _, _) => vec![evaluate(&model, &dataset, t).map_err(eval_failure)?],
        (None, Some(from), Some(to)) => evaluate_series(&model, &dataset, from, to).map_err(eval_failure)?,
        _ => {
            eprintln!("error: give --period or both --from and --to");
            return Err(Exit(USAGE));
        }
    };
    let format = match format {
        EvalFormat::Md => Format::Md,
        EvalFormat::Tree => Format::Tree,
    };
    let options = RenderOptions::new(format);
    let series = reports.len() > 1;
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            sayln!();
        }
        if series && format == Format::Tree {
            sayln!("t={}", r.period);
        }
        say!("{}", render(&model, Some(r), &options));
        if format == Format::Md {
            sayln!();
        }
    }
    Ok(())
}

fn cmd_render(path: &Path, format: RenderFormat, data: &[PathBuf], period: Option<u32>) -> CmdResult {
    let model = load_valid_model(path)?;
    let report = match period {
        Some(t) => {
            let dataset = load_data(data, &model)?;
            Some(evaluate(&model, &dataset, t).map_err(eval_failure)?)
        }
        None => None,
    };
    let format = match format {
        RenderFormat::Tree => Format::Tree,
        RenderFormat::Dot => Format::Dot,
        RenderFormat::Md => Format::Md,
    };
    let text = render(&model, report.as_ref(), &RenderOptions::new(format));
    say!("{text}");
    if format == Format::Md && !text.is_empty() {
        sayln!();
    }
    Ok(())
}

fn catalog(dir: Option<&Path>) -> Result<Catalog, Exit> {
    let env = std::env::var_os("GQMS_PATTERNS")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    let catalog = match dir.map(Path::to_path_buf).or(env) {
        Some(dir) => list_patterns(&dir).map_err(|e| {
            eprintln!("error: cannot read pattern directory {}: {e}", dir.display());
            Exit(INPUT)
        })?,
        None => builtin_catalog(),
    };
    for w in &catalog.warnings {
        eprintln!("warning {w}");
    }
    Ok(catalog)
}

fn cmd_patterns(dir: Option<&Path>, command: &PatternCommand) -> CmdResult {
    let catalog = catalog(dir)?;
    match command {
        PatternCommand::List => {
            for p in &catalog.patterns {
                sayln!("{}  {} [{}]", p.id, p.title, p.goal_type.keyword());
                for param in &p.params {
                    let default = match &param.default {
                        Some(d) => format!(" (default {d:?})"),
                        None => " (required)".to_string(),
                    };
                    sayln!("    {}: {}{}  {}", param.name, param.kind, default, param.description);
                }
            }
            Ok(())
        }
        PatternCommand::Instantiate { id, set, output } => {
            let Some(pattern) = catalog.get(id) else {
                eprintln!("error: unknown pattern `{id}`");
                return Err(Exit(INVALID));
            };
            let mut binding = BTreeMap::new();
            for (k, v) in set {
                if binding.insert(k.clone(), v.clone()).is_some() {
                    eprintln!("error: `{k}` set more than once");
                    return Err(Exit(USAGE));
                }
            }
            let text = instantiate(pattern, &binding).map_err(|errors| {
                for e in errors {
                    eprintln!("error: {e}");
                }
                Exit(INVALID)
            })?;
            match output {
                Some(path) => fs::write(path, text).map_err(|e| {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    Exit(INPUT)
                }),
                None => {
                    say!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn cmd_fmt(path: &Path, check: bool) -> CmdResult {
    let text = read(path)?;
    let model = load_model(path)?;
    let canonical = format_model(&model);
    if canonical == text {
        return Ok(());
    }
    if check {
        eprintln!("{} is not in canonical form", path.display());
        return Err(Exit(INVALID));
    }
    fs::write(path, canonical).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        Exit(INPUT)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let result = match &cli.command {
        Command::Validate { model, strict } => cmd_validate(model, *strict),
        Command::Eval {
            model,
            data,
            periods,
            format,
        } => cmd_eval(model, data, periods, *format),
        Command::Render {
            model,
            format,
            data,
            period,
        } => cmd_render(model, *format, data, *period),
        Command::Patterns { patterns, command } => cmd_patterns(patterns.as_deref(), command),
        Command::Fmt { model, check } => cmd_fmt(model, *check),
    };
    match result {
        Ok(()) => ExitCode::from(OK),
        Err(Exit(code)) => ExitCode::from(code),
    }
}
