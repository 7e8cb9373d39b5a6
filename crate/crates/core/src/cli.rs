//! The `dualshift` command line.
//!
//! Exit codes: 0 success, 1 refused transformation, failed step or failed
//! evaluation, 2 unreadable, unparsable or ill-typed input, 3 internal
//! invariant breach.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::duality::{self, roundtrip_check, transform_program, ScenarioError, TransformDirection, TransformError};
use crate::interp::{Interpreter, DEFAULT_STEP_LIMIT};
use crate::lang::{parse_expr, parse_named, pretty, typecheck, Diagnostic, Program};
use crate::lens::{classify, coverage_matrix, detect_hierarchy, explain, matrix_csv, render_matrix, HierarchyInfo};

#[derive(Debug, Parser)]
#[command(name = "dualshift", version, about = "Move MiniObj programs between Composite and Visitor form")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report the hierarchy, its coverage matrix and its structure class.
    Detect {
        input: PathBuf,
        /// Print `subtype,operation,owner` lines instead of the report.
        #[arg(long)]
        emit_matrix_csv: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite a data-oriented program into visitor form.
    ToVisitor {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite a visitor-form program back into data-oriented form.
    ToComposite {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Transform to the other form and back; succeed iff the text is unchanged.
    Roundtrip { input: PathBuf },
    /// Evaluate an expression against the program.
    Run {
        input: PathBuf,
        #[arg(long)]
        entry: String,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
        step_limit: u64,
    },
    /// Execute a scenario script against a program.
    Scenario {
        script: PathBuf,
        program: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the per-step log here instead of standard error.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Print the canonical form.
    Fmt {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Refused(String),
    #[error("invariant breach: {0}")]
    Breach(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Refused(_) => 1,
            CliError::Input(_) => 2,
            CliError::Breach(_) => 3,
        }
    }
}

fn diag_lines(path: &Path, ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| format!("{}: {d}", path.display())).collect::<Vec<_>>().join("\n")
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_untyped(path: &Path) -> Result<Program, CliError> {
    parse_named(&read(path)?, &path.display().to_string()).map_err(|ds| CliError::Input(diag_lines(path, &ds)))
}

fn load(path: &Path) -> Result<Program, CliError> {
    let p = load_untyped(path)?;
    let errors: Vec<Diagnostic> = typecheck(&p).into_iter().filter(Diagnostic::is_error).collect();
    if errors.is_empty() {
        Ok(p)
    } else {
        Err(CliError::Input(diag_lines(path, &errors)))
    }
}

/// Writes through a temporary file in the destination directory, so the
/// destination either keeps its old content or holds all of `text`.
pub fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => write_atomic(path, text).map_err(|e| CliError::Refused(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn transform_error(d: TransformDirection, e: TransformError) -> CliError {
    match e {
        TransformError::Breach(m) => CliError::Breach(m),
        other => CliError::Refused(format!("{d} refused:\n{other}")),
    }
}

pub fn describe(h: &HierarchyInfo) -> String {
    let ops: Vec<String> = h.operations.iter().map(|o| format!("{}: {}", o.name, o.ret)).collect();
    let mut out = format!("root: {}\nsubtypes: {}\noperations: {}\n", h.root, h.subtypes.join(", "), ops.join(", "));
    match (&h.visitor_interface, &h.accept) {
        (Some(v), Some(a)) => out.push_str(&format!("visitor interface: {v} (dispatch through {a})\n")),
        _ => out.push_str("visitor interface: none\n"),
    }
    if !h.visitor_classes.is_empty() {
        let vs: Vec<String> = h
            .operations
            .iter()
            .filter_map(|o| h.visitor_classes.get(&o.name).map(|v| format!("{}={v}", o.name)))
            .collect();
        out.push_str(&format!("visitor classes: {}\n", vs.join(", ")));
    }
    out
}

fn detect(input: &Path, csv: bool, output: Option<&Path>) -> Result<(), CliError> {
    let p = load(input)?;
    let h = detect_hierarchy(&p).map_err(|ds| CliError::Refused(diag_lines(input, &ds)))?;
    let m = coverage_matrix(&p, &h);
    let text = if csv {
        matrix_csv(&m)
    } else {
        format!("{}\n{}\n{}\n", describe(&h), render_matrix(&m), explain(&classify(&m), &m))
    };
    emit(output, &text)
}

fn scenario(script: &Path, program: &Path, output: Option<&Path>, log: Option<&Path>) -> Result<(), CliError> {
    let s = duality::parse_script(&read(script)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", script.display())))?;
    let p = load(program)?;
    let base = script.parent().unwrap_or(Path::new(""));
    let write_log = |lines: &[duality::StepLog]| -> Result<(), CliError> {
        let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
        match log {
            Some(path) => write_atomic(path, &text).map_err(|e| CliError::Refused(format!("cannot write {}: {e}", path.display()))),
            None => {
                eprint!("{text}");
                Ok(())
            }
        }
    };
    match duality::run_scenario(&s, base, &p) {
        Ok(run) => {
            write_log(&run.log)?;
            emit(output, &pretty(&run.program))
        }
        Err(e @ ScenarioError::Syntax { .. }) => Err(CliError::Input(e.to_string())),
        Err(ScenarioError::Step { index, line, text, message, log }) => {
            write_log(&log)?;
            Err(CliError::Refused(format!("step {index} (line {line}) {text} failed:\n{message}")))
        }
    }
}

pub fn execute(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Detect { input, emit_matrix_csv, output } => detect(input, *emit_matrix_csv, output.as_deref()),
        Command::ToVisitor { input, output } | Command::ToComposite { input, output } => {
            let d = match cmd {
                Command::ToVisitor { .. } => TransformDirection::ToVisitor,
                _ => TransformDirection::ToComposite,
            };
            let p = load(input)?;
            let out = transform_program(&p, d).map_err(|e| transform_error(d, e))?;
            emit(output.as_deref(), &pretty(&out))
        }
        Command::Roundtrip { input } => {
            let p = load(input)?;
            let start = Instant::now();
            let report = roundtrip_check(&p).map_err(|e| match e {
                TransformError::Breach(m) => CliError::Breach(m),
                other => CliError::Refused(format!("roundtrip refused:\n{other}")),
            })?;
            print!("{report}");
            eprintln!("elapsed: {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
            if report.identical {
                Ok(())
            } else {
                Err(CliError::Breach("round trip changed the program".into()))
            }
        }
        Command::Run { input, entry, step_limit } => {
            let p = load(input)?;
            let e = parse_expr(entry).map_err(|d| CliError::Input(format!("entry: {d}")))?;
            let v = Interpreter::new(&p)
                .with_step_limit(*step_limit)
                .eval(&e)
                .map_err(|err| CliError::Refused(format!("evaluation failed: {err}")))?;
            println!("{v}");
            Ok(())
        }
        Command::Scenario { script, program, output, log } => scenario(script, program, output.as_deref(), log.as_deref()),
        Command::Fmt { input, output } => {
            let p = load_untyped(input)?;
            emit(output.as_deref(), &pretty(&p))
        }
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
