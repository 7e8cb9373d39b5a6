//! Line-oriented scripts of transformations and evolutions.
//!
//! ```text
//! # comments and blank lines are ignored
//! add-subtype Mult mult.members
//! to-visitor
//! add-operation check boolean check.members
//! assert-form function
//! ```
//!
//! Member files hold class members as they would appear between the braces
//! of a class body. Paths are relative to the script.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::lang::{parse_members, parse_type, Member, Program, Type};
use crate::lens::{classify, coverage_matrix, detect_hierarchy, StructureClass};

use super::evolve::{apply_evolution, footprint, EvolutionStep, Footprint};
use super::{transform_program, TransformDirection};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Transform(TransformDirection),
    AddSubtype { name: String, file: PathBuf },
    AddOperation { name: String, ret: Type, file: PathBuf },
    EditClass { name: String, file: PathBuf },
    AssertForm(StructureClass),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptLine {
    pub line: usize,
    pub text: String,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub steps: Vec<ScriptLine>,
}

/// What one executed step did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepLog {
    pub index: usize,
    pub line: usize,
    pub text: String,
    pub form: StructureClass,
    pub footprint: Footprint,
}

impl fmt::Display for StepLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} (line {}) {}: {}; touched {}", self.index, self.line, self.text, self.form, self.footprint)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioRun {
    pub program: Program,
    pub log: Vec<StepLog>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    /// The script or a member file does not parse.
    #[error("{location}: {message}")]
    Syntax { location: String, message: String },
    /// A step was refused; nothing after it ran.
    #[error("step {index} (line {line}) {text} failed:\n{message}")]
    Step { index: usize, line: usize, text: String, message: String, log: Vec<StepLog> },
}

fn syntax(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax { location: format!("line {line}"), message: message.into() }
}

pub fn parse_script(text: &str) -> Result<Scenario, ScenarioError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = trimmed.split_whitespace().collect();
        let arity = |n: usize| {
            if words.len() == n + 1 {
                Ok(())
            } else {
                Err(syntax(line, format!("{} takes {n} argument(s), found {}", words[0], words.len() - 1)))
            }
        };
        let command = match words[0] {
            "to-visitor" => arity(0).map(|_| Command::Transform(TransformDirection::ToVisitor))?,
            "to-composite" => arity(0).map(|_| Command::Transform(TransformDirection::ToComposite))?,
            "add-subtype" => {
                arity(2)?;
                Command::AddSubtype { name: words[1].into(), file: words[2].into() }
            }
            "add-operation" => {
                arity(3)?;
                let ret = parse_type(words[2]).map_err(|d| syntax(line, format!("bad type {}: {}", words[2], d.message)))?;
                Command::AddOperation { name: words[1].into(), ret, file: words[3].into() }
            }
            "edit-class" => {
                arity(2)?;
                Command::EditClass { name: words[1].into(), file: words[2].into() }
            }
            "assert-form" => {
                arity(1)?;
                match words[1] {
                    "data" => Command::AssertForm(StructureClass::DataOriented),
                    "function" => Command::AssertForm(StructureClass::FunctionOriented),
                    other => return Err(syntax(line, format!("unknown form {other}, expected data or function"))),
                }
            }
            other => return Err(syntax(line, format!("unknown command {other}"))),
        };
        steps.push(ScriptLine { line, text: trimmed.to_string(), command });
    }
    Ok(Scenario { steps })
}

fn form_of(p: &Program) -> StructureClass {
    match detect_hierarchy(p) {
        Ok(h) => classify(&coverage_matrix(p, &h)),
        Err(_) => StructureClass::Mixed(Vec::new()),
    }
}

enum Failure {
    Syntax(ScenarioError),
    Step(String),
}

fn members(base: &Path, file: &Path, class: &str) -> Result<Vec<Member>, Failure> {
    let path = base.join(file);
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Step(format!("cannot read {}: {e}", path.display())))?;
    parse_members(&text, class).map_err(|d| {
        let location = match d.span {
            Some(s) => format!("{}:{}:{}", path.display(), s.line, s.col),
            None => path.display().to_string(),
        };
        Failure::Syntax(ScenarioError::Syntax { location, message: d.message })
    })
}

fn lines<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join("\n")
}

fn run_step(p: &Program, cmd: &Command, base: &Path) -> Result<Program, Failure> {
    let evolve = |step: EvolutionStep| apply_evolution(p, &step).map_err(|d| Failure::Step(lines(&d)));
    match cmd {
        Command::Transform(d) => transform_program(p, *d).map_err(|e| Failure::Step(e.to_string())),
        Command::AddSubtype { name, file } => {
            evolve(EvolutionStep::AddSubtype { name: name.clone(), members: members(base, file, name)? })
        }
        Command::AddOperation { name, ret, file } => {
            let class = super::naming::visitor_class(name);
            evolve(EvolutionStep::AddOperation { name: name.clone(), ret: ret.clone(), members: members(base, file, &class)? })
        }
        Command::EditClass { name, file } => {
            evolve(EvolutionStep::EditClass { name: name.clone(), members: members(base, file, name)? })
        }
        Command::AssertForm(want) => {
            let got = form_of(p);
            if got == *want {
                Ok(p.clone())
            } else {
                Err(Failure::Step(format!("expected {want}, found {got}")))
            }
        }
    }
}

/// Runs every step against an in-memory copy of `p`. The first failure
/// stops the run; the caller's program is never touched.
pub fn run_scenario(s: &Scenario, base: &Path, p: &Program) -> Result<ScenarioRun, ScenarioError> {
    let mut current = p.clone();
    let mut log = Vec::with_capacity(s.steps.len());
    for (index, step) in s.steps.iter().enumerate() {
        let next = match run_step(&current, &step.command, base) {
            Ok(next) => next,
            Err(Failure::Syntax(e)) => return Err(e),
            Err(Failure::Step(message)) => {
                return Err(ScenarioError::Step { index, line: step.line, text: step.text.clone(), message, log })
            }
        };
        log.push(StepLog {
            index,
            line: step.line,
            text: step.text.clone(),
            form: form_of(&next),
            footprint: footprint(&current, &next),
        });
        current = next;
    }
    Ok(ScenarioRun { program: current, log })
}
