//! Whole-structure transformations between the data-oriented (Composite)
//! and function-oriented (Visitor) forms, the round-trip check, modular
//! evolutions and scenario scripts that chain them.

mod evolve;
pub mod naming;
mod planner;
mod scenario;

use std::fmt;
use std::time::{Duration, Instant};

use crate::lang::{canonicalize, pretty, Diagnostic, Program};
use crate::lens::{classify, coverage_matrix, detect_hierarchy, StructureClass};
use crate::refactor::{apply_plan, ApplyReport, Outcome, Plan, PreconditionViolation};

pub use evolve::{apply_evolution, footprint, EvolutionStep, Footprint};
pub use planner::{plan_to_composite, plan_to_visitor};
pub use scenario::{parse_script, run_scenario, Command, Scenario, ScenarioError, ScenarioRun, ScriptLine, StepLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformDirection {
    ToVisitor,
    ToComposite,
}

impl TransformDirection {
    pub fn target(self) -> StructureClass {
        match self {
            TransformDirection::ToVisitor => StructureClass::FunctionOriented,
            TransformDirection::ToComposite => StructureClass::DataOriented,
        }
    }

    pub fn inverse(self) -> TransformDirection {
        match self {
            TransformDirection::ToVisitor => TransformDirection::ToComposite,
            TransformDirection::ToComposite => TransformDirection::ToVisitor,
        }
    }

    pub fn plan(self, p: &Program) -> Result<Plan, Vec<Diagnostic>> {
        match self {
            TransformDirection::ToVisitor => plan_to_visitor(p),
            TransformDirection::ToComposite => plan_to_composite(p),
        }
    }
}

impl fmt::Display for TransformDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformDirection::ToVisitor => "to-visitor",
            TransformDirection::ToComposite => "to-composite",
        })
    }
}

fn lines<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("{}", lines(.0))]
    Planner(Vec<Diagnostic>),
    #[error("{}", lines(.0))]
    Kernel(Vec<PreconditionViolation>),
    /// A successful plan produced something the engine promises never to.
    #[error("invariant breach: {0}")]
    Breach(String),
}

/// Plans and applies `d`. On success the report holds the program, which
/// type-checks and classifies as the direction's target form.
pub fn transform(p: &Program, d: TransformDirection) -> Result<ApplyReport, TransformError> {
    let plan = d.plan(p).map_err(TransformError::Planner)?;
    let report = apply_plan(&plan, p);
    let out = match &report.outcome {
        Outcome::Success(out) => out,
        Outcome::Failure(v) => return Err(TransformError::Kernel(v.clone())),
    };
    let class = detect_hierarchy(out)
        .map(|h| classify(&coverage_matrix(out, &h)))
        .map_err(|ds| TransformError::Breach(format!("{d} output has no detectable hierarchy: {}", lines(&ds))))?;
    if class != d.target() {
        return Err(TransformError::Breach(format!("{d} output classifies as {class}, expected {}", d.target())));
    }
    Ok(report)
}

/// Convenience wrapper returning only the transformed program.
pub fn transform_program(p: &Program, d: TransformDirection) -> Result<Program, TransformError> {
    transform(p, d).map(|r| r.into_program().expect("transform only returns successful reports"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTripReport {
    /// The direction applied first; its inverse ran second.
    pub first: TransformDirection,
    pub identical: bool,
    /// Unified diff of canonical text, present iff not identical.
    pub diff: Option<String>,
    pub elapsed: Duration,
}

impl fmt::Display for RoundTripReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let second = self.first.inverse();
        match &self.diff {
            None => writeln!(f, "identical after {} then {second}", self.first),
            Some(d) => {
                writeln!(f, "differs after {} then {second}", self.first)?;
                f.write_str(d)
            }
        }
    }
}

/// Which direction applies to `p`, from its classification.
pub fn direction_for(p: &Program) -> Result<TransformDirection, TransformError> {
    let h = detect_hierarchy(p).map_err(TransformError::Planner)?;
    match classify(&coverage_matrix(p, &h)) {
        StructureClass::DataOriented => Ok(TransformDirection::ToVisitor),
        StructureClass::FunctionOriented => Ok(TransformDirection::ToComposite),
        mixed @ StructureClass::Mixed(_) => Err(TransformError::Planner(vec![Diagnostic::error(
            "",
            format!("program is neither data- nor function-oriented: {mixed}"),
        )])),
    }
}

/// Transforms `p` into the other form and back, then compares canonical
/// text with the canonicalized input.
pub fn roundtrip_check(p: &Program) -> Result<RoundTripReport, TransformError> {
    let start = Instant::now();
    let first = direction_for(p)?;
    let there = transform_program(p, first)?;
    let back = transform_program(&there, first.inverse())?;
    let before = pretty(&canonicalize(p));
    let after = pretty(&back);
    let diff = (before != after).then(|| {
        similar::TextDiff::from_lines(&before, &after).unified_diff().context_radius(3).header("input", "round-trip").to_string()
    });
    Ok(RoundTripReport { first, identical: diff.is_none(), diff, elapsed: start.elapsed() })
}

#[cfg(test)]
mod tests;
