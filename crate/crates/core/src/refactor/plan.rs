use crate::lang::{typecheck, Program};

use super::check::{check_preconditions, PreconditionViolation, Rule};
use super::op::RefactoringOp;
use super::rewrite::apply_unchecked;

/// An ordered chain of operations executed atomically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan {
    pub label: String,
    pub steps: Vec<RefactoringOp>,
}

impl Plan {
    pub fn new(label: impl Into<String>) -> Plan {
        Plan { label: label.into(), steps: Vec::new() }
    }

    pub fn push(&mut self, op: RefactoringOp) {
        self.steps.push(op);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepSummary {
    pub index: usize,
    pub op: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success(Program),
    Failure(Vec<PreconditionViolation>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplyReport {
    pub outcome: Outcome,
    pub steps_executed: usize,
    /// One entry per executed step.
    pub steps: Vec<StepSummary>,
}

impl ApplyReport {
    pub fn program(&self) -> Option<&Program> {
        match &self.outcome {
            Outcome::Success(p) => Some(p),
            Outcome::Failure(_) => None,
        }
    }

    pub fn into_program(self) -> Result<Program, Vec<PreconditionViolation>> {
        match self.outcome {
            Outcome::Success(p) => Ok(p),
            Outcome::Failure(v) => Err(v),
        }
    }

    pub fn violations(&self) -> &[PreconditionViolation] {
        match &self.outcome {
            Outcome::Success(_) => &[],
            Outcome::Failure(v) => v,
        }
    }
}

/// Checks then applies one operation. The input is never modified.
pub fn apply_op(op: &RefactoringOp, p: &Program) -> Result<Program, Vec<PreconditionViolation>> {
    let violations = check_preconditions(op, p);
    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(apply_unchecked(op, p))
}

/// Runs every step against the intermediate program. Stops at the first step
/// with violations and reports all of that step's violations. A successful
/// result must type-check.
pub fn apply_plan(plan: &Plan, p: &Program) -> ApplyReport {
    let mut current = p.clone();
    let mut steps = Vec::with_capacity(plan.steps.len());
    for (i, op) in plan.steps.iter().enumerate() {
        match apply_op(op, &current) {
            Ok(next) => {
                current = next;
                steps.push(StepSummary { index: i, op: op.label(), detail: op.to_string() });
            }
            Err(mut vs) => {
                for v in &mut vs {
                    v.step = i;
                }
                return ApplyReport { outcome: Outcome::Failure(vs), steps_executed: i, steps };
            }
        }
    }
    let errors: Vec<PreconditionViolation> = typecheck(&current)
        .into_iter()
        .filter(|d| d.is_error())
        .map(|d| PreconditionViolation {
            step: plan.steps.len(),
            op: "endpoint".to_string(),
            rule: Rule::EndpointTypeSafety,
            location: d.path.clone(),
            message: d.message,
        })
        .collect();
    let executed = plan.steps.len();
    if errors.is_empty() {
        ApplyReport { outcome: Outcome::Success(current), steps_executed: executed, steps }
    } else {
        ApplyReport { outcome: Outcome::Failure(errors), steps_executed: executed, steps }
    }
}
