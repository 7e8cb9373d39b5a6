//! Elementary refactoring operations and the atomic plan executor.
//!
//! Every operation is a pure function from a [`Program`](crate::lang::Program)
//! to a new one, guarded by [`check_preconditions`]. [`apply_plan`] chains
//! them and either returns the final program or the violations of the first
//! failing step, never a partial result.

mod check;
mod op;
mod plan;
mod rewrite;
mod text;
mod walk;

pub use check::{check_preconditions, PreconditionViolation, Rule};
pub use op::{getter_name, BodyRewrite, MemberKind, MethodPath, ReceiverSwap, RefactoringOp, RenameTarget};
pub use plan::{apply_op, apply_plan, ApplyReport, Outcome, Plan, StepSummary};
pub use text::{parse_plan, plan_text, PlanParseError};

pub(crate) use rewrite::trivial_getter_field;

#[cfg(test)]
mod tests;
