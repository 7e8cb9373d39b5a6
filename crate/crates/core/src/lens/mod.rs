//! Structure detection: which class is the hierarchy root, which are the
//! subtypes and operations, and who owns the business code of each
//! (subtype, operation) pair.

mod coverage;
mod detect;

pub use coverage::{classify, coverage_matrix, explain, is_delegating, matrix_csv, render_matrix, CoverageMatrix, StructureClass};
pub use detect::{detect_hierarchy, facade_target, operation_for_visitor, HierarchyInfo, Operation};
