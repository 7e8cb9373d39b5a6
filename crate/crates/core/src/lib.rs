//! Invertible restructuring between the Composite/Interpreter and Visitor
//! decompositions of programs written in MiniObj, a small class-based
//! language.
//!
//! The crate is organized bottom-up:
//!
//! - [`lang`]: syntax, canonical printer, name resolution, type checker.
//! - [`interp`]: reference interpreter used as the behavior oracle.
//! - [`refactor`]: precondition-guarded elementary rewrites and the atomic
//!   plan executor.
//! - [`lens`]: hierarchy detection, coverage matrix, structure classification.
//! - [`duality`]: plan generation in both directions, round-trip checks,
//!   evolutions and scenario scripts.
//! - [`gen`]: seeded generators for object trees and whole programs.
//! - [`cli`]: command implementations behind the `dualshift` binary.

pub mod lang;
pub mod interp;
pub mod refactor;
pub mod lens;
pub mod duality;
pub mod gen;
pub mod cli;
