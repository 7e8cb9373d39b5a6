//! The MiniObj object language: syntax, canonical printing, resolution and
//! type checking.

pub mod ast;
pub mod diag;
mod lexer;
pub mod parser;
pub mod pretty;
pub mod resolve;
pub mod typeck;

pub use ast::*;
pub use diag::{Diagnostic, Severity, Span};
pub use parser::{parse, parse_expr, parse_members, parse_method, parse_named, parse_sig, parse_sig_with, parse_stmts, parse_type};
pub use pretty::{canonicalize, pretty};
pub use resolve::{Scope, Symbols};
pub use typeck::typecheck;
