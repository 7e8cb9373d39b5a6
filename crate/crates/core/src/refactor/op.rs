use std::fmt;

use crate::lang::{MethodDecl, MethodSig, Stmt, Type, Visibility};

/// `Class.method`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodPath {
    pub class: String,
    pub method: String,
}

impl MethodPath {
    pub fn new(class: impl Into<String>, method: impl Into<String>) -> MethodPath {
        MethodPath { class: class.into(), method: method.into() }
    }
}

impl fmt::Display for MethodPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.class, self.method)
    }
}

/// How the receiver changes when a body moves between a subtype and a
/// visitor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ReceiverSwap {
    /// `this` in the source becomes the named parameter of the target.
    ThisToParam(String),
    /// The named parameter of the source becomes `this` in the target.
    ParamToThis(String),
}

/// Receiver rewrite applied to a moved body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BodyRewrite {
    pub receiver: ReceiverSwap,
    /// `(field, getter)`: with `ThisToParam`, `this.field` becomes
    /// `p.getter()`; with `ParamToThis`, `p.getter()` becomes `this.field`.
    /// Fields without an entry are accessed directly.
    pub getters: Vec<(String, String)>,
    /// `(root, operation)`: recursive calls `e.operation()` on receivers typed
    /// at or below `root` become `e.accept(this)`, or back.
    pub recursion: Option<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemberKind {
    Field,
    Ctor,
    Method,
}

impl MemberKind {
    pub fn keyword(self) -> &'static str {
        match self {
            MemberKind::Field => "field",
            MemberKind::Ctor => "ctor",
            MemberKind::Method => "method",
        }
    }

    pub fn parse(s: &str) -> Option<MemberKind> {
        match s {
            "field" => Some(MemberKind::Field),
            "ctor" => Some(MemberKind::Ctor),
            "method" => Some(MemberKind::Method),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RenameTarget {
    Type(String),
    /// Renames the whole override family the method belongs to.
    Method(MethodPath),
    Field { class: String, field: String },
}

impl RenameTarget {
    pub fn old_name(&self) -> &str {
        match self {
            RenameTarget::Type(n) => n,
            RenameTarget::Method(m) => &m.method,
            RenameTarget::Field { field, .. } => field,
        }
    }
}

/// One elementary, precondition-guarded rewrite.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RefactoringOp {
    CreateClass { name: String, is_abstract: bool, extends: Option<String>, implements: Option<Type> },
    CreateInterface { name: String, type_param: Option<String> },
    AddMethod { class: String, method: MethodDecl },
    /// On an interface, appends the signature. On an abstract class, turns an
    /// existing concrete method with the same signature into an abstract one
    /// (all concrete descendants must override it), or appends a new
    /// abstract method.
    AddAbstractMethod { owner: String, vis: Visibility, sig: MethodSig },
    DeleteMethod { class: String, method: String },
    /// The target receives the rewritten body and the source's comment; the
    /// source is left delegating to the target.
    MoveMethodBody { from: MethodPath, to: MethodPath, rewrite: BodyRewrite },
    /// `e.method(args)` becomes `e.replacement(args)` wherever `e` may be an
    /// instance of `receiver`, optionally only inside class `scope`.
    RewriteCalls { receiver: String, method: String, replacement: String, scope: Option<String> },
    EncapsulateField { class: String, field: String },
    InlineTrivialGetter { class: String, getter: String },
    ChangeVisibility { class: String, kind: MemberKind, member: String, vis: Visibility },
    RenameDeclaration { target: RenameTarget, new_name: String },
    /// Gives an existing abstract method a delegating body.
    AddDelegatingMethod { class: String, method: String, body: Vec<Stmt> },
    /// Removes an unreferenced class or interface.
    DeleteDeclaration { name: String },
}

impl RefactoringOp {
    /// Variant name, as used in plan text and violation reports.
    pub fn label(&self) -> &'static str {
        match self {
            RefactoringOp::CreateClass { .. } => "CreateClass",
            RefactoringOp::CreateInterface { .. } => "CreateInterface",
            RefactoringOp::AddMethod { .. } => "AddMethod",
            RefactoringOp::AddAbstractMethod { .. } => "AddAbstractMethod",
            RefactoringOp::DeleteMethod { .. } => "DeleteMethod",
            RefactoringOp::MoveMethodBody { .. } => "MoveMethodBody",
            RefactoringOp::RewriteCalls { .. } => "RewriteCalls",
            RefactoringOp::EncapsulateField { .. } => "EncapsulateField",
            RefactoringOp::InlineTrivialGetter { .. } => "InlineTrivialGetter",
            RefactoringOp::ChangeVisibility { .. } => "ChangeVisibility",
            RefactoringOp::RenameDeclaration { .. } => "RenameDeclaration",
            RefactoringOp::AddDelegatingMethod { .. } => "AddDelegatingMethod",
            RefactoringOp::DeleteDeclaration { .. } => "DeleteDeclaration",
        }
    }
}

impl fmt::Display for RefactoringOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::op_line(self))
    }
}

/// Getter name for a field: `value` → `getValue`.
pub fn getter_name(field: &str) -> String {
    let mut cs = field.chars();
    match cs.next() {
        Some(c) => format!("get{}{}", c.to_uppercase(), cs.as_str()),
        None => "get".to_string(),
    }
}
