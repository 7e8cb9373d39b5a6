//! Abstract syntax of MiniObj.
//!
//! Nodes carry no source spans so that structural equality is exactly the
//! equality the round-trip contracts talk about. Leading `//` comments are
//! kept as raw line text (everything after the `//`).

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    Str,
    Void,
    /// Class or interface name, with the single optional type argument.
    Named(String, Option<Box<Type>>),
    /// A type variable in scope (interface parameter or method parameter).
    Var(String),
}

impl Type {
    pub fn named(name: impl Into<String>) -> Type {
        Type::Named(name.into(), None)
    }

    pub fn generic(name: impl Into<String>, arg: Type) -> Type {
        Type::Named(name.into(), Some(Box::new(arg)))
    }

    pub fn class_name(&self) -> Option<&str> {
        match self {
            Type::Named(n, _) => Some(n),
            _ => None,
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, Type::Int | Type::Bool | Type::Str | Type::Void)
    }

    /// Replaces type variable `var` with `with` everywhere.
    pub fn subst(&self, var: &str, with: &Type) -> Type {
        match self {
            Type::Var(v) if v == var => with.clone(),
            Type::Named(n, Some(a)) => Type::generic(n.clone(), a.subst(var, with)),
            other => other.clone(),
        }
    }

    pub fn mentions_var(&self, var: &str) -> bool {
        match self {
            Type::Var(v) => v == var,
            Type::Named(_, Some(a)) => a.mentions_var(var),
            _ => false,
        }
    }

    pub(crate) fn visit_names(&self, f: &mut dyn FnMut(&str)) {
        if let Type::Named(n, a) = self {
            f(n);
            if let Some(a) = a {
                a.visit_names(f);
            }
        }
    }

    pub(crate) fn rename_named(&mut self, from: &str, to: &str) {
        if let Type::Named(n, a) = self {
            if n == from {
                *n = to.to_string();
            }
            if let Some(a) = a {
                a.rename_named(from, to);
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("boolean"),
            Type::Str => f.write_str("string"),
            Type::Void => f.write_str("void"),
            Type::Named(n, None) => f.write_str(n),
            Type::Named(n, Some(a)) => write!(f, "{n}<{a}>"),
            Type::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Visibility {
    Public,
    Protected,
    Private,
    /// No modifier.
    Package,
}

impl Visibility {
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            Visibility::Public => Some("public"),
            Visibility::Protected => Some("protected"),
            Visibility::Private => Some("private"),
            Visibility::Package => None,
        }
    }

    pub fn parse(s: &str) -> Option<Visibility> {
        match s {
            "public" => Some(Visibility::Public),
            "protected" => Some(Visibility::Protected),
            "private" => Some(Visibility::Private),
            "package" => Some(Visibility::Package),
            _ => None,
        }
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword().unwrap_or("package"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Eq,
    Lt,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Eq => "==",
            BinOp::Lt => "<",
        }
    }

    /// Binding strength; higher binds tighter. All operators are left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Eq => 1,
            BinOp::Lt => 2,
            BinOp::Add => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Str(String),
    Bool(bool),
    Var(String),
    This,
    Field(Box<Expr>, String),
    Call(Box<Expr>, String, Vec<Expr>),
    New(String, Vec<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Builtin `str(e)`: int to text.
    ToStr(Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn field(target: Expr, name: impl Into<String>) -> Expr {
        Expr::Field(Box::new(target), name.into())
    }

    pub fn call(target: Expr, method: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Call(Box::new(target), method.into(), args)
    }

    pub fn new_obj(class: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::New(class.into(), args)
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Field(t, _) | Expr::ToStr(t) => t.walk(f),
            Expr::Call(t, _, args) => {
                t.walk(f);
                args.iter().for_each(|a| a.walk(f));
            }
            Expr::New(_, args) => args.iter().for_each(|a| a.walk(f)),
            Expr::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::Int(_) | Expr::Str(_) | Expr::Bool(_) | Expr::Var(_) | Expr::This => {}
        }
    }

    pub fn depth(&self) -> usize {
        let child = match self {
            Expr::Field(t, _) | Expr::ToStr(t) => t.depth(),
            Expr::Call(t, _, args) => args.iter().map(Expr::depth).chain([t.depth()]).max().unwrap_or(0),
            Expr::New(_, args) => args.iter().map(Expr::depth).max().unwrap_or(0),
            Expr::Binary(_, l, r) => l.depth().max(r.depth()),
            _ => 0,
        };
        child + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Return(Expr),
    Local(Type, String, Expr),
    Expr(Expr),
}

impl Stmt {
    pub fn expr(&self) -> &Expr {
        match self {
            Stmt::Return(e) | Stmt::Local(_, _, e) | Stmt::Expr(e) => e,
        }
    }

    pub fn expr_mut(&mut self) -> &mut Expr {
        match self {
            Stmt::Return(e) | Stmt::Local(_, _, e) | Stmt::Expr(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub ty: Type,
    pub name: String,
}

impl Param {
    pub fn new(ty: Type, name: impl Into<String>) -> Param {
        Param { ty, name: name.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDecl {
    pub comment: Vec<String>,
    pub vis: Visibility,
    pub ty: Type,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CtorDecl {
    pub comment: Vec<String>,
    pub vis: Visibility,
    pub name: String,
    pub params: Vec<Param>,
    /// `this.field = param;` assignments in order, as (field, param).
    pub assigns: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodDecl {
    pub comment: Vec<String>,
    pub vis: Visibility,
    pub is_abstract: bool,
    pub type_param: Option<String>,
    pub ret: Type,
    pub name: String,
    pub params: Vec<Param>,
    /// `None` for abstract methods.
    pub body: Option<Vec<Stmt>>,
}

impl MethodDecl {
    pub fn sig(&self) -> MethodSig {
        MethodSig {
            comment: Vec::new(),
            type_param: self.type_param.clone(),
            ret: self.ret.clone(),
            name: self.name.clone(),
            params: self.params.clone(),
        }
    }
}

/// Interface method signature (implicitly public and abstract).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodSig {
    pub comment: Vec<String>,
    pub type_param: Option<String>,
    pub ret: Type,
    pub name: String,
    pub params: Vec<Param>,
}

impl MethodSig {
    /// Signature equality up to renaming of the method type variable and
    /// parameter names.
    pub fn same_shape(&self, other: &MethodSig) -> bool {
        if self.name != other.name
            || self.params.len() != other.params.len()
            || self.type_param.is_some() != other.type_param.is_some()
        {
            return false;
        }
        let norm = |t: &Type, tp: &Option<String>| match tp {
            Some(v) => t.subst(v, &Type::Var("$0".into())),
            None => t.clone(),
        };
        norm(&self.ret, &self.type_param) == norm(&other.ret, &other.type_param)
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(a, b)| norm(&a.ty, &self.type_param) == norm(&b.ty, &other.type_param))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Member {
    Field(FieldDecl),
    Ctor(CtorDecl),
    Method(MethodDecl),
}

impl Member {
    pub fn name(&self) -> &str {
        match self {
            Member::Field(f) => &f.name,
            Member::Ctor(c) => &c.name,
            Member::Method(m) => &m.name,
        }
    }

    pub fn comment(&self) -> &[String] {
        match self {
            Member::Field(f) => &f.comment,
            Member::Ctor(c) => &c.comment,
            Member::Method(m) => &m.comment,
        }
    }

    /// 0 for fields, 1 for constructors, 2 for methods.
    pub fn group(&self) -> u8 {
        match self {
            Member::Field(_) => 0,
            Member::Ctor(_) => 1,
            Member::Method(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDecl {
    pub comment: Vec<String>,
    pub name: String,
    pub is_abstract: bool,
    pub extends: Option<String>,
    pub implements: Option<Type>,
    pub members: Vec<Member>,
}

impl ClassDecl {
    pub fn new(name: impl Into<String>) -> ClassDecl {
        ClassDecl {
            comment: Vec::new(),
            name: name.into(),
            is_abstract: false,
            extends: None,
            implements: None,
            members: Vec::new(),
        }
    }

    pub fn fields(&self) -> impl Iterator<Item = &FieldDecl> {
        self.members.iter().filter_map(|m| match m {
            Member::Field(f) => Some(f),
            _ => None,
        })
    }

    pub fn ctor(&self) -> Option<&CtorDecl> {
        self.members.iter().find_map(|m| match m {
            Member::Ctor(c) => Some(c),
            _ => None,
        })
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodDecl> {
        self.members.iter().filter_map(|m| match m {
            Member::Method(d) => Some(d),
            _ => None,
        })
    }

    pub fn methods_mut(&mut self) -> impl Iterator<Item = &mut MethodDecl> {
        self.members.iter_mut().filter_map(|m| match m {
            Member::Method(d) => Some(d),
            _ => None,
        })
    }

    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods().find(|m| m.name == name)
    }

    pub fn method_mut(&mut self, name: &str) -> Option<&mut MethodDecl> {
        self.methods_mut().find(|m| m.name == name)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields().find(|f| f.name == name)
    }

    pub fn remove_method(&mut self, name: &str) -> Option<MethodDecl> {
        let idx = self
            .members
            .iter()
            .position(|m| matches!(m, Member::Method(d) if d.name == name))?;
        match self.members.remove(idx) {
            Member::Method(d) => Some(d),
            _ => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InterfaceDecl {
    pub comment: Vec<String>,
    pub name: String,
    pub type_param: Option<String>,
    pub sigs: Vec<MethodSig>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Decl {
    Class(ClassDecl),
    Interface(InterfaceDecl),
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Class(c) => &c.name,
            Decl::Interface(i) => &i.name,
        }
    }

    pub fn comment(&self) -> &[String] {
        match self {
            Decl::Class(c) => &c.comment,
            Decl::Interface(i) => &i.comment,
        }
    }

    pub fn as_class(&self) -> Option<&ClassDecl> {
        match self {
            Decl::Class(c) => Some(c),
            Decl::Interface(_) => None,
        }
    }

    pub fn as_interface(&self) -> Option<&InterfaceDecl> {
        match self {
            Decl::Interface(i) => Some(i),
            Decl::Class(_) => None,
        }
    }
}

/// A MiniObj program: an ordered list of declarations.
///
/// Equality ignores `source_name`.
#[derive(Debug, Clone, Default, Eq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub source_name: String,
}

impl PartialEq for Program {
    fn eq(&self, other: &Program) -> bool {
        self.decls == other.decls
    }
}

impl Program {
    pub fn new(decls: Vec<Decl>) -> Program {
        Program { decls, source_name: String::new() }
    }

    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name() == name)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.decl(name).and_then(Decl::as_class)
    }

    pub fn class_mut(&mut self, name: &str) -> Option<&mut ClassDecl> {
        self.decls.iter_mut().find_map(|d| match d {
            Decl::Class(c) if c.name == name => Some(c),
            _ => None,
        })
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        self.decl(name).and_then(Decl::as_interface)
    }

    pub fn interface_mut(&mut self, name: &str) -> Option<&mut InterfaceDecl> {
        self.decls.iter_mut().find_map(|d| match d {
            Decl::Interface(i) if i.name == name => Some(i),
            _ => None,
        })
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.decls.iter().filter_map(Decl::as_class)
    }

    pub fn classes_mut(&mut self) -> impl Iterator<Item = &mut ClassDecl> {
        self.decls.iter_mut().filter_map(|d| match d {
            Decl::Class(c) => Some(c),
            _ => None,
        })
    }

    /// Every leading comment in the program, in traversal order.
    pub fn comments(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        let mut push = |c: &[String]| {
            if !c.is_empty() {
                out.push(c.to_vec());
            }
        };
        for d in &self.decls {
            push(d.comment());
            match d {
                Decl::Class(c) => c.members.iter().for_each(|m| push(m.comment())),
                Decl::Interface(i) => i.sigs.iter().for_each(|s| push(&s.comment)),
            }
        }
        out
    }
}

pub const KEYWORDS: &[&str] = &[
    "class",
    "abstract",
    "extends",
    "implements",
    "interface",
    "public",
    "private",
    "protected",
    "return",
    "new",
    "this",
    "true",
    "false",
    "int",
    "boolean",
    "string",
    "void",
    "str",
];

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
}
