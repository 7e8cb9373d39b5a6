//! Name resolution and expression typing over a [`Program`].
//!
//! [`Symbols`] is a read-only index used both by the type checker and by the
//! refactoring operations, which need the static type of receivers.

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::diag::Diagnostic;

#[derive(Debug, Clone)]
pub struct MethodRef {
    /// Declaring class or interface.
    pub owner: String,
    pub vis: Visibility,
    pub is_abstract: bool,
    /// Signature with the receiver's interface type argument substituted.
    pub sig: MethodSig,
}

/// Typing context for one method (or constructor) body.
#[derive(Debug, Clone)]
pub struct Scope {
    pub class: String,
    pub method: String,
    pub vars: Vec<(String, Type)>,
}

impl Scope {
    pub fn for_method(class: &str, m: &MethodDecl) -> Scope {
        Scope {
            class: class.to_string(),
            method: m.name.clone(),
            vars: m.params.iter().map(|p| (p.name.clone(), p.ty.clone())).collect(),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn path(&self) -> String {
        if self.method.is_empty() {
            self.class.clone()
        } else {
            format!("{}.{}", self.class, self.method)
        }
    }
}

pub struct Symbols<'p> {
    pub program: &'p Program,
    decls: HashMap<&'p str, &'p Decl>,
}

impl<'p> Symbols<'p> {
    pub fn new(program: &'p Program) -> Symbols<'p> {
        let mut decls = HashMap::new();
        for d in &program.decls {
            decls.entry(d.name()).or_insert(d);
        }
        Symbols { program, decls }
    }

    pub fn decl(&self, name: &str) -> Option<&'p Decl> {
        self.decls.get(name).copied()
    }

    pub fn class(&self, name: &str) -> Option<&'p ClassDecl> {
        self.decl(name).and_then(Decl::as_class)
    }

    pub fn interface(&self, name: &str) -> Option<&'p InterfaceDecl> {
        self.decl(name).and_then(Decl::as_interface)
    }

    /// The class followed by its ancestors. Stops on cycles or unknown names.
    pub fn chain(&self, name: &str) -> Vec<&'p ClassDecl> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut cur = self.class(name);
        while let Some(c) = cur {
            if !seen.insert(c.name.as_str()) {
                break;
            }
            out.push(c);
            cur = c.extends.as_deref().and_then(|e| self.class(e));
        }
        out
    }

    pub fn has_cycle(&self, name: &str) -> bool {
        let mut seen = HashSet::new();
        let mut cur = self.class(name);
        while let Some(c) = cur {
            if !seen.insert(c.name.as_str()) {
                return true;
            }
            cur = c.extends.as_deref().and_then(|e| self.class(e));
        }
        false
    }

    /// `sub` equals `sup` or inherits from it.
    pub fn is_subclass(&self, sub: &str, sup: &str) -> bool {
        self.chain(sub).iter().any(|c| c.name == sup)
    }

    /// Classes that have `name` as a (transitive) ancestor, excluding itself.
    pub fn descendants(&self, name: &str) -> Vec<&'p ClassDecl> {
        self.program
            .classes()
            .filter(|c| c.name != name && self.is_subclass(&c.name, name))
            .collect()
    }

    /// The instantiation of interface `iface` implemented by `class` or one of
    /// its ancestors, e.g. `Visitor<int>`.
    pub fn interface_instance(&self, class: &str, iface: &str) -> Option<Type> {
        self.chain(class)
            .iter()
            .filter_map(|c| c.implements.as_ref())
            .find(|t| t.class_name() == Some(iface))
            .cloned()
    }

    /// All fields visible on instances of `class`, inherited ones first.
    pub fn all_fields(&self, class: &str) -> Vec<(&'p str, &'p FieldDecl)> {
        let mut out = Vec::new();
        for c in self.chain(class).into_iter().rev() {
            for f in c.fields() {
                out.push((c.name.as_str(), f));
            }
        }
        out
    }

    pub fn lookup_field(&self, class: &str, name: &str) -> Option<(&'p str, &'p FieldDecl)> {
        self.chain(class)
            .into_iter()
            .find_map(|c| c.field(name).map(|f| (c.name.as_str(), f)))
    }

    /// Most-derived method declaration named `name` in the class chain.
    pub fn class_method(&self, class: &str, name: &str) -> Option<(&'p ClassDecl, &'p MethodDecl)> {
        self.chain(class).into_iter().find_map(|c| c.method(name).map(|m| (c, m)))
    }

    /// Most-derived concrete implementation of `name` for runtime class `class`.
    pub fn concrete_method(&self, class: &str, name: &str) -> Option<(&'p ClassDecl, &'p MethodDecl)> {
        self.chain(class)
            .into_iter()
            .find_map(|c| c.method(name).filter(|m| m.body.is_some()).map(|m| (c, m)))
    }

    /// Resolves a method on a receiver of static type `recv`.
    pub fn lookup_method(&self, recv: &Type, name: &str) -> Option<MethodRef> {
        let Type::Named(tn, targ) = recv else { return None };
        match self.decl(tn)? {
            Decl::Interface(i) => {
                let sig = i.sigs.iter().find(|s| s.name == name)?;
                Some(MethodRef {
                    owner: i.name.clone(),
                    vis: Visibility::Public,
                    is_abstract: true,
                    sig: instantiate(sig, i.type_param.as_deref(), targ.as_deref()),
                })
            }
            Decl::Class(_) => {
                if let Some((c, m)) = self.class_method(tn, name) {
                    return Some(MethodRef {
                        owner: c.name.clone(),
                        vis: m.vis,
                        is_abstract: m.body.is_none(),
                        sig: m.sig(),
                    });
                }
                for c in self.chain(tn) {
                    if let Some(it) = &c.implements {
                        if let Some(r) = self.lookup_method(it, name) {
                            return Some(r);
                        }
                    }
                }
                None
            }
        }
    }

    /// Whether code in class `from` may access a member of `owner` with `vis`.
    pub fn accessible(&self, from: &str, owner: &str, vis: Visibility) -> bool {
        match vis {
            Visibility::Public | Visibility::Package => true,
            Visibility::Private => from == owner,
            Visibility::Protected => self.is_subclass(from, owner),
        }
    }

    pub fn type_exists(&self, t: &Type) -> bool {
        match t {
            Type::Named(n, arg) => match self.decl(n) {
                Some(Decl::Class(_)) => arg.is_none(),
                Some(Decl::Interface(i)) => {
                    i.type_param.is_some() == arg.is_some() && arg.as_deref().is_none_or(|a| self.type_exists(a))
                }
                None => false,
            },
            _ => true,
        }
    }

    pub fn is_assignable(&self, from: &Type, to: &Type) -> bool {
        if from == to {
            return true;
        }
        match (from, to) {
            (Type::Named(f, None), Type::Named(t, targ)) => match self.decl(t) {
                Some(Decl::Class(_)) => targ.is_none() && self.class(f).is_some() && self.is_subclass(f, t),
                Some(Decl::Interface(_)) => self.class(f).is_some() && self.interface_instance(f, t).as_ref() == Some(to),
                None => false,
            },
            _ => false,
        }
    }

    /// Static type of `e`, or `None` if it is ill-typed.
    pub fn type_of(&self, scope: &Scope, e: &Expr) -> Option<Type> {
        let mut sink = Vec::new();
        self.check_expr(scope, e, &mut sink)
    }

    /// Types `e`, pushing one diagnostic per independent error.
    pub fn check_expr(&self, scope: &Scope, e: &Expr, diags: &mut Vec<Diagnostic>) -> Option<Type> {
        match e {
            Expr::Int(_) => Some(Type::Int),
            Expr::Str(_) => Some(Type::Str),
            Expr::Bool(_) => Some(Type::Bool),
            Expr::This => Some(Type::named(scope.class.clone())),
            Expr::Var(v) => match scope.lookup(v) {
                Some(t) => Some(t.clone()),
                None => fail(diags, scope, format!("unknown variable {v}")),
            },
            Expr::Field(target, f) => {
                let tt = self.check_expr(scope, target, diags)?;
                let Some(cn) = tt.class_name().filter(|n| self.class(n).is_some()) else {
                    return fail(diags, scope, format!("field access .{f} on non-class type {tt}"));
                };
                match self.lookup_field(cn, f) {
                    None => fail(diags, scope, format!("class {cn} has no field {f}")),
                    Some((owner, fd)) if !self.accessible(&scope.class, owner, fd.vis) => {
                        fail(diags, scope, format!("field {owner}.{f} is {} and not accessible from {}", fd.vis, scope.class))
                    }
                    Some((_, fd)) => Some(fd.ty.clone()),
                }
            }
            Expr::Call(target, m, args) => {
                let tt = self.check_expr(scope, target, diags);
                let arg_tys: Vec<Option<Type>> = args.iter().map(|a| self.check_expr(scope, a, diags)).collect();
                let tt = tt?;
                if !matches!(tt, Type::Named(..)) {
                    return fail(diags, scope, format!("method call .{m}() on non-object type {tt}"));
                }
                let Some(mr) = self.lookup_method(&tt, m) else {
                    return fail(diags, scope, format!("type {tt} has no method {m}"));
                };
                if !self.accessible(&scope.class, &mr.owner, mr.vis) {
                    return fail(diags, scope, format!("method {}.{m} is {} and not accessible from {}", mr.owner, mr.vis, scope.class));
                }
                if mr.sig.params.len() != args.len() {
                    return fail(diags, scope, format!(
                        "method {}.{m} expects {} argument(s), found {}",
                        mr.owner,
                        mr.sig.params.len(),
                        args.len()
                    ));
                }
                let arg_tys: Vec<Type> = arg_tys.into_iter().collect::<Option<_>>()?;
                match self.instantiate_call(&mr.sig, &arg_tys) {
                    Ok(ret) => Some(ret),
                    Err(msg) => fail(diags, scope, format!("in call to {}.{m}: {msg}", mr.owner)),
                }
            }
            Expr::New(cn, args) => {
                let arg_tys: Vec<Option<Type>> = args.iter().map(|a| self.check_expr(scope, a, diags)).collect();
                let Some(c) = self.class(cn) else {
                    return fail(diags, scope, format!("unknown class {cn}"));
                };
                if c.is_abstract {
                    return fail(diags, scope, format!("cannot instantiate abstract class {cn}"));
                }
                let params: Vec<Param> = c.ctor().map(|k| k.params.clone()).unwrap_or_default();
                if let Some(k) = c.ctor() {
                    if !self.accessible(&scope.class, cn, k.vis) {
                        return fail(diags, scope, format!("constructor of {cn} is not accessible from {}", scope.class));
                    }
                }
                if params.len() != args.len() {
                    return fail(diags, scope, format!("constructor of {cn} expects {} argument(s), found {}", params.len(), args.len()));
                }
                let arg_tys: Vec<Type> = arg_tys.into_iter().collect::<Option<_>>()?;
                for (p, a) in params.iter().zip(&arg_tys) {
                    if !self.is_assignable(a, &p.ty) {
                        return fail(diags, scope, format!("constructor of {cn}: argument {} expects {}, found {a}", p.name, p.ty));
                    }
                }
                Some(Type::named(cn.clone()))
            }
            Expr::Binary(op, l, r) => {
                let lt = self.check_expr(scope, l, diags);
                let rt = self.check_expr(scope, r, diags);
                let (lt, rt) = (lt?, rt?);
                match op {
                    BinOp::Add => match (&lt, &rt) {
                        (Type::Int, Type::Int) => Some(Type::Int),
                        (Type::Str, Type::Str) => Some(Type::Str),
                        _ => fail(diags, scope, "operands of + must both be int or both be string"),
                    },
                    BinOp::Eq => match (&lt, &rt) {
                        (Type::Int, Type::Int) | (Type::Bool, Type::Bool) | (Type::Str, Type::Str) => Some(Type::Bool),
                        _ => fail(diags, scope, "operands of == must both be int, both be boolean or both be string"),
                    },
                    BinOp::Lt => match (&lt, &rt) {
                        (Type::Int, Type::Int) => Some(Type::Bool),
                        _ => fail(diags, scope, "operands of < must both be int"),
                    },
                }
            }
            Expr::ToStr(inner) => match self.check_expr(scope, inner, diags)? {
                Type::Int => Some(Type::Str),
                other => fail(diags, scope, format!("str expects an int argument, found {other}")),
            },
        }
    }

    /// Checks argument types against `sig`, inferring its method type
    /// variable, and returns the instantiated return type.
    pub fn instantiate_call(&self, sig: &MethodSig, args: &[Type]) -> Result<Type, String> {
        let mut binding: Option<Type> = None;
        let tvar = sig.type_param.as_deref();
        for (p, a) in sig.params.iter().zip(args) {
            match tvar {
                Some(v) if p.ty.mentions_var(v) => {
                    if !self.unify(&p.ty, a, v, &mut binding) {
                        return Err(format!("argument {} expects {}, found {a}", p.name, p.ty));
                    }
                }
                _ => {
                    if !self.is_assignable(a, &p.ty) {
                        return Err(format!("argument {} expects {}, found {a}", p.name, p.ty));
                    }
                }
            }
        }
        match (tvar, binding) {
            (Some(v), Some(b)) => Ok(sig.ret.subst(v, &b)),
            (Some(v), None) if sig.ret.mentions_var(v) => Err(format!("cannot infer type argument {v}")),
            _ => Ok(sig.ret.clone()),
        }
    }

    fn unify(&self, param: &Type, arg: &Type, var: &str, binding: &mut Option<Type>) -> bool {
        match param {
            Type::Var(v) if v == var => match binding {
                Some(b) => b == arg,
                None => {
                    *binding = Some(arg.clone());
                    true
                }
            },
            Type::Named(pn, Some(pa)) => {
                let inst = match arg {
                    Type::Named(an, _) if an == pn => Some(arg.clone()),
                    Type::Named(an, None) if self.class(an).is_some() => self.interface_instance(an, pn),
                    _ => None,
                };
                match inst {
                    Some(Type::Named(_, Some(aa))) => self.unify(pa, &aa, var, binding),
                    _ => false,
                }
            }
            other => self.is_assignable(arg, other),
        }
    }
}

/// Substitutes the interface type argument into `sig` and freshens its own
/// type variable to avoid capture.
fn instantiate(sig: &MethodSig, iface_param: Option<&str>, arg: Option<&Type>) -> MethodSig {
    let mut out = sig.clone();
    if let Some(tv) = sig.type_param.as_deref() {
        let fresh = Type::Var(format!("{tv}'"));
        out.ret = out.ret.subst(tv, &fresh);
        for p in &mut out.params {
            p.ty = p.ty.subst(tv, &fresh);
        }
        out.type_param = Some(format!("{tv}'"));
    }
    if let (Some(ip), Some(a)) = (iface_param, arg) {
        out.ret = out.ret.subst(ip, a);
        for p in &mut out.params {
            p.ty = p.ty.subst(ip, a);
        }
    }
    out
}

fn fail(diags: &mut Vec<Diagnostic>, scope: &Scope, msg: impl Into<String>) -> Option<Type> {
    diags.push(Diagnostic::error(scope.path(), msg));
    None
}
