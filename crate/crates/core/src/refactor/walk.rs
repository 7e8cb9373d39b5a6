//! Typed traversal and rewriting of method bodies.
//!
//! Rewrites are bottom-up: a rule sees the original node (so it can ask for
//! static types against the unmodified program) together with the node
//! rebuilt from already-rewritten children.

use crate::lang::{ClassDecl, Expr, MethodDecl, Program, Scope, Stmt, Symbols, Type};

/// Where an expression lives, with enough context to type it.
pub(crate) struct Site<'a, 'p> {
    pub syms: &'a Symbols<'p>,
    pub scope: &'a Scope,
}

impl Site<'_, '_> {
    pub fn type_of(&self, e: &Expr) -> Option<Type> {
        self.syms.type_of(self.scope, e)
    }

    pub fn class(&self) -> &str {
        &self.scope.class
    }

    /// Class name of the static type of `e`, if it is a named type.
    pub fn type_name(&self, e: &Expr) -> Option<String> {
        self.type_of(e).and_then(|t| t.class_name().map(str::to_string))
    }
}

/// Visits every expression node of every method body, pre-order.
pub(crate) fn visit_exprs(syms: &Symbols, f: &mut dyn FnMut(&Site, &Expr)) {
    for c in syms.program.classes() {
        for m in c.methods() {
            visit_method(syms, &c.name, m, f);
        }
    }
}

pub(crate) fn visit_method(syms: &Symbols, class: &str, m: &MethodDecl, f: &mut dyn FnMut(&Site, &Expr)) {
    let Some(body) = &m.body else { return };
    let mut scope = Scope::for_method(class, m);
    for s in body {
        {
            let site = Site { syms, scope: &scope };
            s.expr().walk(&mut |e| f(&site, e));
        }
        if let Stmt::Local(t, n, _) = s {
            scope.vars.push((n.clone(), t.clone()));
        }
    }
}

pub(crate) type Rule<'r> = dyn FnMut(&Site, &Expr, Expr) -> Expr + 'r;

pub(crate) fn rewrite_expr(site: &Site, e: &Expr, rule: &mut Rule) -> Expr {
    let rebuilt = match e {
        Expr::Field(t, f) => Expr::Field(Box::new(rewrite_expr(site, t, rule)), f.clone()),
        Expr::Call(t, m, args) => Expr::Call(
            Box::new(rewrite_expr(site, t, rule)),
            m.clone(),
            args.iter().map(|a| rewrite_expr(site, a, rule)).collect(),
        ),
        Expr::New(c, args) => Expr::New(c.clone(), args.iter().map(|a| rewrite_expr(site, a, rule)).collect()),
        Expr::Binary(op, l, r) => Expr::Binary(
            *op,
            Box::new(rewrite_expr(site, l, rule)),
            Box::new(rewrite_expr(site, r, rule)),
        ),
        Expr::ToStr(inner) => Expr::ToStr(Box::new(rewrite_expr(site, inner, rule))),
        leaf => leaf.clone(),
    };
    rule(site, e, rebuilt)
}

/// Rewrites the body of `m` typed as a member of `class`.
pub(crate) fn rewrite_body(syms: &Symbols, class: &str, m: &MethodDecl, rule: &mut Rule) -> Option<Vec<Stmt>> {
    let body = m.body.as_ref()?;
    let mut scope = Scope::for_method(class, m);
    let mut out = Vec::with_capacity(body.len());
    for s in body {
        let site = Site { syms, scope: &scope };
        let e = rewrite_expr(&site, s.expr(), rule);
        out.push(match s {
            Stmt::Return(_) => Stmt::Return(e),
            Stmt::Expr(_) => Stmt::Expr(e),
            Stmt::Local(t, n, _) => Stmt::Local(t.clone(), n.clone(), e),
        });
        if let Stmt::Local(t, n, _) = s {
            scope.vars.push((n.clone(), t.clone()));
        }
    }
    Some(out)
}

/// Applies `rule` to every method body of the program, optionally only inside
/// classes accepted by `only`.
pub(crate) fn rewrite_program(p: &Program, only: &dyn Fn(&ClassDecl) -> bool, rule: &mut Rule) -> Program {
    let syms = Symbols::new(p);
    let mut out = p.clone();
    for c in out.classes_mut() {
        let Some(orig) = syms.class(&c.name) else { continue };
        if !only(orig) {
            continue;
        }
        for m in c.methods_mut() {
            if let Some(om) = orig.method(&m.name) {
                if let Some(body) = rewrite_body(&syms, &orig.name, om, rule) {
                    m.body = Some(body);
                }
            }
        }
    }
    out
}

/// Whether a value of static class/interface `recv` may be an instance of
/// class `class` at runtime.
pub(crate) fn may_be_instance(syms: &Symbols, class: &str, recv: &str) -> bool {
    match syms.decl(recv) {
        Some(crate::lang::Decl::Class(_)) => syms.is_subclass(class, recv),
        Some(crate::lang::Decl::Interface(_)) => syms.interface_instance(class, recv).is_some(),
        None => false,
    }
}

/// Every type name mentioned by a declaration: signatures, fields, locals,
/// `new` expressions, supertypes.
pub(crate) fn referenced_types(d: &crate::lang::Decl) -> Vec<String> {
    use crate::lang::{Decl, Member};
    let mut out: Vec<String> = Vec::new();
    let push_ty = |t: &Type, out: &mut Vec<String>| t.visit_names(&mut |n| out.push(n.to_string()));
    match d {
        Decl::Interface(i) => {
            for s in &i.sigs {
                push_ty(&s.ret, &mut out);
                for p in &s.params {
                    push_ty(&p.ty, &mut out);
                }
            }
        }
        Decl::Class(c) => {
            if let Some(e) = &c.extends {
                out.push(e.clone());
            }
            if let Some(i) = &c.implements {
                push_ty(i, &mut out);
            }
            for m in &c.members {
                match m {
                    Member::Field(f) => push_ty(&f.ty, &mut out),
                    Member::Ctor(k) => k.params.iter().for_each(|p| push_ty(&p.ty, &mut out)),
                    Member::Method(md) => {
                        push_ty(&md.ret, &mut out);
                        md.params.iter().for_each(|p| push_ty(&p.ty, &mut out));
                        for s in md.body.iter().flatten() {
                            if let Stmt::Local(t, _, _) = s {
                                push_ty(t, &mut out);
                            }
                            s.expr().walk(&mut |e| {
                                if let Expr::New(n, _) = e {
                                    out.push(n.clone());
                                }
                            });
                        }
                    }
                }
            }
        }
    }
    out
}
