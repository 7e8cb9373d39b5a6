use std::collections::HashSet;

use super::ast::*;
use super::diag::Diagnostic;
use super::resolve::{Scope, Symbols};

/// Type-checks a whole program. Never stops at the first error: every
/// independent problem yields one diagnostic.
pub fn typecheck(p: &Program) -> Vec<Diagnostic> {
    let syms = Symbols::new(p);
    let mut diags = Vec::new();
    for d in &p.decls {
        match d {
            Decl::Class(c) => check_class(&syms, c, &mut diags),
            Decl::Interface(i) => check_interface(&syms, i, &mut diags),
        }
    }
    diags
}

fn check_type(syms: &Symbols, t: &Type, path: &str, diags: &mut Vec<Diagnostic>) -> bool {
    if syms.type_exists(t) {
        return true;
    }
    let msg = match t {
        Type::Named(n, _) if syms.decl(n).is_none() => format!("unknown type {n}"),
        _ => format!("malformed type {t}"),
    };
    diags.push(Diagnostic::error(path, msg));
    false
}

fn check_interface(syms: &Symbols, i: &InterfaceDecl, diags: &mut Vec<Diagnostic>) {
    let mut names = HashSet::new();
    for s in &i.sigs {
        let path = format!("{}.{}", i.name, s.name);
        if !names.insert(&s.name) {
            diags.push(Diagnostic::error(&path, format!("duplicate method {} in interface {}", s.name, i.name)));
        }
        check_type(syms, &s.ret, &path, diags);
        for p in &s.params {
            check_type(syms, &p.ty, &path, diags);
            if let Some(tp) = &i.type_param {
                if p.ty.mentions_var(tp) {
                    diags.push(Diagnostic::error(
                        &path,
                        format!("interface type parameter {tp} may only appear in return position"),
                    ));
                }
            }
        }
    }
}

fn check_class(syms: &Symbols, c: &ClassDecl, diags: &mut Vec<Diagnostic>) {
    let cn = c.name.as_str();
    if let Some(e) = &c.extends {
        match syms.decl(e) {
            Some(Decl::Class(_)) => {
                if syms.has_cycle(cn) {
                    diags.push(Diagnostic::error(cn, format!("inheritance cycle through {cn}")));
                }
            }
            Some(Decl::Interface(_)) => diags.push(Diagnostic::error(cn, format!("{cn} cannot extend interface {e}"))),
            None => diags.push(Diagnostic::error(cn, format!("unknown superclass {e}"))),
        }
    }
    if let Some(it) = &c.implements {
        match it.class_name().and_then(|n| syms.decl(n)) {
            Some(Decl::Interface(_)) => {
                check_type(syms, it, cn, diags);
            }
            Some(Decl::Class(_)) => diags.push(Diagnostic::error(cn, format!("{cn} cannot implement class {it}"))),
            None => diags.push(Diagnostic::error(cn, format!("unknown interface {it}"))),
        }
    }

    let mut field_names = HashSet::new();
    let mut method_names = HashSet::new();
    let mut ctors = 0;
    for m in &c.members {
        match m {
            Member::Field(f) => {
                let path = format!("{cn}.{}", f.name);
                if !field_names.insert(f.name.as_str()) {
                    diags.push(Diagnostic::error(&path, format!("duplicate field {}", f.name)));
                }
                if f.ty == Type::Void {
                    diags.push(Diagnostic::error(&path, "fields cannot have type void"));
                }
                check_type(syms, &f.ty, &path, diags);
            }
            Member::Ctor(k) => {
                ctors += 1;
                if ctors == 2 {
                    diags.push(Diagnostic::error(cn, format!("class {cn} declares more than one constructor")));
                }
                check_ctor(syms, c, k, diags);
            }
            Member::Method(md) => {
                if !method_names.insert(md.name.as_str()) {
                    diags.push(Diagnostic::error(
                        format!("{cn}.{}", md.name),
                        format!("duplicate method {} (overloading is not supported)", md.name),
                    ));
                }
                check_method(syms, c, md, diags);
            }
        }
    }
    for (owner, f) in syms.all_fields(cn) {
        if owner != cn && field_names.contains(f.name.as_str()) {
            diags.push(Diagnostic::error(
                format!("{cn}.{}", f.name),
                format!("field {} hides field inherited from {owner}", f.name),
            ));
        }
    }

    if !c.is_abstract {
        if c.ctor().is_none() && !syms.all_fields(cn).is_empty() {
            diags.push(Diagnostic::error(cn, format!("class {cn} has fields but no constructor")));
        }
        for missing in unimplemented_abstract(syms, cn) {
            diags.push(Diagnostic::error(cn, format!("class {cn} does not implement abstract method {missing}")));
        }
    }
}

/// Abstract methods (from ancestors and implemented interfaces) with no
/// concrete implementation in the chain of `class`.
pub fn unimplemented_abstract(syms: &Symbols, class: &str) -> Vec<String> {
    let chain = syms.chain(class);
    let mut required: Vec<(String, String)> = Vec::new();
    for c in &chain {
        for m in c.methods().filter(|m| m.body.is_none()) {
            required.push((c.name.clone(), m.name.clone()));
        }
        if let Some(i) = c.implements.as_ref().and_then(|t| t.class_name()).and_then(|n| syms.interface(n)) {
            for s in &i.sigs {
                required.push((i.name.clone(), s.name.clone()));
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (owner, name) in required {
        if seen.contains(&name) {
            continue;
        }
        if syms.concrete_method(class, &name).is_none() {
            seen.insert(name.clone());
            out.push(format!("{owner}.{name}"));
        }
    }
    out
}

fn check_ctor(syms: &Symbols, c: &ClassDecl, k: &CtorDecl, diags: &mut Vec<Diagnostic>) {
    let path = format!("{}.{}", c.name, k.name);
    if k.name != c.name {
        diags.push(Diagnostic::error(&path, format!("constructor name {} does not match class {}", k.name, c.name)));
    }
    let mut pnames = HashSet::new();
    for p in &k.params {
        if !pnames.insert(p.name.as_str()) {
            diags.push(Diagnostic::error(&path, format!("duplicate parameter {}", p.name)));
        }
        check_type(syms, &p.ty, &path, diags);
    }
    let mut assigned = HashSet::new();
    for (f, pn) in &k.assigns {
        let Some((_, fd)) = syms.lookup_field(&c.name, f) else {
            diags.push(Diagnostic::error(&path, format!("class {} has no field {f}", c.name)));
            continue;
        };
        if !assigned.insert(f.as_str()) {
            diags.push(Diagnostic::error(&path, format!("field {f} assigned twice")));
        }
        match k.params.iter().find(|p| &p.name == pn) {
            None => diags.push(Diagnostic::error(&path, format!("unknown parameter {pn}"))),
            Some(p) if !syms.is_assignable(&p.ty, &fd.ty) => diags.push(Diagnostic::error(
                &path,
                format!("cannot assign {} to field {f} of type {}", p.ty, fd.ty),
            )),
            Some(_) => {}
        }
    }
    if !c.is_abstract {
        for (_, f) in syms.all_fields(&c.name) {
            if !assigned.contains(f.name.as_str()) {
                diags.push(Diagnostic::error(&path, format!("constructor does not initialize field {}", f.name)));
            }
        }
    }
}

fn check_method(syms: &Symbols, c: &ClassDecl, m: &MethodDecl, diags: &mut Vec<Diagnostic>) {
    let path = format!("{}.{}", c.name, m.name);
    check_type(syms, &m.ret, &path, diags);
    let mut pnames = HashSet::new();
    for p in &m.params {
        if !pnames.insert(p.name.as_str()) {
            diags.push(Diagnostic::error(&path, format!("duplicate parameter {}", p.name)));
        }
        if p.ty == Type::Void {
            diags.push(Diagnostic::error(&path, "parameters cannot have type void"));
        }
        check_type(syms, &p.ty, &path, diags);
    }
    if let Some(tv) = &m.type_param {
        if !m.params.iter().any(|p| p.ty.mentions_var(tv)) {
            diags.push(Diagnostic::error(&path, format!("type parameter {tv} must appear in a parameter type")));
        }
    }
    if m.is_abstract && !c.is_abstract {
        diags.push(Diagnostic::error(&path, format!("abstract method {} in concrete class {}", m.name, c.name)));
    }

    // Overrides must keep the inherited signature.
    let sig = m.sig();
    for anc in syms.chain(&c.name).into_iter().skip(1) {
        if let Some(sup) = anc.method(&m.name) {
            if !sig.same_shape(&sup.sig()) {
                diags.push(Diagnostic::error(
                    &path,
                    format!("incompatible override of {}.{}", anc.name, m.name),
                ));
            }
            break;
        }
    }
    for anc in syms.chain(&c.name) {
        if let Some(it) = &anc.implements {
            if let Some(mr) = syms.lookup_method(it, &m.name) {
                let mut want = mr.sig.clone();
                if let (Some(a), Some(b)) = (&want.type_param, &sig.type_param) {
                    let b = Type::Var(b.clone());
                    want.ret = want.ret.subst(a, &b);
                    for p in &mut want.params {
                        p.ty = p.ty.subst(a, &b);
                    }
                    want.type_param = sig.type_param.clone();
                }
                if !sig.same_shape(&want) {
                    diags.push(Diagnostic::error(
                        &path,
                        format!("incompatible implementation of {}.{}", mr.owner, m.name),
                    ));
                }
            }
        }
    }

    check_body(syms, &c.name, m, diags);
}

/// Checks the statements of `m` as if it were declared in `class`.
pub(crate) fn check_body(syms: &Symbols, class: &str, m: &MethodDecl, diags: &mut Vec<Diagnostic>) {
    let path = format!("{class}.{}", m.name);
    let Some(body) = &m.body else { return };
    if body.is_empty() {
        diags.push(Diagnostic::error(&path, "method body must not be empty"));
        return;
    }
    let mut scope = Scope::for_method(class, m);
    let last = body.len() - 1;
    for (i, s) in body.iter().enumerate() {
        match s {
            Stmt::Return(e) => {
                if i != last {
                    diags.push(Diagnostic::error(&path, "unreachable statement after return"));
                }
                if m.ret == Type::Void {
                    diags.push(Diagnostic::error(&path, "void method cannot return a value"));
                    syms.check_expr(&scope, e, diags);
                } else if let Some(t) = syms.check_expr(&scope, e, diags) {
                    if !syms.is_assignable(&t, &m.ret) {
                        diags.push(Diagnostic::error(&path, format!("return type mismatch: expected {}, found {t}", m.ret)));
                    }
                }
            }
            Stmt::Local(t, n, e) => {
                if scope.lookup(n).is_some() {
                    diags.push(Diagnostic::error(&path, format!("variable {n} is already defined")));
                }
                if *t == Type::Void {
                    diags.push(Diagnostic::error(&path, "local variables cannot have type void"));
                }
                check_type(syms, t, &path, diags);
                if let Some(et) = syms.check_expr(&scope, e, diags) {
                    if !syms.is_assignable(&et, t) {
                        diags.push(Diagnostic::error(&path, format!("cannot initialize {n} of type {t} with {et}")));
                    }
                }
                scope.vars.push((n.clone(), t.clone()));
            }
            Stmt::Expr(e) => {
                syms.check_expr(&scope, e, diags);
            }
        }
    }
    if m.ret != Type::Void && !matches!(body[last], Stmt::Return(_)) {
        diags.push(Diagnostic::error(&path, "missing return statement"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn errors(src: &str) -> Vec<String> {
        typecheck(&parse(src).unwrap()).into_iter().map(|d| d.message).collect()
    }

    #[test]
    fn plus_operands() {
        let errs = errors("class A { public int f() { return 1 + \"x\"; } }");
        assert_eq!(errs, vec!["operands of + must both be int or both be string".to_string()]);
    }

    #[test]
    fn collects_all_errors() {
        let errs = errors("class A { public int f() { return y; } public string g() { return 1; } }");
        assert_eq!(errs.len(), 2, "{errs:?}");
    }

    #[test]
    fn private_field_access() {
        let errs = errors(
            "class A { private int x; A(int x) { this.x = x; } }\n\
             class B { public int f(A a) { return a.x; } }",
        );
        assert_eq!(errs.len(), 1);
        assert!(errs[0].contains("not accessible"));
    }

    #[test]
    fn abstract_rules() {
        let errs = errors("class A { public abstract int f(); }");
        assert!(errs.iter().any(|e| e.contains("abstract method f in concrete class")));
        let errs = errors("abstract class A { public abstract int f(); } class B extends A { }");
        assert_eq!(errs, vec!["class B does not implement abstract method A.f".to_string()]);
        let errs = errors("abstract class A { } class B { public A f() { return new A(); } }");
        assert_eq!(errs, vec!["cannot instantiate abstract class A".to_string()]);
    }

    #[test]
    fn generic_visitor_shape_checks() {
        let src = "abstract class E { public abstract <T> T accept(Visitor<T> v); }\n\
                   class N extends E { public <T> T accept(Visitor<T> v) { return v.visitN(this); } }\n\
                   interface Visitor<T> { T visitN(N n); }\n\
                   class V implements Visitor<int> { public int visitN(N n) { return 1; } }\n\
                   class U { public int f(E e) { return e.accept(new V()) + 1; } public string g(E e) { return e.accept(new V()); } }";
        let errs = errors(src);
        assert_eq!(errs.len(), 1, "{errs:?}");
        assert!(errs[0].contains("return type mismatch"));
    }

    #[test]
    fn interface_param_only_in_return_position() {
        let errs = errors("interface I<T> { int f(T x); }");
        assert_eq!(errs.len(), 1);
        assert!(errs[0].contains("return position"));
    }

    #[test]
    fn statement_rules() {
        let errs = errors("class A { public int f() { return 1; return 2; } }");
        assert_eq!(errs, vec!["unreachable statement after return".to_string()]);
        let errs = errors("class A { public int f() { int x = 1; int x = 2; return x; } }");
        assert_eq!(errs, vec!["variable x is already defined".to_string()]);
        let errs = errors("class A { public int f() { 1; } }");
        assert_eq!(errs, vec!["missing return statement".to_string()]);
    }

    #[test]
    fn ctor_must_initialize_fields() {
        let errs = errors("class A { int x; int y; A(int x) { this.x = x; } }");
        assert_eq!(errs, vec!["constructor does not initialize field y".to_string()]);
        let errs = errors("class A { int x; }");
        assert_eq!(errs, vec!["class A has fields but no constructor".to_string()]);
    }

    #[test]
    fn inheritance_cycle() {
        let errs = errors("class A extends B { } class B extends A { }");
        assert_eq!(errs.len(), 2);
        assert!(errs[0].contains("cycle"));
    }
}
