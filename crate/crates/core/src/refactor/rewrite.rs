//! The rewrites behind each operation. Callers check preconditions first.

use std::collections::{BTreeSet, VecDeque};

use crate::lang::{ClassDecl, CtorDecl, Decl, Expr, Member, MethodDecl, Program, Stmt, Symbols, Type};

use super::op::*;
use super::walk::{may_be_instance, rewrite_body, rewrite_program, Site};

/// Whether `t` is typed at or below the recursion root of `rw`.
pub(crate) fn is_recursive_receiver(site: &Site, t: &Expr, rw: &BodyRewrite) -> bool {
    let Some((root, _)) = &rw.recursion else { return false };
    site.type_name(t).is_some_and(|n| site.syms.class(&n).is_some() && site.syms.is_subclass(&n, root))
}

/// Whether the call `t.method(..)` statically binds to a declaration in `class`.
pub(crate) fn resolves_to(site: &Site, t: &Expr, method: &str, class: &str) -> bool {
    site.type_of(t)
        .and_then(|ty| site.syms.lookup_method(&ty, method))
        .is_some_and(|r| r.owner == class)
}

/// The field returned by `m` if its body is exactly `return this.f;`.
pub(crate) fn trivial_getter_field<'m>(c: &ClassDecl, m: &'m MethodDecl) -> Option<&'m str> {
    if !m.params.is_empty() || m.type_param.is_some() {
        return None;
    }
    match m.body.as_deref() {
        Some([Stmt::Return(Expr::Field(t, f))]) if **t == Expr::This && c.field(f).is_some() => Some(f),
        _ => None,
    }
}

/// Classes and interfaces declaring `name` that are connected to `owner`
/// through inheritance or implementation: renaming one requires renaming all.
pub(crate) fn override_family(syms: &Symbols, owner: &str, name: &str) -> BTreeSet<String> {
    let declares = |d: &Decl| match d {
        Decl::Class(c) => c.method(name).is_some(),
        Decl::Interface(i) => i.sigs.iter().any(|s| s.name == name),
    };
    let nodes: Vec<&Decl> = syms.program.decls.iter().filter(|d| declares(d)).collect();
    let related = |a: &Decl, b: &Decl| match (a, b) {
        (Decl::Class(x), Decl::Class(y)) => syms.is_subclass(&x.name, &y.name) || syms.is_subclass(&y.name, &x.name),
        (Decl::Class(x), Decl::Interface(i)) | (Decl::Interface(i), Decl::Class(x)) => {
            syms.interface_instance(&x.name, &i.name).is_some()
        }
        _ => false,
    };
    let mut out = BTreeSet::new();
    let mut queue = VecDeque::from([owner.to_string()]);
    while let Some(n) = queue.pop_front() {
        if !out.insert(n.clone()) {
            continue;
        }
        let Some(cur) = syms.decl(&n) else { continue };
        for d in &nodes {
            if !out.contains(d.name()) && related(cur, d) {
                queue.push_back(d.name().to_string());
            }
        }
    }
    out
}

/// The body of `src` (declared in `src_class`) rewritten for its new owner.
pub(crate) fn moved_body(syms: &Symbols, src_class: &str, src: &MethodDecl, rw: &BodyRewrite) -> Vec<Stmt> {
    let getter_of = |f: &str| rw.getters.iter().find(|(x, _)| x == f).map(|(_, g)| g.clone());
    let field_of = |g: &str| rw.getters.iter().find(|(_, x)| x == g).map(|(f, _)| f.clone());
    let op = rw.recursion.as_ref().map(|(_, op)| op.as_str());
    let mut rule = |site: &Site, orig: &Expr, rebuilt: Expr| -> Expr {
        match &rw.receiver {
            ReceiverSwap::ThisToParam(p) => match (orig, rebuilt) {
                (Expr::Field(t, f), _) if **t == Expr::This => match getter_of(f) {
                    Some(g) => Expr::call(Expr::var(p), g, vec![]),
                    None => Expr::field(Expr::var(p), f.clone()),
                },
                (Expr::Call(t, m, args), Expr::Call(t2, _, _))
                    if Some(m.as_str()) == op && args.is_empty() && is_recursive_receiver(site, t, rw) =>
                {
                    Expr::Call(t2, "accept".into(), vec![Expr::This])
                }
                (Expr::This, _) => Expr::var(p),
                (_, rebuilt) => rebuilt,
            },
            ReceiverSwap::ParamToThis(p) => match (orig, rebuilt) {
                (Expr::Call(t, g, args), _) if matches!(&**t, Expr::Var(v) if v == p) && args.is_empty() => {
                    match field_of(g) {
                        Some(f) => Expr::field(Expr::This, f),
                        None => Expr::call(Expr::This, g.clone(), vec![]),
                    }
                }
                (Expr::Call(t, m, args), Expr::Call(t2, _, _))
                    if m == "accept" && args == &[Expr::This] && is_recursive_receiver(site, t, rw) =>
                {
                    Expr::Call(t2, op.unwrap_or_default().to_string(), vec![])
                }
                (Expr::Var(v), _) if v == p => Expr::This,
                (_, rebuilt) => rebuilt,
            },
        }
    };
    rewrite_body(syms, src_class, src, &mut rule).unwrap_or_default()
}

/// What stays behind in the source of a move.
fn delegation(to: &MethodPath, ret: &Type, swap: &ReceiverSwap) -> Vec<Stmt> {
    let call = match swap {
        ReceiverSwap::ThisToParam(_) => Expr::call(Expr::new_obj(to.class.clone(), vec![]), to.method.clone(), vec![Expr::This]),
        ReceiverSwap::ParamToThis(p) => Expr::call(Expr::var(p), to.method.clone(), vec![]),
    };
    vec![if *ret == Type::Void { Stmt::Expr(call) } else { Stmt::Return(call) }]
}

fn walk_mut(e: &mut Expr, f: &mut dyn FnMut(&mut Expr)) {
    f(e);
    match e {
        Expr::Field(t, _) | Expr::ToStr(t) => walk_mut(t, f),
        Expr::Call(t, _, args) => {
            walk_mut(t, f);
            args.iter_mut().for_each(|a| walk_mut(a, f));
        }
        Expr::New(_, args) => args.iter_mut().for_each(|a| walk_mut(a, f)),
        Expr::Binary(_, l, r) => {
            walk_mut(l, f);
            walk_mut(r, f);
        }
        _ => {}
    }
}

fn rename_type(p: &mut Program, old: &str, new: &str) {
    let ren = |t: &mut Type| t.rename_named(old, new);
    for d in &mut p.decls {
        match d {
            Decl::Interface(i) => {
                if i.name == old {
                    i.name = new.to_string();
                }
                for s in &mut i.sigs {
                    ren(&mut s.ret);
                    s.params.iter_mut().for_each(|p| ren(&mut p.ty));
                }
            }
            Decl::Class(c) => {
                if c.name == old {
                    c.name = new.to_string();
                }
                if c.extends.as_deref() == Some(old) {
                    c.extends = Some(new.to_string());
                }
                if let Some(i) = &mut c.implements {
                    ren(i);
                }
                for m in &mut c.members {
                    match m {
                        Member::Field(f) => ren(&mut f.ty),
                        Member::Ctor(k) => {
                            if k.name == old {
                                k.name = new.to_string();
                            }
                            k.params.iter_mut().for_each(|p| ren(&mut p.ty));
                        }
                        Member::Method(md) => {
                            ren(&mut md.ret);
                            md.params.iter_mut().for_each(|p| ren(&mut p.ty));
                            for s in md.body.iter_mut().flatten() {
                                if let Stmt::Local(t, _, _) = s {
                                    ren(t);
                                }
                                walk_mut(s.expr_mut(), &mut |e| {
                                    if let Expr::New(n, _) = e {
                                        if n == old {
                                            *n = new.to_string();
                                        }
                                    }
                                });
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Reads a free occurrence of `tp` as the interface type variable.
fn bind_type_var(sig: &mut crate::lang::MethodSig, tp: &str) {
    fn bind(t: &mut Type, tp: &str) {
        match t {
            Type::Named(n, None) if n == tp => *t = Type::Var(tp.to_string()),
            Type::Named(_, Some(a)) => bind(a, tp),
            _ => {}
        }
    }
    bind(&mut sig.ret, tp);
    sig.params.iter_mut().for_each(|p| bind(&mut p.ty, tp));
}

fn every_class(_: &ClassDecl) -> bool {
    true
}

/// Applies `op` without checking its preconditions.
pub(crate) fn apply_unchecked(op: &RefactoringOp, p: &Program) -> Program {
    let syms = Symbols::new(p);
    match op {
        RefactoringOp::CreateClass { name, is_abstract, extends, implements } => {
            let mut out = p.clone();
            let mut c = ClassDecl::new(name.clone());
            c.is_abstract = *is_abstract;
            c.extends = extends.clone();
            c.implements = implements.clone();
            out.decls.push(Decl::Class(c));
            out
        }
        RefactoringOp::CreateInterface { name, type_param } => {
            let mut out = p.clone();
            out.decls.push(Decl::Interface(crate::lang::InterfaceDecl {
                comment: Vec::new(),
                name: name.clone(),
                type_param: type_param.clone(),
                sigs: Vec::new(),
            }));
            out
        }
        RefactoringOp::AddMethod { class, method } => {
            let mut out = p.clone();
            if let Some(c) = out.class_mut(class) {
                c.members.push(Member::Method(method.clone()));
            }
            out
        }
        RefactoringOp::AddAbstractMethod { owner, vis, sig } => {
            let mut out = p.clone();
            if let Some(i) = out.interface_mut(owner) {
                let mut sig = sig.clone();
                if let Some(tp) = &i.type_param {
                    bind_type_var(&mut sig, tp);
                }
                i.sigs.push(sig);
            } else if let Some(c) = out.class_mut(owner) {
                match c.method_mut(&sig.name) {
                    Some(m) => {
                        m.is_abstract = true;
                        m.body = None;
                        m.vis = *vis;
                    }
                    None => c.members.push(Member::Method(MethodDecl {
                        comment: sig.comment.clone(),
                        vis: *vis,
                        is_abstract: true,
                        type_param: sig.type_param.clone(),
                        ret: sig.ret.clone(),
                        name: sig.name.clone(),
                        params: sig.params.clone(),
                        body: None,
                    })),
                }
            }
            out
        }
        RefactoringOp::DeleteMethod { class, method } => {
            let mut out = p.clone();
            if let Some(c) = out.class_mut(class) {
                c.remove_method(method);
            }
            out
        }
        RefactoringOp::MoveMethodBody { from, to, rewrite } => {
            let Some(src) = syms.class(&from.class).and_then(|c| c.method(&from.method)) else { return p.clone() };
            let body = moved_body(&syms, &from.class, src, rewrite);
            let left = delegation(to, &src.ret, &rewrite.receiver);
            let comment = src.comment.clone();
            let mut out = p.clone();
            if let Some(t) = out.class_mut(&to.class).and_then(|c| c.method_mut(&to.method)) {
                t.body = Some(body);
                t.comment = comment;
            }
            if let Some(s) = out.class_mut(&from.class).and_then(|c| c.method_mut(&from.method)) {
                s.body = Some(left);
                s.comment = Vec::new();
            }
            out
        }
        RefactoringOp::RewriteCalls { receiver, method, replacement, scope } => {
            let only = |c: &ClassDecl| scope.as_deref().is_none_or(|s| s == c.name);
            rewrite_program(p, &only, &mut |site, orig, rebuilt| match (orig, rebuilt) {
                (Expr::Call(t, m, _), Expr::Call(t2, _, args)) if m == method => {
                    let hits = site.type_name(t).is_some_and(|n| n == *receiver || may_be_instance(site.syms, &n, receiver));
                    if hits {
                        Expr::Call(t2, replacement.clone(), args)
                    } else {
                        Expr::Call(t2, m.clone(), args)
                    }
                }
                (_, rebuilt) => rebuilt,
            })
        }
        RefactoringOp::EncapsulateField { class, field } => {
            let g = getter_name(field);
            let mut out = rewrite_program(p, &every_class, &mut |site, orig, rebuilt| match (orig, rebuilt) {
                (Expr::Field(t, f), Expr::Field(t2, _)) if f == field && site.class() != class => {
                    let owned = site
                        .type_name(t)
                        .and_then(|n| site.syms.lookup_field(&n, f))
                        .is_some_and(|(o, _)| o == class);
                    if owned {
                        Expr::Call(t2, g.clone(), vec![])
                    } else {
                        Expr::Field(t2, f.clone())
                    }
                }
                (_, rebuilt) => rebuilt,
            });
            let ty = syms.class(class).and_then(|c| c.field(field)).map(|f| f.ty.clone());
            if let (Some(c), Some(ty)) = (out.class_mut(class), ty) {
                c.members.push(Member::Method(MethodDecl {
                    comment: Vec::new(),
                    vis: crate::lang::Visibility::Public,
                    is_abstract: false,
                    type_param: None,
                    ret: ty,
                    name: g,
                    params: Vec::new(),
                    body: Some(vec![Stmt::Return(Expr::field(Expr::This, field.clone()))]),
                }));
            }
            out
        }
        RefactoringOp::InlineTrivialGetter { class, getter } => {
            let field = syms
                .class(class)
                .and_then(|c| c.method(getter).and_then(|m| trivial_getter_field(c, m)))
                .unwrap_or_default()
                .to_string();
            let mut out = rewrite_program(p, &every_class, &mut |site, orig, rebuilt| match (orig, rebuilt) {
                (Expr::Call(t, m, args), Expr::Call(t2, _, _)) if m == getter && args.is_empty() && resolves_to(site, t, m, class) => {
                    Expr::Field(t2, field.clone())
                }
                (_, rebuilt) => rebuilt,
            });
            if let Some(c) = out.class_mut(class) {
                c.remove_method(getter);
            }
            out
        }
        RefactoringOp::ChangeVisibility { class, kind, member, vis } => {
            let mut out = p.clone();
            if let Some(c) = out.class_mut(class) {
                for m in &mut c.members {
                    match (kind, m) {
                        (MemberKind::Field, Member::Field(f)) if f.name == *member => f.vis = *vis,
                        (MemberKind::Method, Member::Method(d)) if d.name == *member => d.vis = *vis,
                        (MemberKind::Ctor, Member::Ctor(k)) => k.vis = *vis,
                        _ => {}
                    }
                }
            }
            out
        }
        RefactoringOp::RenameDeclaration { target, new_name } => rename(&syms, p, target, new_name),
        RefactoringOp::AddDelegatingMethod { class, method, body } => {
            let mut out = p.clone();
            if let Some(m) = out.class_mut(class).and_then(|c| c.method_mut(method)) {
                m.body = Some(body.clone());
                m.is_abstract = false;
            }
            out
        }
        RefactoringOp::DeleteDeclaration { name } => {
            let mut out = p.clone();
            out.decls.retain(|d| d.name() != name);
            out
        }
    }
}

fn rename(syms: &Symbols, p: &Program, target: &RenameTarget, new_name: &str) -> Program {
    match target {
        RenameTarget::Type(old) => {
            let mut out = p.clone();
            rename_type(&mut out, old, new_name);
            out
        }
        RenameTarget::Method(path) => {
            let family = override_family(syms, &path.class, &path.method);
            let old = &path.method;
            let mut out = rewrite_program(p, &every_class, &mut |site, orig, rebuilt| match (orig, rebuilt) {
                (Expr::Call(t, m, _), Expr::Call(t2, _, args)) if m == old => {
                    let in_family = site
                        .type_of(t)
                        .and_then(|ty| site.syms.lookup_method(&ty, m))
                        .is_some_and(|r| family.contains(&r.owner));
                    Expr::Call(t2, if in_family { new_name.to_string() } else { m.clone() }, args)
                }
                (_, rebuilt) => rebuilt,
            });
            for d in &mut out.decls {
                if !family.contains(d.name()) {
                    continue;
                }
                match d {
                    Decl::Class(c) => {
                        if let Some(m) = c.method_mut(old) {
                            m.name = new_name.to_string();
                        }
                    }
                    Decl::Interface(i) => {
                        for s in i.sigs.iter_mut().filter(|s| s.name == *old) {
                            s.name = new_name.to_string();
                        }
                    }
                }
            }
            out
        }
        RenameTarget::Field { class, field } => {
            let owns = |syms: &Symbols, in_class: &str| syms.lookup_field(in_class, field).is_some_and(|(o, _)| o == class);
            let mut out = rewrite_program(p, &every_class, &mut |site, orig, rebuilt| match (orig, rebuilt) {
                (Expr::Field(t, f), Expr::Field(t2, _)) if f == field => {
                    let hit = site.type_name(t).is_some_and(|n| owns(site.syms, &n));
                    Expr::Field(t2, if hit { new_name.to_string() } else { f.clone() })
                }
                (_, rebuilt) => rebuilt,
            });
            let touched: Vec<String> = p
                .classes()
                .filter(|c| syms.is_subclass(&c.name, class) && owns(syms, &c.name))
                .map(|c| c.name.clone())
                .collect();
            for c in out.classes_mut() {
                let is_owner = c.name == *class;
                let rename_assigns = touched.contains(&c.name);
                for m in &mut c.members {
                    match m {
                        Member::Field(f) if is_owner && f.name == *field => f.name = new_name.to_string(),
                        Member::Ctor(CtorDecl { assigns, .. }) if rename_assigns => {
                            for (f, _) in assigns.iter_mut().filter(|(f, _)| f == field) {
                                *f = new_name.to_string();
                            }
                        }
                        _ => {}
                    }
                }
            }
            out
        }
    }
}
