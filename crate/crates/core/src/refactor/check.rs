use std::collections::BTreeSet;
use std::fmt;

use crate::lang::{is_identifier, ClassDecl, Decl, Expr, MethodDecl, Param, Program, Stmt, Symbols, Type};

use super::op::*;
use super::rewrite;
use super::walk::{may_be_instance, referenced_types, visit_exprs, visit_method};

/// The precondition family a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    NameUnused,
    InvalidName,
    UnknownDeclaration,
    UnknownMember,
    LiveCallSites,
    SignatureCompatible,
    UnresolvableAfterMove,
    CommentPreserved,
    GetterExists,
    NotTrivialGetter,
    CallSiteInaccessible,
    VisibilityBreaksAccess,
    NotAbstract,
    DescendantRelies,
    ReferencesRemain,
    InvalidBody,
    EndpointTypeSafety,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::NameUnused => "name-unused",
            Rule::InvalidName => "invalid-name",
            Rule::UnknownDeclaration => "unknown-declaration",
            Rule::UnknownMember => "unknown-member",
            Rule::LiveCallSites => "no-live-call-sites",
            Rule::SignatureCompatible => "signature-compatible",
            Rule::UnresolvableAfterMove => "resolvable-after-move",
            Rule::CommentPreserved => "comment-preserved",
            Rule::GetterExists => "getter-unused",
            Rule::NotTrivialGetter => "trivial-getter",
            Rule::CallSiteInaccessible => "call-sites-rewritable",
            Rule::VisibilityBreaksAccess => "access-preserved",
            Rule::NotAbstract => "abstract-owner",
            Rule::DescendantRelies => "descendants-override",
            Rule::ReferencesRemain => "no-references",
            Rule::InvalidBody => "valid-body",
            Rule::EndpointTypeSafety => "endpoint-type-safety",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {step} ({op}): {rule} violated at {location}: {message}")]
pub struct PreconditionViolation {
    pub step: usize,
    pub op: String,
    pub rule: Rule,
    pub location: String,
    pub message: String,
}

struct Checker<'p> {
    syms: Symbols<'p>,
    op: &'static str,
    out: Vec<PreconditionViolation>,
}

impl<'p> Checker<'p> {
    fn fail(&mut self, rule: Rule, location: impl Into<String>, message: impl Into<String>) {
        self.out.push(PreconditionViolation {
            step: 0,
            op: self.op.to_string(),
            rule,
            location: location.into(),
            message: message.into(),
        });
    }

    fn class(&mut self, name: &str) -> Option<&'p ClassDecl> {
        let c = self.syms.class(name);
        if c.is_none() {
            self.fail(Rule::UnknownDeclaration, name, format!("no class named {name}"));
        }
        c
    }

    fn method(&mut self, class: &str, name: &str) -> Option<(&'p ClassDecl, &'p MethodDecl)> {
        let c = self.class(class)?;
        let m = c.method(name);
        if m.is_none() {
            self.fail(Rule::UnknownMember, format!("{class}.{name}"), format!("class {class} declares no method {name}"));
        }
        m.map(|m| (c, m))
    }

    fn fresh_decl_name(&mut self, name: &str) {
        if !is_identifier(name) {
            self.fail(Rule::InvalidName, name, format!("{name} is not a valid identifier"));
        } else if self.syms.decl(name).is_some() {
            self.fail(Rule::NameUnused, name, format!("name {name} already declared"));
        }
    }

    /// Methods named `name` in ancestors or descendants of `class` must have
    /// the same shape as `m`.
    fn override_compatible(&mut self, class: &str, m: &crate::lang::MethodSig) {
        let related: Vec<&ClassDecl> = self
            .syms
            .chain(class)
            .into_iter()
            .skip(1)
            .chain(self.syms.descendants(class))
            .collect();
        for c in related {
            if let Some(other) = c.method(&m.name) {
                if !other.sig().same_shape(m) {
                    self.fail(
                        Rule::SignatureCompatible,
                        format!("{class}.{}", m.name),
                        format!("{class}.{} would be incompatible with {}.{}", m.name, c.name, m.name),
                    );
                }
            }
        }
    }
}

/// All violations `op` would cause on `p`; empty iff it is applicable.
pub fn check_preconditions(op: &RefactoringOp, p: &Program) -> Vec<PreconditionViolation> {
    let mut ck = Checker { syms: Symbols::new(p), op: op.label(), out: Vec::new() };
    match op {
        RefactoringOp::CreateClass { name, extends, implements, .. } => {
            ck.fresh_decl_name(name);
            if let Some(e) = extends {
                ck.class(e);
            }
            if let Some(t) = implements {
                let ok = t.class_name().and_then(|n| ck.syms.interface(n)).is_some() && ck.syms.type_exists(t);
                if !ok {
                    ck.fail(Rule::UnknownDeclaration, name, format!("{t} is not a valid interface type"));
                }
            }
        }
        RefactoringOp::CreateInterface { name, type_param } => {
            ck.fresh_decl_name(name);
            if let Some(tp) = type_param {
                if !is_identifier(tp) {
                    ck.fail(Rule::InvalidName, name, format!("{tp} is not a valid type parameter"));
                }
            }
        }
        RefactoringOp::AddMethod { class, method } => check_add_method(&mut ck, class, method),
        RefactoringOp::AddAbstractMethod { owner, sig, .. } => check_add_abstract(&mut ck, owner, sig),
        RefactoringOp::DeleteMethod { class, method } => check_delete_method(&mut ck, p, class, method),
        RefactoringOp::MoveMethodBody { from, to, rewrite } => check_move(&mut ck, from, to, rewrite),
        RefactoringOp::RewriteCalls { receiver, method, replacement, .. } => {
            if ck.syms.decl(receiver).is_none() {
                ck.fail(Rule::UnknownDeclaration, receiver, format!("no type named {receiver}"));
            } else if !is_identifier(replacement) {
                ck.fail(Rule::InvalidName, receiver, format!("{replacement} is not a valid identifier"));
            } else {
                let arity = |n: &str| declared_arity(&ck.syms, receiver, n);
                let (old, new) = (arity(method), arity(replacement));
                if new.is_none() || (old.is_some() && old != new) {
                    ck.fail(
                        Rule::UnknownMember,
                        format!("{receiver}.{replacement}"),
                        format!("{receiver} has no method {replacement} compatible with {method}"),
                    );
                }
            }
        }
        RefactoringOp::EncapsulateField { class, field } => {
            if let Some(c) = ck.class(class) {
                if c.field(field).is_none() {
                    ck.fail(Rule::UnknownMember, format!("{class}.{field}"), format!("class {class} declares no field {field}"));
                }
                let g = getter_name(field);
                let related: Vec<&ClassDecl> = ck.syms.chain(class).into_iter().chain(ck.syms.descendants(class)).collect();
                for r in related {
                    if r.method(&g).is_some() {
                        ck.fail(Rule::GetterExists, format!("{}.{g}", r.name), format!("method {g} already exists in {}", r.name));
                    }
                }
            }
        }
        RefactoringOp::InlineTrivialGetter { class, getter } => check_inline_getter(&mut ck, class, getter),
        RefactoringOp::ChangeVisibility { class, kind, member, vis } => {
            check_visibility(&mut ck, class, *kind, member, *vis)
        }
        RefactoringOp::RenameDeclaration { target, new_name } => check_rename(&mut ck, target, new_name),
        RefactoringOp::AddDelegatingMethod { class, method, body } => {
            if let Some((c, m)) = ck.method(class, method) {
                let loc = format!("{class}.{method}");
                if m.body.is_some() {
                    ck.fail(Rule::InvalidBody, &loc, format!("{loc} already has a body"));
                }
                let single_call = matches!(body.as_slice(), [Stmt::Return(Expr::Call(..))] | [Stmt::Expr(Expr::Call(..))]);
                if !single_call {
                    ck.fail(Rule::InvalidBody, &loc, "a delegating body is a single forwarding call");
                } else {
                    let filled = MethodDecl { body: Some(body.clone()), is_abstract: false, ..m.clone() };
                    let mut diags = Vec::new();
                    crate::lang::typeck::check_body(&ck.syms, &c.name, &filled, &mut diags);
                    for d in diags {
                        ck.fail(Rule::InvalidBody, &loc, d.message);
                    }
                }
            }
        }
        RefactoringOp::DeleteDeclaration { name } => match ck.syms.decl(name) {
            None => ck.fail(Rule::UnknownDeclaration, name, format!("no declaration named {name}")),
            Some(d) => {
                let member_comment = match d {
                    Decl::Class(c) => c.members.iter().any(|m| !m.comment().is_empty()),
                    Decl::Interface(i) => i.sigs.iter().any(|s| !s.comment.is_empty()),
                };
                if !d.comment().is_empty() || member_comment {
                    ck.fail(Rule::CommentPreserved, name, format!("deleting {name} would lose attached comments"));
                }
                for other in p.decls.iter().filter(|o| o.name() != name) {
                    if referenced_types(other).iter().any(|r| r == name) {
                        ck.fail(Rule::ReferencesRemain, name, format!("{name} is still referenced by {}", other.name()));
                    }
                }
            }
        },
    }
    ck.out
}

fn declared_arity(syms: &Symbols, owner: &str, name: &str) -> Option<usize> {
    match syms.decl(owner)? {
        Decl::Class(_) => syms.class_method(owner, name).map(|(_, m)| m.params.len()),
        Decl::Interface(i) => i.sigs.iter().find(|s| s.name == name).map(|s| s.params.len()),
    }
}

fn check_add_method(ck: &mut Checker, class: &str, method: &MethodDecl) {
    let Some(c) = ck.class(class) else { return };
    let loc = format!("{class}.{}", method.name);
    if !is_identifier(&method.name) {
        ck.fail(Rule::InvalidName, &loc, format!("{} is not a valid identifier", method.name));
    }
    if method.body.is_none() || method.is_abstract {
        ck.fail(Rule::InvalidBody, &loc, "AddMethod needs a concrete method with a body");
    }
    if c.method(&method.name).is_some() {
        ck.fail(Rule::NameUnused, &loc, format!("method {} already declared in {class}", method.name));
    }
    ck.override_compatible(class, &method.sig());
}

fn check_add_abstract(ck: &mut Checker, owner: &str, sig: &crate::lang::MethodSig) {
    let loc = format!("{owner}.{}", sig.name);
    match ck.syms.decl(owner) {
        None => ck.fail(Rule::UnknownDeclaration, owner, format!("no type named {owner}")),
        Some(Decl::Interface(i)) => {
            if i.sigs.iter().any(|s| s.name == sig.name) {
                ck.fail(Rule::NameUnused, &loc, format!("method {} already declared in {owner}", sig.name));
            }
        }
        Some(Decl::Class(c)) => {
            if !c.is_abstract {
                ck.fail(Rule::NotAbstract, owner, format!("class {owner} is not abstract"));
            }
            match c.method(&sig.name) {
                None => ck.override_compatible(owner, sig),
                Some(m) if m.body.is_none() => {
                    ck.fail(Rule::NameUnused, &loc, format!("{loc} is already abstract"));
                }
                Some(m) => {
                    if !m.sig().same_shape(sig) {
                        ck.fail(Rule::SignatureCompatible, &loc, format!("{loc} has a different signature"));
                    }
                    for d in ck.syms.descendants(owner) {
                        if d.is_abstract {
                            continue;
                        }
                        let runs_owner = ck.syms.concrete_method(&d.name, &sig.name).is_some_and(|(k, _)| k.name == owner);
                        if runs_owner {
                            ck.fail(Rule::DescendantRelies, &loc, format!("{} inherits the body of {loc}", d.name));
                        }
                    }
                }
            }
        }
    }
}

/// The program with `class.method` removed.
fn without_method(p: &Program, class: &str, method: &str) -> Program {
    let mut q = p.clone();
    if let Some(c) = q.class_mut(class) {
        c.remove_method(method);
    }
    q
}

fn check_delete_method(ck: &mut Checker, p: &Program, class: &str, method: &str) {
    let Some((_, m)) = ck.method(class, method) else { return };
    let loc = format!("{class}.{method}");
    if !m.comment.is_empty() {
        ck.fail(Rule::CommentPreserved, &loc, format!("deleting {loc} would lose its comment"));
    }
    let after = without_method(p, class, method);
    let syms2 = Symbols::new(&after);
    let concrete: Vec<&ClassDecl> = p.classes().filter(|c| !c.is_abstract).collect();
    let mut live: Vec<String> = Vec::new();
    visit_exprs(&ck.syms, &mut |site, e| {
        let Expr::Call(t, name, _) = e else { return };
        if name != method || (site.scope.class == class && site.scope.method == method) {
            return;
        }
        let Some(recv) = site.type_of(t) else { return };
        let Some(rn) = recv.class_name() else { return };
        let unresolved = syms2.lookup_method(&recv, name).is_none();
        let loses_target = concrete.iter().any(|k| {
            may_be_instance(site.syms, &k.name, rn)
                && site.syms.concrete_method(&k.name, name).is_some_and(|(o, _)| o.name == class)
                && syms2.concrete_method(&k.name, name).is_none()
        });
        if unresolved || loses_target {
            live.push(site.scope.path());
        }
    });
    if let Some(first) = live.first() {
        ck.fail(
            Rule::LiveCallSites,
            &loc,
            format!("live call sites: {} call(s) to {method} may still reach {loc} (first in {first})", live.len()),
        );
    }
}

fn check_move(ck: &mut Checker, from: &MethodPath, to: &MethodPath, rw: &BodyRewrite) {
    let src = ck.method(&from.class, &from.method);
    let tgt = ck.method(&to.class, &to.method);
    let (Some((_, src)), Some((tc, tgt))) = (src, tgt) else { return };
    let loc = from.to_string();
    if src.body.is_none() {
        ck.fail(Rule::InvalidBody, &loc, format!("{from} has no body to move"));
        return;
    }
    if tgt.body.is_none() {
        ck.fail(Rule::InvalidBody, to.to_string(), format!("{to} is abstract"));
    }
    if from.class == to.class {
        ck.fail(Rule::SignatureCompatible, &loc, "source and target must be different classes");
        return;
    }
    if !tgt.comment.is_empty() {
        ck.fail(Rule::CommentPreserved, to.to_string(), format!("{to} already carries a comment"));
    }
    if src.ret != tgt.ret || src.type_param.is_some() || tgt.type_param.is_some() {
        ck.fail(Rule::SignatureCompatible, &loc, format!("{from} and {to} must return the same type"));
    }
    match &rw.receiver {
        ReceiverSwap::ThisToParam(pn) => {
            if !src.params.is_empty() || tgt.params != [Param::new(Type::named(from.class.clone()), pn.clone())] {
                ck.fail(
                    Rule::SignatureCompatible,
                    &loc,
                    format!("{from} must take no parameters and {to} exactly ({} {pn})", from.class),
                );
            }
            let mut clash = false;
            for s in src.body.iter().flatten() {
                if matches!(s, Stmt::Local(_, n, _) if n == pn) {
                    clash = true;
                }
                s.expr().walk(&mut |e| clash |= matches!(e, Expr::Var(v) if v == pn));
            }
            if clash {
                ck.fail(Rule::UnresolvableAfterMove, &loc, format!("name {pn} is already used in {from}"));
            }
            let no_arg_ctor = tc.ctor().is_none_or(|k| k.params.is_empty());
            if tc.is_abstract || !no_arg_ctor || tc.fields().next().is_some() {
                ck.fail(
                    Rule::UnresolvableAfterMove,
                    &loc,
                    format!("{} must be a stateless concrete class to receive the body", to.class),
                );
            }
        }
        ReceiverSwap::ParamToThis(pn) => {
            if src.params != [Param::new(Type::named(to.class.clone()), pn.clone())] || !tgt.params.is_empty() {
                ck.fail(
                    Rule::SignatureCompatible,
                    &loc,
                    format!("{from} must take exactly ({} {pn}) and {to} no parameters", to.class),
                );
            }
            let (mut this_uses, mut recursive) = (0usize, 0usize);
            visit_method(&ck.syms, &from.class, src, &mut |site, e| match e {
                Expr::This => this_uses += 1,
                Expr::Call(t, m, args) if m == "accept" && args == &[Expr::This] && rewrite::is_recursive_receiver(site, t, rw) => {
                    recursive += 1;
                }
                _ => {}
            });
            let stray_this = this_uses - recursive;
            if stray_this > 0 {
                ck.fail(
                    Rule::UnresolvableAfterMove,
                    &loc,
                    format!("{from} uses this outside recursive accept calls"),
                );
            }
        }
    }
    if !ck.syms.accessible(&from.class, &to.class, tgt.vis) {
        ck.fail(Rule::UnresolvableAfterMove, &loc, format!("{to} is not accessible from {}", from.class));
    }
    if !ck.out.is_empty() {
        return;
    }
    let moved = rewrite::moved_body(&ck.syms, &from.class, src, rw);
    let placed = MethodDecl { body: Some(moved), ..tgt.clone() };
    let mut diags = Vec::new();
    crate::lang::typeck::check_body(&ck.syms, &to.class, &placed, &mut diags);
    for d in diags {
        ck.fail(Rule::UnresolvableAfterMove, to.to_string(), format!("after the move: {}", d.message));
    }
}

fn check_inline_getter(ck: &mut Checker, class: &str, getter: &str) {
    let Some((c, m)) = ck.method(class, getter) else { return };
    let loc = format!("{class}.{getter}");
    let Some(field) = rewrite::trivial_getter_field(c, m) else {
        ck.fail(Rule::NotTrivialGetter, &loc, format!("body of {loc} is not exactly `return this.f;`"));
        return;
    };
    if !m.comment.is_empty() {
        ck.fail(Rule::CommentPreserved, &loc, format!("inlining {loc} would lose its comment"));
    }
    let related = ck.syms.chain(class).into_iter().skip(1).chain(ck.syms.descendants(class));
    if related.clone().any(|r| r.method(getter).is_some()) {
        ck.fail(Rule::NotTrivialGetter, &loc, format!("{loc} takes part in overriding"));
    }
    let fvis = c.field(field).map_or(crate::lang::Visibility::Public, |f| f.vis);
    let mut blocked: BTreeSet<String> = BTreeSet::new();
    visit_exprs(&ck.syms, &mut |site, e| {
        if let Expr::Call(t, name, args) = e {
            if name == getter
                && args.is_empty()
                && rewrite::resolves_to(site, t, getter, class)
                && !site.syms.accessible(site.class(), class, fvis)
            {
                blocked.insert(site.class().to_string());
            }
        }
    });
    for b in blocked {
        ck.fail(
            Rule::CallSiteInaccessible,
            &loc,
            format!("field {class}.{field} would not be accessible from call site in {b}"),
        );
    }
}

fn check_visibility(ck: &mut Checker, class: &str, kind: MemberKind, member: &str, vis: crate::lang::Visibility) {
    let Some(c) = ck.class(class) else { return };
    let loc = format!("{class}.{member}");
    let exists = match kind {
        MemberKind::Field => c.field(member).is_some(),
        MemberKind::Method => c.method(member).is_some(),
        MemberKind::Ctor => c.ctor().is_some() && member == class,
    };
    if !exists {
        ck.fail(Rule::UnknownMember, &loc, format!("class {class} declares no {} {member}", kind.keyword()));
        return;
    }
    let mut blocked: BTreeSet<String> = BTreeSet::new();
    visit_exprs(&ck.syms, &mut |site, e| {
        let hit = match (kind, e) {
            (MemberKind::Field, Expr::Field(t, f)) => {
                f == member
                    && site
                        .type_name(t)
                        .and_then(|n| site.syms.lookup_field(&n, f))
                        .is_some_and(|(o, _)| o == class)
            }
            (MemberKind::Method, Expr::Call(t, m, _)) => m == member && rewrite::resolves_to(site, t, m, class),
            (MemberKind::Ctor, Expr::New(n, _)) => n == class,
            _ => false,
        };
        if hit && !site.syms.accessible(site.class(), class, vis) {
            blocked.insert(site.class().to_string());
        }
    });
    for b in blocked {
        ck.fail(Rule::VisibilityBreaksAccess, &loc, format!("{loc} would become inaccessible from {b}"));
    }
}

fn check_rename(ck: &mut Checker, target: &RenameTarget, new_name: &str) {
    if !is_identifier(new_name) {
        ck.fail(Rule::InvalidName, target.old_name(), format!("{new_name} is not a valid identifier"));
        return;
    }
    match target {
        RenameTarget::Type(old) => {
            if ck.syms.decl(old).is_none() {
                ck.fail(Rule::UnknownDeclaration, old, format!("no declaration named {old}"));
            }
            if ck.syms.decl(new_name).is_some() {
                ck.fail(Rule::NameUnused, old, format!("name {new_name} already declared"));
            }
        }
        RenameTarget::Method(path) => {
            let declared = match ck.syms.decl(&path.class) {
                Some(Decl::Class(c)) => c.method(&path.method).is_some(),
                Some(Decl::Interface(i)) => i.sigs.iter().any(|s| s.name == path.method),
                None => false,
            };
            if !declared {
                ck.fail(Rule::UnknownMember, path.to_string(), format!("{} declares no method {}", path.class, path.method));
                return;
            }
            let family = rewrite::override_family(&ck.syms, &path.class, &path.method);
            let mut clashes = BTreeSet::new();
            for owner in &family {
                match ck.syms.decl(owner) {
                    Some(Decl::Interface(i)) => {
                        if i.sigs.iter().any(|s| s.name == new_name) {
                            clashes.insert(owner.clone());
                        }
                    }
                    _ => {
                        for r in ck.syms.chain(owner).into_iter().chain(ck.syms.descendants(owner)) {
                            if r.method(new_name).is_some() {
                                clashes.insert(r.name.clone());
                            }
                        }
                    }
                }
            }
            for c in clashes {
                ck.fail(Rule::NameUnused, path.to_string(), format!("method {new_name} already declared in {c}"));
            }
        }
        RenameTarget::Field { class, field } => {
            let Some(c) = ck.class(class) else { return };
            if c.field(field).is_none() {
                ck.fail(Rule::UnknownMember, format!("{class}.{field}"), format!("class {class} declares no field {field}"));
                return;
            }
            let related: Vec<&ClassDecl> = ck.syms.chain(class).into_iter().chain(ck.syms.descendants(class)).collect();
            for r in related {
                if r.field(new_name).is_some() {
                    ck.fail(
                        Rule::NameUnused,
                        format!("{class}.{field}"),
                        format!("field {new_name} already declared in {}", r.name),
                    );
                }
            }
        }
    }
}
