//! Canonical pretty-printer.
//!
//! Layout: 4-space indentation, one blank line between members and between
//! declarations, members emitted fields first, then constructors, then
//! methods. Output ends with a single newline unless the program is empty.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    for (i, d) in p.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_decl(&mut out, d);
    }
    out
}

pub fn pretty_decl(d: &Decl) -> String {
    let mut out = String::new();
    write_decl(&mut out, d);
    out
}

fn write_comment(out: &mut String, indent: &str, lines: &[String]) {
    for l in lines {
        let _ = writeln!(out, "{indent}//{l}");
    }
}

fn write_decl(out: &mut String, d: &Decl) {
    write_comment(out, "", d.comment());
    match d {
        Decl::Class(c) => {
            if c.is_abstract {
                out.push_str("abstract ");
            }
            let _ = write!(out, "class {}", c.name);
            if let Some(e) = &c.extends {
                let _ = write!(out, " extends {e}");
            }
            if let Some(i) = &c.implements {
                let _ = write!(out, " implements {i}");
            }
            out.push_str(" {\n");
            let mut members: Vec<&Member> = c.members.iter().collect();
            members.sort_by_key(|m| m.group());
            for (i, m) in members.into_iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                write_member(out, m);
            }
            out.push_str("}\n");
        }
        Decl::Interface(i) => {
            let _ = write!(out, "interface {}", i.name);
            if let Some(t) = &i.type_param {
                let _ = write!(out, "<{t}>");
            }
            out.push_str(" {\n");
            for (k, s) in i.sigs.iter().enumerate() {
                if k > 0 {
                    out.push('\n');
                }
                write_comment(out, INDENT, &s.comment);
                let _ = writeln!(out, "{INDENT}{};", sig_text(s));
            }
            out.push_str("}\n");
        }
    }
}

fn sig_text(s: &MethodSig) -> String {
    let mut t = String::new();
    if let Some(tp) = &s.type_param {
        let _ = write!(t, "<{tp}> ");
    }
    let _ = write!(t, "{} {}({})", s.ret, s.name, params_text(&s.params));
    t
}

fn params_text(ps: &[Param]) -> String {
    ps.iter().map(|p| format!("{} {}", p.ty, p.name)).collect::<Vec<_>>().join(", ")
}

fn vis_prefix(v: Visibility) -> String {
    v.keyword().map(|k| format!("{k} ")).unwrap_or_default()
}

fn write_member(out: &mut String, m: &Member) {
    write_comment(out, INDENT, m.comment());
    match m {
        Member::Field(f) => {
            let _ = writeln!(out, "{INDENT}{}{} {};", vis_prefix(f.vis), f.ty, f.name);
        }
        Member::Ctor(c) => {
            let _ = writeln!(out, "{INDENT}{}{}({}) {{", vis_prefix(c.vis), c.name, params_text(&c.params));
            for (f, p) in &c.assigns {
                let _ = writeln!(out, "{INDENT}{INDENT}this.{f} = {p};");
            }
            let _ = writeln!(out, "{INDENT}}}");
        }
        Member::Method(d) => {
            out.push_str(INDENT);
            out.push_str(&method_head(d));
            match &d.body {
                None => out.push_str(";\n"),
                Some(body) => {
                    out.push_str(" {\n");
                    for s in body {
                        let _ = writeln!(out, "{INDENT}{INDENT}{}", stmt_text(s));
                    }
                    let _ = writeln!(out, "{INDENT}}}");
                }
            }
        }
    }
}

fn method_head(d: &MethodDecl) -> String {
    let mut t = vis_prefix(d.vis);
    if d.is_abstract {
        t.push_str("abstract ");
    }
    t.push_str(&sig_text(&d.sig()));
    t
}

/// One-line rendering of a method declaration, used by the plan text format.
pub fn method_inline(d: &MethodDecl) -> String {
    let mut t = method_head(d);
    match &d.body {
        None => t.push(';'),
        Some(body) => {
            t.push_str(" { ");
            for s in body {
                t.push_str(&stmt_text(s));
                t.push(' ');
            }
            t.push('}');
        }
    }
    t
}

pub fn sig_inline(s: &MethodSig) -> String {
    sig_text(s)
}

pub fn stmt_text(s: &Stmt) -> String {
    match s {
        Stmt::Return(e) => format!("return {};", expr_text(e)),
        Stmt::Local(t, n, e) => format!("{t} {n} = {};", expr_text(e)),
        Stmt::Expr(e) => format!("{};", expr_text(e)),
    }
}

pub fn expr_text(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

pub fn quote_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_args(out: &mut String, args: &[Expr]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Str(s) => out.push_str(&quote_str(s)),
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::Var(v) => out.push_str(v),
        Expr::This => out.push_str("this"),
        Expr::Field(t, f) => {
            write_target(out, t);
            let _ = write!(out, ".{f}");
        }
        Expr::Call(t, m, args) => {
            write_target(out, t);
            let _ = write!(out, ".{m}");
            write_args(out, args);
        }
        Expr::New(c, args) => {
            let _ = write!(out, "new {c}");
            write_args(out, args);
        }
        Expr::ToStr(inner) => {
            out.push_str("str(");
            write_expr(out, inner);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            let wrap = |out: &mut String, sub: &Expr, need: bool| {
                if need {
                    out.push('(');
                    write_expr(out, sub);
                    out.push(')');
                } else {
                    write_expr(out, sub);
                }
            };
            let prec = |x: &Expr| match x {
                Expr::Binary(o, _, _) => o.precedence(),
                _ => u8::MAX,
            };
            wrap(out, l, prec(l) < op.precedence());
            let _ = write!(out, " {} ", op.symbol());
            wrap(out, r, prec(r) <= op.precedence());
        }
    }
}

fn write_target(out: &mut String, t: &Expr) {
    if matches!(t, Expr::Binary(..)) {
        out.push('(');
        write_expr(out, t);
        out.push(')');
    } else {
        write_expr(out, t);
    }
}

/// Reorders members into canonical order (fields, constructors, methods),
/// keeping declaration order within each group.
pub fn canonicalize(p: &Program) -> Program {
    let mut out = p.clone();
    for c in out.classes_mut() {
        c.members.sort_by_key(Member::group);
    }
    out
}
