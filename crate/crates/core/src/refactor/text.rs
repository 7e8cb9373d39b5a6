//! Line-oriented plan text: a `plan <label>` header, then one
//! `OpName key=value ...` line per step. Values containing spaces, quotes,
//! `=` or `#` are double-quoted with backslash escapes. `#` starts a comment.

use std::collections::BTreeMap;

use crate::lang::pretty::{method_inline, quote_str, sig_inline, stmt_text};
use crate::lang::{parse_method, parse_sig_with, parse_stmts, parse_type, Visibility};

use super::op::*;
use super::plan::Plan;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("plan line {line}: {message}")]
pub struct PlanParseError {
    pub line: usize,
    pub message: String,
}

fn value(v: &str) -> String {
    let plain = !v.is_empty() && !v.chars().any(|c| c.is_whitespace() || matches!(c, '"' | '=' | '#' | '\\'));
    if plain {
        v.to_string()
    } else {
        quote_str(v)
    }
}

struct Line(String);

impl Line {
    fn arg(mut self, key: &str, v: &str) -> Line {
        self.0.push(' ');
        self.0.push_str(key);
        self.0.push('=');
        self.0.push_str(&value(v));
        self
    }

    fn opt(self, key: &str, v: Option<&str>) -> Line {
        match v {
            Some(v) => self.arg(key, v),
            None => self,
        }
    }

    fn comment(self, lines: &[String]) -> Line {
        if lines.is_empty() {
            self
        } else {
            self.arg("comment", &lines.join("\n"))
        }
    }
}

pub(crate) fn op_line(op: &RefactoringOp) -> String {
    let l = Line(op.label().to_string());
    let l = match op {
        RefactoringOp::CreateClass { name, is_abstract, extends, implements } => l
            .arg("name", name)
            .arg("abstract", if *is_abstract { "true" } else { "false" })
            .opt("extends", extends.as_deref())
            .opt("implements", implements.as_ref().map(|t| t.to_string()).as_deref()),
        RefactoringOp::CreateInterface { name, type_param } => {
            l.arg("name", name).opt("type_param", type_param.as_deref())
        }
        RefactoringOp::AddMethod { class, method } => {
            l.arg("class", class).arg("method", &method_inline(method)).comment(&method.comment)
        }
        RefactoringOp::AddAbstractMethod { owner, vis, sig } => l
            .arg("owner", owner)
            .arg("vis", &vis.to_string())
            .arg("signature", &sig_inline(sig))
            .comment(&sig.comment),
        RefactoringOp::DeleteMethod { class, method } => l.arg("class", class).arg("method", method),
        RefactoringOp::MoveMethodBody { from, to, rewrite } => {
            let receiver = match &rewrite.receiver {
                ReceiverSwap::ThisToParam(p) => format!("this->{p}"),
                ReceiverSwap::ParamToThis(p) => format!("{p}->this"),
            };
            let getters: Vec<String> = rewrite.getters.iter().map(|(f, g)| format!("{f}:{g}")).collect();
            let getters = (!getters.is_empty()).then(|| getters.join(","));
            let recursion = rewrite.recursion.as_ref().map(|(r, o)| format!("{r}.{o}"));
            l.arg("from", &from.to_string())
                .arg("to", &to.to_string())
                .arg("receiver", &receiver)
                .opt("getters", getters.as_deref())
                .opt("recursion", recursion.as_deref())
        }
        RefactoringOp::RewriteCalls { receiver, method, replacement, scope } => l
            .arg("receiver", receiver)
            .arg("method", method)
            .arg("replacement", replacement)
            .opt("scope", scope.as_deref()),
        RefactoringOp::EncapsulateField { class, field } => l.arg("class", class).arg("field", field),
        RefactoringOp::InlineTrivialGetter { class, getter } => l.arg("class", class).arg("getter", getter),
        RefactoringOp::ChangeVisibility { class, kind, member, vis } => l
            .arg("class", class)
            .arg("kind", kind.keyword())
            .arg("member", member)
            .arg("vis", &vis.to_string()),
        RefactoringOp::RenameDeclaration { target, new_name } => {
            let (kind, t) = match target {
                RenameTarget::Type(n) => ("type", n.clone()),
                RenameTarget::Method(m) => ("method", m.to_string()),
                RenameTarget::Field { class, field } => ("field", format!("{class}.{field}")),
            };
            l.arg("kind", kind).arg("target", &t).arg("new", new_name)
        }
        RefactoringOp::AddDelegatingMethod { class, method, body } => {
            let text: Vec<String> = body.iter().map(stmt_text).collect();
            l.arg("class", class).arg("method", method).arg("body", &text.join(" "))
        }
        RefactoringOp::DeleteDeclaration { name } => l.arg("name", name),
    };
    l.0
}

pub fn plan_text(plan: &Plan) -> String {
    let mut out = format!("plan {}\n", value(&plan.label));
    for op in &plan.steps {
        out.push_str(&op_line(op));
        out.push('\n');
    }
    out
}

/// Splits a line into words, honoring quoted values. Stops at an unquoted `#`.
fn words(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = line.chars().peekable();
    let mut in_word = false;
    while let Some(c) = chars.next() {
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                if in_word {
                    out.push(std::mem::take(&mut cur));
                    in_word = false;
                }
            }
            '"' => {
                in_word = true;
                loop {
                    match chars.next() {
                        None => return Err("unterminated quoted value".into()),
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some('n') => cur.push('\n'),
                            Some('t') => cur.push('\t'),
                            Some('"') => cur.push('"'),
                            Some('\\') => cur.push('\\'),
                            _ => return Err("invalid escape in quoted value".into()),
                        },
                        Some(other) => cur.push(other),
                    }
                }
            }
            other => {
                in_word = true;
                cur.push(other);
            }
        }
    }
    if in_word {
        out.push(cur);
    }
    Ok(out)
}

struct Args {
    map: BTreeMap<String, String>,
}

impl Args {
    fn take(&mut self, key: &str) -> Result<String, String> {
        self.map.remove(key).ok_or_else(|| format!("missing argument {key}"))
    }

    fn take_opt(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn comment(&mut self) -> Vec<String> {
        self.take_opt("comment").map(|c| c.split('\n').map(str::to_string).collect()).unwrap_or_default()
    }

    fn finish(self) -> Result<(), String> {
        match self.map.keys().next() {
            Some(k) => Err(format!("unexpected argument {k}")),
            None => Ok(()),
        }
    }
}

fn method_path(s: &str) -> Result<MethodPath, String> {
    s.split_once('.')
        .map(|(c, m)| MethodPath::new(c, m))
        .ok_or_else(|| format!("expected Class.member, found {s}"))
}

fn vis(s: &str) -> Result<Visibility, String> {
    Visibility::parse(s).ok_or_else(|| format!("unknown visibility {s}"))
}

/// Interfaces created earlier in the same plan, with their type parameter.
type Generics = BTreeMap<String, String>;

fn parse_op(name: &str, mut a: Args, generics: &Generics) -> Result<RefactoringOp, String> {
    let op = match name {
        "CreateClass" => RefactoringOp::CreateClass {
            name: a.take("name")?,
            is_abstract: match a.take("abstract")?.as_str() {
                "true" => true,
                "false" => false,
                other => return Err(format!("abstract must be true or false, found {other}")),
            },
            extends: a.take_opt("extends"),
            implements: a.take_opt("implements").map(|t| parse_type(&t)).transpose().map_err(|d| d.message)?,
        },
        "CreateInterface" => RefactoringOp::CreateInterface { name: a.take("name")?, type_param: a.take_opt("type_param") },
        "AddMethod" => {
            let class = a.take("class")?;
            let mut method = parse_method(&a.take("method")?).map_err(|d| d.message)?;
            method.comment = a.comment();
            RefactoringOp::AddMethod { class, method }
        }
        "AddAbstractMethod" => {
            let owner = a.take("owner")?;
            let vis = vis(&a.take("vis")?)?;
            let tvars: Vec<&str> = generics.get(&owner).map(String::as_str).into_iter().collect();
            let mut sig = parse_sig_with(&a.take("signature")?, &tvars).map_err(|d| d.message)?;
            sig.comment = a.comment();
            RefactoringOp::AddAbstractMethod { owner, vis, sig }
        }
        "DeleteMethod" => RefactoringOp::DeleteMethod { class: a.take("class")?, method: a.take("method")? },
        "MoveMethodBody" => {
            let from = method_path(&a.take("from")?)?;
            let to = method_path(&a.take("to")?)?;
            let r = a.take("receiver")?;
            let receiver = match r.split_once("->") {
                Some(("this", p)) => ReceiverSwap::ThisToParam(p.to_string()),
                Some((p, "this")) => ReceiverSwap::ParamToThis(p.to_string()),
                _ => return Err(format!("receiver must be this->p or p->this, found {r}")),
            };
            let getters = match a.take_opt("getters") {
                None => Vec::new(),
                Some(g) => g
                    .split(',')
                    .map(|pair| {
                        pair.split_once(':')
                            .map(|(f, g)| (f.to_string(), g.to_string()))
                            .ok_or_else(|| format!("expected field:getter, found {pair}"))
                    })
                    .collect::<Result<_, _>>()?,
            };
            let recursion = match a.take_opt("recursion") {
                None => None,
                Some(r) => {
                    let p = method_path(&r)?;
                    Some((p.class, p.method))
                }
            };
            RefactoringOp::MoveMethodBody { from, to, rewrite: BodyRewrite { receiver, getters, recursion } }
        }
        "RewriteCalls" => RefactoringOp::RewriteCalls {
            receiver: a.take("receiver")?,
            method: a.take("method")?,
            replacement: a.take("replacement")?,
            scope: a.take_opt("scope"),
        },
        "EncapsulateField" => RefactoringOp::EncapsulateField { class: a.take("class")?, field: a.take("field")? },
        "InlineTrivialGetter" => RefactoringOp::InlineTrivialGetter { class: a.take("class")?, getter: a.take("getter")? },
        "ChangeVisibility" => {
            let class = a.take("class")?;
            let k = a.take("kind")?;
            let kind = MemberKind::parse(&k).ok_or_else(|| format!("unknown member kind {k}"))?;
            RefactoringOp::ChangeVisibility { class, kind, member: a.take("member")?, vis: vis(&a.take("vis")?)? }
        }
        "RenameDeclaration" => {
            let kind = a.take("kind")?;
            let t = a.take("target")?;
            let target = match kind.as_str() {
                "type" => RenameTarget::Type(t),
                "method" => RenameTarget::Method(method_path(&t)?),
                "field" => {
                    let p = method_path(&t)?;
                    RenameTarget::Field { class: p.class, field: p.method }
                }
                other => return Err(format!("unknown rename kind {other}")),
            };
            RefactoringOp::RenameDeclaration { target, new_name: a.take("new")? }
        }
        "AddDelegatingMethod" => RefactoringOp::AddDelegatingMethod {
            class: a.take("class")?,
            method: a.take("method")?,
            body: parse_stmts(&a.take("body")?, &[]).map_err(|d| d.message)?,
        },
        "DeleteDeclaration" => RefactoringOp::DeleteDeclaration { name: a.take("name")? },
        other => return Err(format!("unknown operation {other}")),
    };
    a.finish()?;
    Ok(op)
}

pub fn parse_plan(text: &str) -> Result<Plan, PlanParseError> {
    let mut plan: Option<Plan> = None;
    let mut generics = Generics::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| PlanParseError { line, message };
        let ws = words(raw).map_err(err)?;
        let Some((head, rest)) = ws.split_first() else { continue };
        match &mut plan {
            None => {
                if head != "plan" || rest.len() != 1 {
                    return Err(err("expected header `plan <label>`".into()));
                }
                plan = Some(Plan::new(rest[0].clone()));
            }
            Some(p) => {
                let mut map = BTreeMap::new();
                for w in rest {
                    let (k, v) = w.split_once('=').ok_or_else(|| err(format!("expected key=value, found {w}")))?;
                    if map.insert(k.to_string(), v.to_string()).is_some() {
                        return Err(err(format!("argument {k} given twice")));
                    }
                }
                let op = parse_op(head, Args { map }, &generics).map_err(err)?;
                if let RefactoringOp::CreateInterface { name, type_param: Some(tp) } = &op {
                    generics.insert(name.clone(), tp.clone());
                }
                p.push(op);
            }
        }
    }
    plan.ok_or(PlanParseError { line: 1, message: "empty plan text".into() })
}
