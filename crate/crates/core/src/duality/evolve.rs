use std::collections::BTreeMap;
use std::fmt;

use crate::lang::{
    pretty, typecheck, ClassDecl, CtorDecl, Decl, Diagnostic, Expr, Member, MethodDecl, Param, Program, Stmt, Type,
    Visibility,
};
use crate::lens::{classify, coverage_matrix, detect_hierarchy, HierarchyInfo, StructureClass};

use super::naming::{visitor_class, ACCEPT};

/// A maintenance step that is modular in one of the two forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvolutionStep {
    /// A new subtype with its fields and one method per operation. A
    /// constructor is generated from the fields when none is given.
    AddSubtype { name: String, members: Vec<Member> },
    /// A new operation given as one visit method per subtype.
    AddOperation { name: String, ret: Type, members: Vec<Member> },
    /// Replaces every member of an existing class.
    EditClass { name: String, members: Vec<Member> },
}

impl EvolutionStep {
    pub fn class_name(&self) -> String {
        match self {
            EvolutionStep::AddSubtype { name, .. } | EvolutionStep::EditClass { name, .. } => name.clone(),
            EvolutionStep::AddOperation { name, .. } => visitor_class(name),
        }
    }
}

const NOT_MODULAR: &str = "this evolution is not modular in the current form; transform first";

fn fail(path: &str, msg: impl Into<String>) -> Vec<Diagnostic> {
    vec![Diagnostic::error(path, msg)]
}

fn in_form(p: &Program, want: StructureClass) -> Result<HierarchyInfo, Vec<Diagnostic>> {
    let h = detect_hierarchy(p)?;
    if classify(&coverage_matrix(p, &h)) != want {
        return Err(fail("", NOT_MODULAR));
    }
    Ok(h)
}

fn fresh(p: &Program, name: &str) -> Result<(), Vec<Diagnostic>> {
    match p.decl(name) {
        Some(_) => Err(fail(name, format!("name {name} already declared"))),
        None => Ok(()),
    }
}

fn require_methods(members: &[Member], names: &[String], owner: &str, what: &str) -> Result<(), Vec<Diagnostic>> {
    let missing: Vec<Diagnostic> = names
        .iter()
        .filter(|n| !members.iter().any(|m| matches!(m, Member::Method(d) if &d.name == *n && d.body.is_some())))
        .map(|n| Diagnostic::error(owner, format!("{owner} has no body for {what} {n}")))
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(missing)
    }
}

fn generated_ctor(name: &str, members: &[Member]) -> CtorDecl {
    let fields: Vec<(&Type, &str)> = members
        .iter()
        .filter_map(|m| match m {
            Member::Field(f) => Some((&f.ty, f.name.as_str())),
            _ => None,
        })
        .collect();
    CtorDecl {
        comment: Vec::new(),
        vis: Visibility::Public,
        name: name.to_string(),
        params: fields.iter().map(|(t, n)| Param::new((*t).clone(), *n)).collect(),
        assigns: fields.iter().map(|(_, n)| (n.to_string(), n.to_string())).collect(),
    }
}

fn checked(p: Program) -> Result<Program, Vec<Diagnostic>> {
    let errors: Vec<Diagnostic> = typecheck(&p).into_iter().filter(Diagnostic::is_error).collect();
    if errors.is_empty() {
        Ok(p)
    } else {
        Err(errors)
    }
}

/// Applies one evolution, refusing it when the current form would force
/// the change to spread over several classes.
pub fn apply_evolution(p: &Program, step: &EvolutionStep) -> Result<Program, Vec<Diagnostic>> {
    match step {
        EvolutionStep::AddSubtype { name, members } => {
            let h = in_form(p, StructureClass::DataOriented)?;
            fresh(p, name)?;
            let ops: Vec<String> = h.operations.iter().map(|o| o.name.clone()).collect();
            require_methods(members, &ops, name, "operation")?;
            let mut c = ClassDecl::new(name.clone());
            c.extends = Some(h.root.clone());
            c.members = members.clone();
            if c.ctor().is_none() {
                c.members.push(Member::Ctor(generated_ctor(name, members)));
            }
            let mut out = p.clone();
            out.decls.push(Decl::Class(c));
            checked(out)
        }
        EvolutionStep::AddOperation { name, ret, members } => {
            let h = in_form(p, StructureClass::FunctionOriented)?;
            let (Some(vi), Some(accept)) = (&h.visitor_interface, &h.accept) else {
                return Err(fail("", NOT_MODULAR));
            };
            let v = visitor_class(name);
            fresh(p, &v)?;
            if h.operation(name).is_some() || p.class(&h.root).is_some_and(|r| r.method(name).is_some()) {
                return Err(fail(&h.root, format!("{} already has an operation {name}", h.root)));
            }
            let visits: Vec<String> = h.subtypes.iter().map(|s| h.visit_methods[s].clone()).collect();
            require_methods(members, &visits, &v, "visit method")?;
            let mut c = ClassDecl::new(v.clone());
            c.implements = Some(Type::generic(vi.clone(), ret.clone()));
            c.members = members.clone();
            let facade = MethodDecl {
                comment: Vec::new(),
                vis: Visibility::Public,
                is_abstract: false,
                type_param: None,
                ret: ret.clone(),
                name: name.clone(),
                params: Vec::new(),
                body: Some(vec![Stmt::Return(Expr::call(Expr::This, accept.clone(), vec![Expr::new_obj(v, vec![])]))]),
            };
            let mut out = p.clone();
            let root = out.class_mut(&h.root).expect("detected root exists");
            let at = root
                .members
                .iter()
                .position(|m| matches!(m, Member::Method(d) if d.name == *accept || d.name == ACCEPT))
                .unwrap_or(root.members.len());
            root.members.insert(at, Member::Method(facade));
            out.decls.push(Decl::Class(c));
            checked(out)
        }
        EvolutionStep::EditClass { name, members } => {
            let mut out = p.clone();
            let Some(c) = out.class_mut(name) else {
                return Err(fail(name, format!("no class named {name}")));
            };
            c.members = members.clone();
            checked(out)
        }
    }
}

/// Which declarations changed between two programs, compared on their
/// canonical text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Footprint {
    /// Existing declarations whose text changed, with inserted and deleted
    /// line counts.
    pub modified: Vec<(String, usize, usize)>,
    pub added: Vec<String>,
    pub removed: Vec<String>,
}

impl Footprint {
    pub fn touched(&self) -> usize {
        self.modified.len() + self.added.len() + self.removed.len()
    }

    /// At most one existing declaration changed and at most one added,
    /// nothing removed.
    pub fn is_modular(&self) -> bool {
        self.modified.len() <= 1 && self.added.len() <= 1 && self.removed.is_empty()
    }
}

impl fmt::Display for Footprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.modified.iter().map(|(n, ins, del)| format!("{n} (+{ins} -{del})")).collect();
        parts.extend(self.added.iter().map(|n| format!("{n} (new)")));
        parts.extend(self.removed.iter().map(|n| format!("{n} (removed)")));
        if parts.is_empty() {
            f.write_str("nothing")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}

fn decl_texts(p: &Program) -> BTreeMap<&str, String> {
    p.decls.iter().map(|d| (d.name(), pretty(&Program::new(vec![d.clone()])))).collect()
}

pub fn footprint(before: &Program, after: &Program) -> Footprint {
    let old = decl_texts(before);
    let new = decl_texts(after);
    let mut fp = Footprint::default();
    for d in &after.decls {
        let n = d.name();
        match old.get(n) {
            None => fp.added.push(n.to_string()),
            Some(text) if *text != new[n] => {
                let diff = similar::TextDiff::from_lines(text.as_str(), new[n].as_str());
                let (mut ins, mut del) = (0, 0);
                for c in diff.iter_all_changes() {
                    match c.tag() {
                        similar::ChangeTag::Insert => ins += 1,
                        similar::ChangeTag::Delete => del += 1,
                        similar::ChangeTag::Equal => {}
                    }
                }
                fp.modified.push((n.to_string(), ins, del));
            }
            Some(_) => {}
        }
    }
    fp.removed = before.decls.iter().map(|d| d.name().to_string()).filter(|n| !new.contains_key(n.as_str())).collect();
    fp
}
