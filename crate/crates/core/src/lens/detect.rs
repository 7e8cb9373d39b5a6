use std::collections::{BTreeMap, BTreeSet};

use crate::lang::{ClassDecl, Decl, Diagnostic, Expr, MethodDecl, Program, Stmt, Symbols, Type};

/// An operation of the hierarchy: a method name and its result type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operation {
    pub name: String,
    pub ret: Type,
}

/// The hierarchy/operation structure found in a program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyInfo {
    pub root: String,
    /// Concrete descendants of the root, in declaration order.
    pub subtypes: Vec<String>,
    pub operations: Vec<Operation>,
    pub visitor_interface: Option<String>,
    /// Operation name to the class implementing it as a visitor.
    pub visitor_classes: BTreeMap<String, String>,
    /// Subtype to the visitor interface method that handles it.
    pub visit_methods: BTreeMap<String, String>,
    /// Name of the double-dispatch method on the root, if any.
    pub accept: Option<String>,
    /// Operations whose root method forwards to `accept`.
    pub facades: BTreeSet<String>,
}

impl HierarchyInfo {
    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.operations.iter().find(|o| o.name == name)
    }
}

/// Visitor class name to the operation name it implements when there is no
/// facade: `CheckVisitor` → `check`.
pub fn operation_for_visitor(class: &str) -> String {
    let base = class.strip_suffix("Visitor").filter(|b| !b.is_empty()).unwrap_or(class);
    let mut cs = base.chars();
    match cs.next() {
        Some(c) => format!("{}{}", c.to_lowercase(), cs.as_str()),
        None => String::new(),
    }
}

/// The visitor class `V` if `m`'s body is exactly `return this.accept(new V());`.
pub fn facade_target<'m>(m: &'m MethodDecl, accept: &str) -> Option<&'m str> {
    match m.body.as_deref() {
        Some([Stmt::Return(Expr::Call(t, callee, args))]) if **t == Expr::This && callee == accept => match args.as_slice() {
            [Expr::New(v, ctor_args)] if ctor_args.is_empty() => Some(v),
            _ => None,
        },
        _ => None,
    }
}

fn err(msg: impl Into<String>) -> Vec<Diagnostic> {
    vec![Diagnostic::error("", msg)]
}

fn is_accept_shape(m: &MethodDecl, iface: &str) -> bool {
    m.type_param.is_some() && m.params.len() == 1 && m.params[0].ty.class_name() == Some(iface)
}

/// Finds the root, subtypes, operations and (if present) the visitor
/// machinery. Declaration order does not matter beyond the order of lists.
pub fn detect_hierarchy(p: &Program) -> Result<HierarchyInfo, Vec<Diagnostic>> {
    let syms = Symbols::new(p);
    let concrete_below = |root: &str| -> Vec<String> {
        p.classes()
            .filter(|c| !c.is_abstract && c.name != root && syms.is_subclass(&c.name, root))
            .map(|c| c.name.clone())
            .collect()
    };
    let roots: Vec<&ClassDecl> = p
        .classes()
        .filter(|c| c.is_abstract && c.extends.is_none() && !concrete_below(&c.name).is_empty())
        .collect();
    let root = match roots.as_slice() {
        [] => return Err(err("no hierarchy root found")),
        [r] => *r,
        many => {
            let names: Vec<&str> = many.iter().map(|c| c.name.as_str()).collect();
            return Err(err(format!("multiple candidate hierarchies: {}", names.join(", "))));
        }
    };
    let subtypes = concrete_below(&root.name);
    let subtype_set: BTreeSet<&str> = subtypes.iter().map(String::as_str).collect();

    // Visitor interface: generic, every method takes exactly one subtype.
    let mut full = Vec::new();
    let mut diags = Vec::new();
    for i in p.decls.iter().filter_map(Decl::as_interface) {
        let Some(tp) = &i.type_param else { continue };
        let mut covered = BTreeMap::new();
        let shaped = !i.sigs.is_empty()
            && i.sigs.iter().all(|s| {
                let one_subtype = match s.params.as_slice() {
                    [param] => match &param.ty {
                        Type::Named(n, None) if subtype_set.contains(n.as_str()) => {
                            covered.insert(n.clone(), s.name.clone());
                            true
                        }
                        _ => false,
                    },
                    _ => false,
                };
                one_subtype && s.ret == Type::Var(tp.clone()) && s.type_param.is_none()
            });
        if !shaped {
            continue;
        }
        let missing: Vec<&str> = subtypes.iter().filter(|s| !covered.contains_key(*s)).map(String::as_str).collect();
        if missing.is_empty() && covered.len() == i.sigs.len() {
            full.push((i.name.clone(), covered));
        } else if !missing.is_empty() {
            diags.push(Diagnostic::error(
                &i.name,
                format!("partial visitor shape: {} has no visit method for {}", i.name, missing.join(", ")),
            ));
        }
    }
    if full.len() > 1 {
        let names: Vec<&str> = full.iter().map(|(n, _)| n.as_str()).collect();
        diags.push(Diagnostic::error("", format!("multiple visitor interfaces: {}", names.join(", "))));
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let (visitor_interface, visit_methods) = match full.pop() {
        Some((n, m)) => (Some(n), m),
        None => (None, BTreeMap::new()),
    };

    let accept = match &visitor_interface {
        None => None,
        Some(vi) => match root.methods().find(|m| is_accept_shape(m, vi)) {
            Some(m) => Some(m.name.clone()),
            None => {
                return Err(err(format!(
                    "visitor interface {vi} found but {} declares no accept method",
                    root.name
                )))
            }
        },
    };

    let mut visitor_classes = BTreeMap::new();
    let mut operations = Vec::new();
    let mut facades = BTreeSet::new();
    let visitor_impls: Vec<&ClassDecl> = match &visitor_interface {
        Some(vi) => p
            .classes()
            .filter(|c| !c.is_abstract && c.implements.as_ref().and_then(Type::class_name) == Some(vi.as_str()))
            .collect(),
        None => Vec::new(),
    };
    let is_visitor = |n: &str| visitor_impls.iter().any(|c| c.name == n);

    for m in root.methods() {
        if Some(&m.name) == accept.as_ref() {
            continue;
        }
        if m.body.is_none() {
            operations.push(Operation { name: m.name.clone(), ret: m.ret.clone() });
        } else if let Some(v) = accept.as_deref().and_then(|a| facade_target(m, a)).filter(|v| is_visitor(v)) {
            operations.push(Operation { name: m.name.clone(), ret: m.ret.clone() });
            facades.insert(m.name.clone());
            if visitor_classes.insert(m.name.clone(), v.to_string()).is_some() {
                return Err(err(format!("operation {} has more than one visitor class", m.name)));
            }
        }
    }
    for v in &visitor_impls {
        if visitor_classes.values().any(|c| c == &v.name) {
            continue;
        }
        let op = operation_for_visitor(&v.name);
        if visitor_classes.contains_key(&op) || root.method(&op).is_some() {
            return Err(err(format!("visitor class {} clashes with operation {op}", v.name)));
        }
        let ret = match &v.implements {
            Some(Type::Named(_, Some(arg))) => (**arg).clone(),
            _ => Type::Void,
        };
        operations.push(Operation { name: op.clone(), ret });
        visitor_classes.insert(op, v.name.clone());
    }
    if operations.is_empty() {
        return Err(err(format!("hierarchy {} has no operations", root.name)));
    }
    Ok(HierarchyInfo {
        root: root.name.clone(),
        subtypes,
        operations,
        visitor_interface,
        visitor_classes,
        visit_methods,
        accept,
        facades,
    })
}
