use crate::lang::{
    parse_sig, parse_sig_with, Diagnostic, Expr, MethodDecl, MethodSig, Param, Program, Stmt, Type, Visibility,
};
use crate::lens::{classify, coverage_matrix, detect_hierarchy, HierarchyInfo, StructureClass};
use crate::refactor::{
    apply_op, check_preconditions, getter_name, trivial_getter_field, BodyRewrite, MethodPath, Plan, ReceiverSwap,
    RefactoringOp,
};

use super::naming::*;

fn diag(msg: impl Into<String>) -> Vec<Diagnostic> {
    vec![Diagnostic::error("", msg)]
}

fn method(ret: Type, name: &str, params: Vec<Param>, body: Vec<Stmt>) -> MethodDecl {
    MethodDecl {
        comment: Vec::new(),
        vis: Visibility::Public,
        is_abstract: false,
        type_param: None,
        ret,
        name: name.to_string(),
        params,
        body: Some(body),
    }
}

fn reads_own_field(m: &MethodDecl, field: &str) -> bool {
    let mut hit = false;
    for s in m.body.iter().flatten() {
        s.expr().walk(&mut |e| {
            if matches!(e, Expr::Field(t, f) if **t == Expr::This && f == field) {
                hit = true;
            }
        });
    }
    hit
}

fn require(p: &Program, want: StructureClass, what: &str) -> Result<HierarchyInfo, Vec<Diagnostic>> {
    let h = detect_hierarchy(p)?;
    if classify(&coverage_matrix(p, &h)) != want {
        return Err(diag(format!("program is not {what}")));
    }
    Ok(h)
}

/// Composite → Visitor. Builds the plan from the program's structure; the
/// naming headroom is checked against the finished plan so a clash can name
/// the step it would break.
pub fn plan_to_visitor(p: &Program) -> Result<Plan, Vec<Diagnostic>> {
    let h = require(p, StructureClass::DataOriented, "data-oriented")?;
    let root = p.class(&h.root).expect("detected root exists");
    let mut diags = Vec::new();
    for op in &h.operations {
        if op.ret == Type::Void {
            diags.push(Diagnostic::error(
                format!("{}.{}", h.root, op.name),
                format!("operation {} returns void and cannot be a visitor result", op.name),
            ));
        }
    }
    let mut plan = Plan::new("to-visitor");
    plan.push(RefactoringOp::CreateInterface { name: VISITOR.into(), type_param: Some(TYPE_VAR.into()) });
    for s in &h.subtypes {
        let sig = parse_sig_with(&format!("{TYPE_VAR} {}({s} {})", visit_method(s), visit_param(s)), &[TYPE_VAR]);
        match sig {
            Ok(sig) => plan.push(RefactoringOp::AddAbstractMethod { owner: VISITOR.into(), vis: Visibility::Public, sig }),
            Err(_) => diags.push(Diagnostic::error(s, format!("subtype {s} does not yield a usable visit method name"))),
        }
    }
    let accept_sig =
        parse_sig(&format!("<{TYPE_VAR}> {TYPE_VAR} {ACCEPT}({VISITOR}<{TYPE_VAR}> {VISITOR_PARAM})")).expect("fixed signature");
    plan.push(RefactoringOp::AddAbstractMethod { owner: h.root.clone(), vis: Visibility::Public, sig: accept_sig.clone() });
    for s in &h.subtypes {
        let call = Expr::call(Expr::var(VISITOR_PARAM), visit_method(s), vec![Expr::This]);
        plan.push(RefactoringOp::AddMethod {
            class: s.clone(),
            method: MethodDecl {
                type_param: accept_sig.type_param.clone(),
                ..method(accept_sig.ret.clone(), ACCEPT, accept_sig.params.clone(), vec![Stmt::Return(call)])
            },
        });
    }

    // Fields read by business code become reachable through getters.
    let mut getters: Vec<Vec<(String, String)>> = Vec::new();
    for s in &h.subtypes {
        let c = p.class(s).expect("subtype exists");
        let mut gs = Vec::new();
        for f in c.fields().filter(|f| f.vis != Visibility::Public) {
            let read = h.operations.iter().filter_map(|o| c.method(&o.name)).any(|m| reads_own_field(m, &f.name));
            if !read {
                continue;
            }
            let g = getter_name(&f.name);
            if c.method(&g).is_some() {
                diags.push(Diagnostic::error(
                    format!("{s}.{}", f.name),
                    format!("cannot encapsulate {s}.{}: method {g} already exists", f.name),
                ));
            }
            plan.push(RefactoringOp::EncapsulateField { class: s.clone(), field: f.name.clone() });
            gs.push((f.name.clone(), g));
        }
        getters.push(gs);
    }

    for op in &h.operations {
        let v = visitor_class(&op.name);
        plan.push(RefactoringOp::CreateClass {
            name: v.clone(),
            is_abstract: false,
            extends: None,
            implements: Some(Type::generic(VISITOR, op.ret.clone())),
        });
        for (s, gs) in h.subtypes.iter().zip(&getters) {
            let param = visit_param(s);
            let visit = visit_method(s);
            let placeholder = Stmt::Return(Expr::call(Expr::var(&param), op.name.clone(), vec![]));
            plan.push(RefactoringOp::AddMethod {
                class: v.clone(),
                method: method(op.ret.clone(), &visit, vec![Param::new(Type::named(s.clone()), param.clone())], vec![placeholder]),
            });
            plan.push(RefactoringOp::MoveMethodBody {
                from: MethodPath::new(s.clone(), op.name.clone()),
                to: MethodPath::new(v.clone(), visit),
                rewrite: BodyRewrite {
                    receiver: ReceiverSwap::ThisToParam(param),
                    getters: gs.clone(),
                    recursion: Some((h.root.clone(), op.name.clone())),
                },
            });
        }
        // The facade keeps `e.op()` callers working before the subtype
        // copies go away.
        let call = Expr::call(Expr::This, ACCEPT, vec![Expr::new_obj(v.clone(), vec![])]);
        plan.push(RefactoringOp::AddDelegatingMethod {
            class: h.root.clone(),
            method: op.name.clone(),
            body: vec![Stmt::Return(call)],
        });
        for s in &h.subtypes {
            plan.push(RefactoringOp::DeleteMethod { class: s.clone(), method: op.name.clone() });
        }
    }

    let family = std::iter::once(root).chain(h.subtypes.iter().filter_map(|s| p.class(s)));
    for c in family {
        if c.method(ACCEPT).is_some() {
            diags.push(Diagnostic::error(&c.name, format!("naming clash: {} already declares {ACCEPT}", c.name)));
        }
    }
    for (i, step) in plan.steps.iter().enumerate() {
        let created = match step {
            RefactoringOp::CreateClass { name, .. } | RefactoringOp::CreateInterface { name, .. } => name,
            _ => continue,
        };
        if p.decl(created).is_some() {
            diags.push(Diagnostic::error(
                created,
                format!("naming clash: {created} is already declared; step {i} ({step}) would fail"),
            ));
        }
    }
    if diags.is_empty() {
        Ok(plan)
    } else {
        Err(diags)
    }
}

/// Visitor → Composite, recovered from the visitor shape and the naming
/// scheme alone.
pub fn plan_to_composite(p: &Program) -> Result<Plan, Vec<Diagnostic>> {
    let h = detect_hierarchy(p)?;
    let (Some(vi), Some(accept)) = (h.visitor_interface.clone(), h.accept.clone()) else {
        return Err(diag("program is not function-oriented"));
    };
    let mut diags = Vec::new();
    for op in &h.operations {
        let Some(c) = h.visitor_classes.get(&op.name).and_then(|v| p.class(v)) else { continue };
        let missing: Vec<&str> =
            h.subtypes.iter().filter(|s| c.method(&h.visit_methods[*s]).is_none()).map(String::as_str).collect();
        if !missing.is_empty() {
            diags.push(Diagnostic::error(
                &c.name,
                format!("incomplete visitor {}: no case for {}", c.name, missing.join(", ")),
            ));
        }
        if c.fields().next().is_some() {
            diags.push(Diagnostic::error(&c.name, format!("visitor {} has state fields", c.name)));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let h = require(p, StructureClass::FunctionOriented, "function-oriented")?;
    let root = p.class(&h.root).expect("detected root exists");

    let getters: Vec<Vec<(String, String)>> = h
        .subtypes
        .iter()
        .map(|s| {
            let c = p.class(s).expect("subtype exists");
            c.methods().filter_map(|m| trivial_getter_field(c, m).map(|f| (f.to_string(), m.name.clone()))).collect()
        })
        .collect();

    let mut plan = Plan::new("to-composite");
    for op in &h.operations {
        let v = &h.visitor_classes[&op.name];
        let vc = p.class(v).expect("visitor class exists");
        for s in &h.subtypes {
            let call = Expr::call(Expr::new_obj(v.clone(), vec![]), h.visit_methods[s].clone(), vec![Expr::This]);
            plan.push(RefactoringOp::AddMethod { class: s.clone(), method: method(op.ret.clone(), &op.name, vec![], vec![Stmt::Return(call)]) });
        }
        let facade = root.method(&op.name);
        plan.push(RefactoringOp::AddAbstractMethod {
            owner: h.root.clone(),
            vis: facade.map_or(Visibility::Public, |m| m.vis),
            sig: MethodSig { comment: Vec::new(), type_param: None, ret: op.ret.clone(), name: op.name.clone(), params: vec![] },
        });
        for (s, gs) in h.subtypes.iter().zip(&getters) {
            let visit = &h.visit_methods[s];
            let param = vc.method(visit).and_then(|m| m.params.first()).map_or_else(|| visit_param(s), |p| p.name.clone());
            plan.push(RefactoringOp::MoveMethodBody {
                from: MethodPath::new(v.clone(), visit.clone()),
                to: MethodPath::new(s.clone(), op.name.clone()),
                rewrite: BodyRewrite {
                    receiver: ReceiverSwap::ParamToThis(param),
                    getters: gs.clone(),
                    recursion: Some((h.root.clone(), op.name.clone())),
                },
            });
        }
        plan.push(RefactoringOp::DeleteDeclaration { name: v.clone() });
    }
    for s in &h.subtypes {
        if p.class(s).is_some_and(|c| c.method(&accept).is_some()) {
            plan.push(RefactoringOp::DeleteMethod { class: s.clone(), method: accept.clone() });
        }
    }
    plan.push(RefactoringOp::DeleteMethod { class: h.root.clone(), method: accept });
    plan.push(RefactoringOp::DeleteDeclaration { name: vi });

    // Getters go back to field reads where every remaining call site can see
    // the field; the rest stay. Deciding that needs the program as it will
    // be at this point, so replay the plan so far. If the replay fails the
    // plan is returned as is and the executor reports the failing step.
    let mut scratch = p.clone();
    for op in &plan.steps {
        match apply_op(op, &scratch) {
            Ok(next) => scratch = next,
            Err(_) => return Ok(plan),
        }
    }
    for (s, gs) in h.subtypes.iter().zip(&getters) {
        for (_, g) in gs {
            let op = RefactoringOp::InlineTrivialGetter { class: s.clone(), getter: g.clone() };
            if check_preconditions(&op, &scratch).is_empty() {
                scratch = apply_op(&op, &scratch).expect("checked above");
                plan.push(op);
            }
        }
    }
    Ok(plan)
}
