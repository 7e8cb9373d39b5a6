use super::*;
use crate::interp::{evaluate, Value};
use crate::lang::{parse, parse_expr, parse_method, parse_sig, parse_sig_with, parse_stmts, pretty, typecheck, Type, Visibility};

const PDATA: &str = include_str!("../../fixtures/pdata.mj");

fn pdata() -> crate::lang::Program {
    parse(PDATA).unwrap()
}

fn eval(p: &crate::lang::Program, entry: &str) -> Value {
    evaluate(p, &parse_expr(entry).unwrap()).unwrap()
}

const SUM: &str = "new Add(new Num(1), new Num(2)).eval()";

#[test]
fn create_class_rejects_taken_name() {
    let mut p = pdata();
    p = apply_op(
        &RefactoringOp::CreateClass { name: "EvalVisitor".into(), is_abstract: false, extends: None, implements: None },
        &p,
    )
    .unwrap();
    let again = RefactoringOp::CreateClass { name: "EvalVisitor".into(), is_abstract: false, extends: None, implements: None };
    let vs = check_preconditions(&again, &p);
    assert_eq!(vs.len(), 1);
    assert_eq!(vs[0].rule, Rule::NameUnused);
    assert_eq!(vs[0].message, "name EvalVisitor already declared");
}

#[test]
fn delete_method_with_live_call_sites() {
    let op = RefactoringOp::DeleteMethod { class: "Num".into(), method: "eval".into() };
    let vs = check_preconditions(&op, &pdata());
    assert!(vs.iter().any(|v| v.rule == Rule::LiveCallSites && v.message.contains("live call sites")), "{vs:?}");
    let err = apply_op(&op, &pdata()).unwrap_err();
    assert!(!err.is_empty());
}

#[test]
fn delete_unreferenced_method_succeeds() {
    let p = parse("class A { public int f() { return 1; } public int g() { return 2; } }").unwrap();
    let op = RefactoringOp::DeleteMethod { class: "A".into(), method: "g".into() };
    let out = apply_op(&op, &p).unwrap();
    assert!(out.class("A").unwrap().method("g").is_none());
}

#[test]
fn rename_method_renames_family_and_calls() {
    let p = pdata();
    let op = RefactoringOp::RenameDeclaration {
        target: RenameTarget::Method(MethodPath::new("Expr", "eval")),
        new_name: "evaluate".into(),
    };
    let out = apply_op(&op, &p).unwrap();
    for c in ["Expr", "Num", "Add"] {
        let class = out.class(c).unwrap();
        assert!(class.method("evaluate").is_some(), "{c}");
        assert!(class.method("eval").is_none(), "{c}");
    }
    assert!(!pretty(&out).contains(".eval("));
    assert!(typecheck(&out).is_empty());
    assert_eq!(eval(&out, "new Add(new Num(1), new Num(2)).evaluate()"), Value::Int(3));
    // comments stay attached
    assert_eq!(out.comments(), p.comments());

    let back = RefactoringOp::RenameDeclaration {
        target: RenameTarget::Method(MethodPath::new("Num", "evaluate")),
        new_name: "eval".into(),
    };
    assert_eq!(apply_op(&back, &out).unwrap(), p);
}

#[test]
fn rename_method_to_taken_name_is_rejected() {
    let op = RefactoringOp::RenameDeclaration {
        target: RenameTarget::Method(MethodPath::new("Add", "eval")),
        new_name: "show".into(),
    };
    let vs = check_preconditions(&op, &pdata());
    assert!(vs.iter().all(|v| v.rule == Rule::NameUnused) && !vs.is_empty());
}

#[test]
fn rename_type_and_field_round_trip() {
    let p = pdata();
    let t = RefactoringOp::RenameDeclaration { target: RenameTarget::Type("Num".into()), new_name: "Lit".into() };
    let out = apply_op(&t, &p).unwrap();
    assert!(typecheck(&out).is_empty());
    assert_eq!(eval(&out, "new Add(new Lit(4), new Lit(2)).eval()"), Value::Int(6));
    let back = RefactoringOp::RenameDeclaration { target: RenameTarget::Type("Lit".into()), new_name: "Num".into() };
    assert_eq!(apply_op(&back, &out).unwrap(), p);

    let f = RefactoringOp::RenameDeclaration {
        target: RenameTarget::Field { class: "Add".into(), field: "left".into() },
        new_name: "lhs".into(),
    };
    let out = apply_op(&f, &p).unwrap();
    assert!(typecheck(&out).is_empty());
    assert!(pretty(&out).contains("this.lhs = left;"));
    assert_eq!(eval(&out, SUM), Value::Int(3));
}

const HOLDER: &str = "\
class Num {
    int value;

    Num(int value) {
        this.value = value;
    }
}

class Box {
    public int twice(Num n) {
        return n.value + n.value;
    }
}
";

#[test]
fn encapsulate_then_inline_is_identity() {
    let p = parse(HOLDER).unwrap();
    let enc = RefactoringOp::EncapsulateField { class: "Num".into(), field: "value".into() };
    let out = apply_op(&enc, &p).unwrap();
    let getter = out.class("Num").unwrap().method("getValue").unwrap();
    assert_eq!(getter.vis, Visibility::Public);
    assert_eq!(getter.ret, Type::Int);
    assert!(pretty(&out).contains("return n.getValue() + n.getValue();"));
    assert!(typecheck(&out).is_empty());

    let inl = RefactoringOp::InlineTrivialGetter { class: "Num".into(), getter: "getValue".into() };
    assert_eq!(apply_op(&inl, &out).unwrap(), p);
}

#[test]
fn encapsulate_rejects_existing_getter() {
    let p = parse(HOLDER).unwrap();
    let enc = RefactoringOp::EncapsulateField { class: "Num".into(), field: "value".into() };
    let once = apply_op(&enc, &p).unwrap();
    let vs = check_preconditions(&enc, &once);
    assert_eq!(vs.len(), 1);
    assert_eq!(vs[0].rule, Rule::GetterExists);
}

#[test]
fn inline_rejects_nontrivial_getter_and_private_field() {
    let p = parse(
        "class A { private int x; A(int x) { this.x = x; } public int getX() { return this.x + 1; } public int getY() { return this.x; } }
         class B { public int f(A a) { return a.getY(); } }",
    )
    .unwrap();
    let vs = check_preconditions(&RefactoringOp::InlineTrivialGetter { class: "A".into(), getter: "getX".into() }, &p);
    assert_eq!(vs[0].rule, Rule::NotTrivialGetter);
    let vs = check_preconditions(&RefactoringOp::InlineTrivialGetter { class: "A".into(), getter: "getY".into() }, &p);
    assert_eq!(vs.len(), 1);
    assert_eq!(vs[0].rule, Rule::CallSiteInaccessible);
}

#[test]
fn change_visibility_guards_access() {
    let p = parse(HOLDER).unwrap();
    let op = RefactoringOp::ChangeVisibility {
        class: "Num".into(),
        kind: MemberKind::Field,
        member: "value".into(),
        vis: Visibility::Private,
    };
    let vs = check_preconditions(&op, &p);
    assert_eq!(vs.len(), 1);
    assert_eq!(vs[0].rule, Rule::VisibilityBreaksAccess);
    let public = RefactoringOp::ChangeVisibility {
        class: "Num".into(),
        kind: MemberKind::Field,
        member: "value".into(),
        vis: Visibility::Public,
    };
    let out = apply_op(&public, &p).unwrap();
    assert_eq!(out.class("Num").unwrap().field("value").unwrap().vis, Visibility::Public);
}

#[test]
fn delete_declaration_requires_no_references() {
    let p = parse(HOLDER).unwrap();
    let vs = check_preconditions(&RefactoringOp::DeleteDeclaration { name: "Num".into() }, &p);
    assert_eq!(vs[0].rule, Rule::ReferencesRemain);
    let out = apply_op(&RefactoringOp::DeleteDeclaration { name: "Box".into() }, &p).unwrap();
    assert_eq!(out.decls.len(), 1);
    let commented = parse("// keep\nclass A {}").unwrap();
    let vs = check_preconditions(&RefactoringOp::DeleteDeclaration { name: "A".into() }, &commented);
    assert_eq!(vs[0].rule, Rule::CommentPreserved);
}

/// The visitor machinery for P_data built by hand, up to the point where
/// bodies can move.
fn visitor_setup() -> Plan {
    let mut plan = Plan::new("setup");
    plan.push(RefactoringOp::CreateInterface { name: "Visitor".into(), type_param: Some("T".into()) });
    for (s, p) in [("Num", "num"), ("Add", "add")] {
        plan.push(RefactoringOp::AddAbstractMethod {
            owner: "Visitor".into(),
            vis: Visibility::Public,
            sig: parse_sig_with(&format!("T visit{s}({s} {p})"), &["T"]).unwrap(),
        });
    }
    plan.push(RefactoringOp::AddAbstractMethod {
        owner: "Expr".into(),
        vis: Visibility::Public,
        sig: parse_sig("<T> T accept(Visitor<T> v)").unwrap(),
    });
    for (s, p) in [("Num", "num"), ("Add", "add")] {
        plan.push(RefactoringOp::AddMethod {
            class: s.into(),
            method: parse_method(&format!("public <T> T accept(Visitor<T> v) {{ return v.visit{s}(this); }}")).unwrap(),
        });
        let _ = p;
    }
    for (c, f) in [("Num", "value"), ("Add", "left"), ("Add", "right")] {
        plan.push(RefactoringOp::EncapsulateField { class: c.into(), field: f.into() });
    }
    plan.push(RefactoringOp::CreateClass {
        name: "EvalVisitor".into(),
        is_abstract: false,
        extends: None,
        implements: Some(Type::generic("Visitor", Type::Int)),
    });
    plan
}

fn move_eval(plan: &mut Plan) {
    for (s, p, getters) in [("Num", "num", vec![("value", "getValue")]), ("Add", "add", vec![("left", "getLeft"), ("right", "getRight")])] {
        plan.push(RefactoringOp::AddMethod {
            class: "EvalVisitor".into(),
            method: parse_method(&format!("public int visit{s}({s} {p}) {{ return {p}.eval(); }}")).unwrap(),
        });
        plan.push(RefactoringOp::MoveMethodBody {
            from: MethodPath::new(s, "eval"),
            to: MethodPath::new("EvalVisitor", format!("visit{s}")),
            rewrite: BodyRewrite {
                receiver: ReceiverSwap::ThisToParam(p.into()),
                getters: getters.into_iter().map(|(f, g)| (f.to_string(), g.to_string())).collect(),
                recursion: Some(("Expr".into(), "eval".into())),
            },
        });
    }
}

#[test]
fn move_body_rewrites_receiver_and_recursion() {
    let mut plan = visitor_setup();
    move_eval(&mut plan);
    // show has not moved yet, so ShowVisitor does not exist: the endpoint
    // still type-checks because every class stays complete.
    let report = apply_plan(&plan, &pdata());
    let out = report.program().unwrap_or_else(|| panic!("{:?}", report.violations()));
    let text = pretty(out);
    assert!(text.contains("return add.getLeft().accept(this) + add.getRight().accept(this);"), "{text}");
    assert!(text.contains("return new EvalVisitor().visitAdd(this);"));
    // the comment of Add.eval travels with the body
    let moved = out.class("EvalVisitor").unwrap().method("visitAdd").unwrap();
    assert_eq!(moved.comment, pdata().class("Add").unwrap().method("eval").unwrap().comment);
    assert_eq!(eval(out, SUM), Value::Int(3));
    assert_eq!(out.comments().len(), pdata().comments().len());
}

#[test]
fn move_back_restores_body() {
    let mut plan = visitor_setup();
    move_eval(&mut plan);
    let there = apply_plan(&plan, &pdata()).into_program().unwrap();
    let back = RefactoringOp::MoveMethodBody {
        from: MethodPath::new("EvalVisitor", "visitAdd"),
        to: MethodPath::new("Add", "eval"),
        rewrite: BodyRewrite {
            receiver: ReceiverSwap::ParamToThis("add".into()),
            getters: vec![("left".into(), "getLeft".into()), ("right".into(), "getRight".into())],
            recursion: Some(("Expr".into(), "eval".into())),
        },
    };
    let out = apply_op(&back, &there).unwrap();
    assert_eq!(out.class("Add").unwrap().method("eval"), pdata().class("Add").unwrap().method("eval"));
    assert_eq!(pretty_method(&out, "EvalVisitor", "visitAdd"), "public int visitAdd(Add add) { return add.eval(); }");
}

fn pretty_method(p: &crate::lang::Program, c: &str, m: &str) -> String {
    crate::lang::pretty::method_inline(p.class(c).unwrap().method(m).unwrap())
}

#[test]
fn move_into_stateful_class_is_rejected() {
    let mut plan = visitor_setup();
    move_eval(&mut plan);
    let there = apply_plan(&plan, &pdata()).into_program().unwrap();
    // moving Num.show into Add would need `new Add()`, which has fields
    let op = RefactoringOp::MoveMethodBody {
        from: MethodPath::new("Num", "show"),
        to: MethodPath::new("Add", "show"),
        rewrite: BodyRewrite { receiver: ReceiverSwap::ThisToParam("num".into()), getters: vec![], recursion: None },
    };
    let vs = check_preconditions(&op, &there);
    assert!(!vs.is_empty());
    assert!(vs.iter().any(|v| v.rule == Rule::SignatureCompatible));
}

#[test]
fn empty_plan_is_identity() {
    let p = pdata();
    let report = apply_plan(&Plan::new("noop"), &p);
    assert_eq!(report.program(), Some(&p));
    assert_eq!(report.steps_executed, 0);
}

#[test]
fn failing_plan_exposes_no_program() {
    let p = pdata();
    let before = pretty(&p);
    let mut plan = Plan::new("broken");
    plan.push(RefactoringOp::CreateClass { name: "EvalVisitor".into(), is_abstract: false, extends: None, implements: None });
    plan.push(RefactoringOp::CreateInterface { name: "Extra".into(), type_param: None });
    plan.push(RefactoringOp::CreateClass { name: "EvalVisitor".into(), is_abstract: false, extends: None, implements: None });
    let report = apply_plan(&plan, &p);
    assert!(report.program().is_none());
    assert_eq!(report.steps_executed, 2);
    assert_eq!(report.violations()[0].step, 2);
    assert_eq!(report.violations()[0].op, "CreateClass");
    assert_eq!(pretty(&p), before);
}

#[test]
fn endpoint_must_typecheck() {
    let mut plan = Plan::new("dangling");
    plan.push(RefactoringOp::AddAbstractMethod {
        owner: "Expr".into(),
        vis: Visibility::Public,
        sig: parse_sig("int size()").unwrap(),
    });
    let report = apply_plan(&plan, &pdata());
    assert!(report.violations().iter().all(|v| v.rule == Rule::EndpointTypeSafety));
    assert_eq!(report.violations().len(), 2);
}

#[test]
fn delegating_method_fills_abstract_body() {
    let p = parse(
        "abstract class A { public abstract int f(); public int g() { return 2; } }
         class B extends A { B() {} public int f() { return 1; } }",
    )
    .unwrap();
    let op = RefactoringOp::AddDelegatingMethod {
        class: "A".into(),
        method: "f".into(),
        body: parse_stmts("return this.g();", &[]).unwrap(),
    };
    let out = apply_op(&op, &p).unwrap();
    assert!(out.class("A").unwrap().method("f").unwrap().body.is_some());
    let bad = RefactoringOp::AddDelegatingMethod {
        class: "A".into(),
        method: "f".into(),
        body: parse_stmts("return 1 + 2;", &[]).unwrap(),
    };
    assert_eq!(check_preconditions(&bad, &p)[0].rule, Rule::InvalidBody);
}

#[test]
fn abstracting_requires_overrides() {
    let p = parse(
        "abstract class A { public int f() { return 0; } }
         class B extends A { B() {} public int f() { return 1; } }
         class C extends A { C() {} }",
    )
    .unwrap();
    let op = RefactoringOp::AddAbstractMethod { owner: "A".into(), vis: Visibility::Public, sig: parse_sig("int f()").unwrap() };
    let vs = check_preconditions(&op, &p);
    assert_eq!(vs.len(), 1);
    assert_eq!(vs[0].rule, Rule::DescendantRelies);
    assert!(vs[0].message.starts_with("C inherits"));
}

#[test]
fn rewrite_calls_in_scope() {
    let p = parse(
        "class A { A() {} public int f() { return 1; } public int g() { return 2; } }
         class U { U() {} public int use(A a) { return a.f(); } }
         class V { V() {} public int use(A a) { return a.f(); } }",
    )
    .unwrap();
    let op = RefactoringOp::RewriteCalls {
        receiver: "A".into(),
        method: "f".into(),
        replacement: "g".into(),
        scope: Some("U".into()),
    };
    let out = apply_op(&op, &p).unwrap();
    assert_eq!(pretty_method(&out, "U", "use"), "public int use(A a) { return a.g(); }");
    assert_eq!(pretty_method(&out, "V", "use"), "public int use(A a) { return a.f(); }");
}

#[test]
fn plan_text_round_trip() {
    let mut plan = visitor_setup();
    move_eval(&mut plan);
    plan.push(RefactoringOp::AddDelegatingMethod {
        class: "Expr".into(),
        method: "eval".into(),
        body: parse_stmts("return this.accept(new EvalVisitor());", &[]).unwrap(),
    });
    plan.push(RefactoringOp::DeleteMethod { class: "Num".into(), method: "eval".into() });
    plan.push(RefactoringOp::RewriteCalls { receiver: "A".into(), method: "f".into(), replacement: "g".into(), scope: None });
    plan.push(RefactoringOp::InlineTrivialGetter { class: "Num".into(), getter: "getValue".into() });
    plan.push(RefactoringOp::ChangeVisibility {
        class: "Num".into(),
        kind: MemberKind::Ctor,
        member: "Num".into(),
        vis: Visibility::Package,
    });
    plan.push(RefactoringOp::RenameDeclaration {
        target: RenameTarget::Field { class: "Add".into(), field: "left".into() },
        new_name: "lhs".into(),
    });
    plan.push(RefactoringOp::DeleteDeclaration { name: "Gone".into() });
    let mut commented = parse_method("public string tag() { return \"a \\\"b\\\" = #c\"; }").unwrap();
    commented.comment = vec![" first".into(), " second".into()];
    plan.push(RefactoringOp::AddMethod { class: "Num".into(), method: commented });

    let text = plan_text(&plan);
    assert!(text.starts_with("plan setup\nCreateInterface name=Visitor type_param=T\n"));
    assert_eq!(parse_plan(&text).unwrap(), plan);
}

#[test]
fn plan_text_errors_name_the_line() {
    let err = parse_plan("plan x\n# fine\nDeleteMethod class=A\n").unwrap_err();
    assert_eq!(err.line, 3);
    assert!(err.message.contains("missing argument method"));
    assert!(parse_plan("Bogus\n").is_err());
}
