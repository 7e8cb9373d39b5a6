use std::path::PathBuf;

use super::*;
use crate::interp::evaluate;
use crate::lang::{parse, parse_expr, parse_members, typecheck, Type};
use crate::lens::{coverage_matrix, detect_hierarchy};
use crate::refactor::RefactoringOp;

fn fixture(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    let p = parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(typecheck(&p), vec![], "{name}");
    p
}

fn text(p: &Program) -> String {
    pretty(&canonicalize(p))
}

fn messages(e: TransformError) -> Vec<String> {
    match e {
        TransformError::Planner(ds) => ds.into_iter().map(|d| d.message).collect(),
        other => panic!("expected planner diagnostics, got {other:?}"),
    }
}

#[test]
fn data_form_becomes_the_hand_written_visitor_form() {
    let out = transform_program(&fixture("pdata.mj"), TransformDirection::ToVisitor).unwrap();
    assert_eq!(pretty(&out), text(&fixture("pfun.mj")));
}

#[test]
fn visitor_form_becomes_the_hand_written_data_form() {
    let out = transform_program(&fixture("pfun.mj"), TransformDirection::ToComposite).unwrap();
    assert_eq!(pretty(&out), text(&fixture("pdata.mj")));
}

#[test]
fn round_trips_are_identical() {
    for name in ["pdata.mj", "pfun.mj", "p6x6.mj"] {
        let r = roundtrip_check(&fixture(name)).unwrap();
        assert!(r.identical, "{name}:\n{}", r.diff.unwrap_or_default());
        assert_eq!(r.diff, None);
    }
    assert_eq!(roundtrip_check(&fixture("pfun.mj")).unwrap().first, TransformDirection::ToComposite);
}

#[test]
fn six_by_six_plan_shape() {
    let plan = plan_to_visitor(&fixture("p6x6.mj")).unwrap();
    let count = |pred: fn(&RefactoringOp) -> bool| plan.steps.iter().filter(|s| pred(s)).count();
    assert_eq!(count(|s| matches!(s, RefactoringOp::CreateClass { .. })), 6);
    assert_eq!(count(|s| matches!(s, RefactoringOp::MoveMethodBody { .. })), 36);
    let back = plan_to_composite(&transform_program(&fixture("p6x6.mj"), TransformDirection::ToVisitor).unwrap()).unwrap();
    assert_eq!(back.steps.iter().filter(|s| matches!(s, RefactoringOp::MoveMethodBody { .. })).count(), 36);
}

#[test]
fn six_by_six_bodies_move_to_visitors() {
    let p = fixture("p6x6.mj");
    let out = transform_program(&p, TransformDirection::ToVisitor).unwrap();
    let h = detect_hierarchy(&out).unwrap();
    let m = coverage_matrix(&out, &h);
    for s in &h.subtypes {
        for o in &h.operations {
            assert_eq!(m.owner(s, &o.name), Some(naming::visitor_class(&o.name).as_str()));
        }
    }
    // spot checks of three moved bodies
    let body = |c: &str, visit: &str| {
        let m = out.class(c).unwrap().method(visit).unwrap();
        pretty(&Program::new(vec![crate::lang::Decl::Class(crate::lang::ClassDecl {
            members: vec![crate::lang::Member::Method(m.clone())],
            ..crate::lang::ClassDecl::new("X")
        })]))
    };
    assert!(body("EvalVisitor", "visitAdd").contains("return add.getLeft().accept(this) + add.getRight().accept(this);"));
    assert!(body("ShowVisitor", "visitLabel").contains("label.getName() + \"=\" + str(label.getBody().eval())"));
    assert!(body("EvalVisitor", "visitTwice").contains("int v = twice.getInner().accept(this);"));
}

#[test]
fn direction_mismatch_is_a_planner_error() {
    let e = transform(&fixture("pfun.mj"), TransformDirection::ToVisitor).unwrap_err();
    assert_eq!(messages(e), vec!["program is not data-oriented"]);
    let e = transform(&fixture("pdata.mj"), TransformDirection::ToComposite).unwrap_err();
    assert_eq!(messages(e), vec!["program is not function-oriented"]);
}

fn with_class(mut p: Program, src: &str) -> Program {
    p.decls.extend(parse(src).unwrap().decls);
    p
}

#[test]
fn name_clash_blocks_the_plan_and_names_the_step() {
    let p = with_class(fixture("pdata.mj"), "class ShowVisitor {}");
    let msgs = messages(transform(&p, TransformDirection::ToVisitor).unwrap_err());
    assert_eq!(msgs.len(), 1);
    assert!(msgs[0].starts_with("naming clash: ShowVisitor is already declared; step "), "{}", msgs[0]);
    assert!(msgs[0].contains("(CreateClass name=ShowVisitor"), "{}", msgs[0]);

    let p = with_class(fixture("pdata.mj"), "class Visitor {}");
    assert!(messages(transform(&p, TransformDirection::ToVisitor).unwrap_err())[0].contains("step 0 (CreateInterface"));
}

#[test]
fn existing_getter_blocks_encapsulation() {
    let mut p = fixture("pdata.mj");
    let num = p.class_mut("Num").unwrap();
    num.members.extend(parse_members("public int getValue() { return 7; }", "Num").unwrap());
    let msgs = messages(transform(&p, TransformDirection::ToVisitor).unwrap_err());
    assert_eq!(msgs, vec!["cannot encapsulate Num.value: method getValue already exists"]);
}

#[test]
fn incomplete_visitor_is_reported() {
    let mut p = fixture("pfun.mj");
    p.class_mut("ShowVisitor").unwrap().remove_method("visitAdd");
    let msgs = messages(transform(&p, TransformDirection::ToComposite).unwrap_err());
    assert_eq!(msgs, vec!["incomplete visitor ShowVisitor: no case for Add"]);
}

#[test]
fn stateful_visitor_is_reported() {
    let mut p = fixture("pfun.mj");
    p.class_mut("EvalVisitor").unwrap().members.extend(parse_members("private int seen;", "EvalVisitor").unwrap());
    let msgs = messages(transform(&p, TransformDirection::ToComposite).unwrap_err());
    assert_eq!(msgs, vec!["visitor EvalVisitor has state fields"]);
}

#[test]
fn getters_with_outside_callers_are_kept() {
    let p = with_class(
        fixture("pfun.mj"),
        "class Probe { public int peek(Num n) { return n.getValue(); } }",
    );
    let out = transform_program(&p, TransformDirection::ToComposite).unwrap();
    let num = out.class("Num").unwrap();
    assert!(num.method("getValue").is_some());
    assert_eq!(pretty(&out).matches("this.value").count(), 4);
}

#[test]
fn behavior_is_preserved_on_fixture_entries() {
    let entries = [
        ("new Add(new Num(1), new Num(2)).eval()", "3"),
        ("new Add(new Num(1), new Add(new Num(20), new Num(3))).show()", "\"(1+(20+3))\""),
    ];
    for name in ["pdata.mj", "pfun.mj"] {
        let p = fixture(name);
        let d = direction_for(&p).unwrap();
        let q = transform_program(&p, d).unwrap();
        for (src, want) in entries {
            let e = parse_expr(src).unwrap();
            assert_eq!(evaluate(&p, &e).unwrap().to_string(), want);
            assert_eq!(evaluate(&q, &e).unwrap().to_string(), want);
        }
    }
}

fn members(src: &str, class: &str) -> Vec<crate::lang::Member> {
    parse_members(src, class).unwrap()
}

fn scenario_file(name: &str) -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenario").join(name)).unwrap()
}

#[test]
fn add_subtype_touches_one_new_class() {
    let p = fixture("pdata.mj");
    let step = EvolutionStep::AddSubtype { name: "Mult".into(), members: members(&scenario_file("mult.members"), "Mult") };
    let out = apply_evolution(&p, &step).unwrap();
    let fp = footprint(&p, &out);
    assert_eq!(fp.added, vec!["Mult"]);
    assert!(fp.modified.is_empty() && fp.removed.is_empty());
    assert!(pretty(&out).contains("public Mult(Expr left, Expr right) {"));
    let e = parse_expr("new Mult(new Num(2), new Num(3)).show()").unwrap();
    assert_eq!(evaluate(&out, &e).unwrap().to_string(), "\"(2*3)\"");

    let err = apply_evolution(&fixture("pfun.mj"), &step).unwrap_err();
    assert_eq!(err[0].message, "this evolution is not modular in the current form; transform first");
}

#[test]
fn add_subtype_needs_every_operation() {
    let step = EvolutionStep::AddSubtype {
        name: "Neg".into(),
        members: members("private Expr inner; public int eval() { return 0; }", "Neg"),
    };
    let err = apply_evolution(&fixture("pdata.mj"), &step).unwrap_err();
    assert_eq!(err[0].message, "Neg has no body for operation show");
}

#[test]
fn add_operation_touches_new_class_and_facade() {
    let p = fixture("pfun.mj");
    let step = EvolutionStep::AddOperation {
        name: "size".into(),
        ret: Type::Int,
        members: members(
            "public int visitNum(Num num) { return 1; }
             public int visitAdd(Add add) { return add.getLeft().accept(this) + add.getRight().accept(this) + 1; }",
            "SizeVisitor",
        ),
    };
    let out = apply_evolution(&p, &step).unwrap();
    let fp = footprint(&p, &out);
    assert_eq!(fp.added, vec!["SizeVisitor"]);
    assert_eq!(fp.modified, vec![("Expr".to_string(), 4, 0)]);
    assert!(fp.is_modular());
    let e = parse_expr("new Add(new Num(1), new Num(2)).size()").unwrap();
    assert_eq!(evaluate(&out, &e).unwrap().to_string(), "3");
    assert!(apply_evolution(&fixture("pdata.mj"), &step).is_err());
}

#[test]
fn edit_class_replaces_members() {
    let p = fixture("pdata.mj");
    let mut add = members(&scenario_file("add.members"), "Add");
    add.retain(|m| m.name() != "check");
    let out = apply_evolution(&p, &EvolutionStep::EditClass { name: "Add".into(), members: add }).unwrap();
    assert_eq!(footprint(&p, &out).modified.iter().map(|m| m.0.as_str()).collect::<Vec<_>>(), vec!["Add"]);
    let missing = EvolutionStep::EditClass { name: "Nope".into(), members: vec![] };
    assert_eq!(apply_evolution(&p, &missing).unwrap_err()[0].message, "no class named Nope");
}

#[test]
fn evolution_scenario_runs_modularly() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenario");
    let s = parse_script(&scenario_file("evolution.script")).unwrap();
    let run = run_scenario(&s, &dir, &fixture("pdata.mj")).unwrap();
    assert_eq!(run.log.len(), 9);
    for l in &run.log {
        if !l.text.starts_with("to-") {
            assert!(l.footprint.is_modular(), "{l}");
        }
    }
    let r = roundtrip_check(&run.program).unwrap();
    assert!(r.identical, "{}", r.diff.unwrap_or_default());
    let e = parse_expr("new Mult(new Add(new Num(1), new Num(2)), new Num(4)).show()").unwrap();
    assert_eq!(evaluate(&run.program, &e).unwrap().to_string(), "\"((1 + 2) * 4)\"");
}

#[test]
fn scenario_failures() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/scenario");
    let s = parse_script("to-visitor\nassert-form data\n").unwrap();
    match run_scenario(&s, &dir, &fixture("pdata.mj")).unwrap_err() {
        ScenarioError::Step { index, line, message, log, .. } => {
            assert_eq!((index, line), (1, 2));
            assert_eq!(message, "expected DataOriented, found FunctionOriented");
            assert_eq!(log.len(), 1);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_script("explode now"), Err(ScenarioError::Syntax { .. })));
    assert!(matches!(parse_script("to-visitor extra"), Err(ScenarioError::Syntax { .. })));
    let empty = run_scenario(&parse_script("# nothing\n\n").unwrap(), &dir, &fixture("pdata.mj")).unwrap();
    assert_eq!(empty.program, fixture("pdata.mj"));
}
