use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn dualshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualshift")).args(args).output().unwrap()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = dualshift(args);
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn detect_data_form() {
    let (code, stdout, _) = run(&["detect", path(&fixture("pdata.mj"))]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "root: Expr
subtypes: Num, Add
operations: eval: int, show: string
visitor interface: none

subtype  eval  show
Num      Num   Num
Add      Add   Add

DataOriented
"
    );
}

#[test]
fn detect_function_form() {
    let (code, stdout, _) = run(&["detect", path(&fixture("pfun.mj"))]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "root: Expr
subtypes: Num, Add
operations: eval: int, show: string
visitor interface: Visitor (dispatch through accept)
visitor classes: eval=EvalVisitor, show=ShowVisitor

subtype  eval         show
Num      EvalVisitor  ShowVisitor
Add      EvalVisitor  ShowVisitor

FunctionOriented
"
    );
}

#[test]
fn detect_mixed_forms_name_the_offenders() {
    let (code, stdout, _) = run(&["detect", path(&fixture("mixed_column.mj"))]);
    assert_eq!(code, 0);
    assert!(stdout.ends_with("\nMixed: offending column check (Num.check, Add.check, Mult.check)\n"), "{stdout}");
    let (code, stdout, _) = run(&["detect", path(&fixture("mixed_row.mj"))]);
    assert_eq!(code, 0);
    assert!(stdout.ends_with("\nMixed: offending cells in row Mult (Mult.eval, Mult.show)\n"), "{stdout}");
}

#[test]
fn detect_emits_matrix_csv() {
    let (code, stdout, _) = run(&["detect", path(&fixture("mixed_column.mj")), "--emit-matrix-csv"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "subtype,operation,owner
Num,eval,Num
Num,show,Num
Num,check,CheckVisitor
Add,eval,Add
Add,show,Add
Add,check,CheckVisitor
Mult,eval,Mult
Mult,show,Mult
Mult,check,CheckVisitor
"
    );
}

#[test]
fn transforms_print_the_other_fixture() {
    let pfun = std::fs::read_to_string(fixture("pfun.mj")).unwrap();
    let pdata = std::fs::read_to_string(fixture("pdata.mj")).unwrap();
    assert_eq!(run(&["to-visitor", path(&fixture("pdata.mj"))]), (0, pfun, String::new()));
    assert_eq!(run(&["to-composite", path(&fixture("pfun.mj"))]), (0, pdata, String::new()));
}

#[test]
fn wrong_direction_exits_one() {
    let (code, stdout, stderr) = run(&["to-visitor", path(&fixture("pfun.mj"))]);
    assert_eq!((code, stdout.as_str()), (1, ""));
    assert_eq!(stderr, "error: to-visitor refused:\nerror: program is not data-oriented\n");
}

#[test]
fn name_clash_leaves_files_alone() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("clash.mj");
    let output = dir.path().join("out.mj");
    let source = std::fs::read_to_string(fixture("pdata.mj")).unwrap() + "\nclass EvalVisitor {}\n";
    std::fs::write(&input, &source).unwrap();
    let (code, stdout, stderr) = run(&["to-visitor", path(&input), "-o", path(&output)]);
    assert_eq!((code, stdout.as_str()), (1, ""));
    assert!(stderr.contains("naming clash: EvalVisitor is already declared; step 9 (CreateClass name=EvalVisitor"), "{stderr}");
    assert_eq!(std::fs::read_to_string(&input).unwrap(), source);
    assert!(!output.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn run_evaluates_entries() {
    let p = fixture("pdata.mj");
    assert_eq!(run(&["run", path(&p), "--entry", "new Add(new Num(1), new Num(2)).eval()"]), (0, "3\n".into(), String::new()));
    assert_eq!(
        run(&["run", path(&p), "--entry", "new Add(new Num(1), new Num(2)).show()"]).1,
        "\"(1+2)\"\n"
    );
    let (code, _, stderr) = run(&["run", path(&p), "--entry", "new Num(1).size()"]);
    assert_eq!(code, 1);
    assert!(stderr.starts_with("error: evaluation failed: unresolved-method"), "{stderr}");
    assert_eq!(run(&["run", path(&p), "--entry", "new Num(1"]).0, 2);
    let (code, _, stderr) = run(&["run", path(&p), "--entry", "new Num(1).eval()", "--step-limit", "1"]);
    assert_eq!(code, 1, "{stderr}");
}

#[test]
fn roundtrip_reports_identity() {
    for name in ["pdata.mj", "pfun.mj", "p6x6.mj"] {
        let (code, stdout, stderr) = run(&["roundtrip", path(&fixture(name))]);
        assert_eq!(code, 0, "{name}: {stderr}");
        assert!(stdout.starts_with("identical after "), "{stdout}");
        assert!(stderr.starts_with("elapsed: "));
    }
    let (code, _, stderr) = run(&["roundtrip", path(&fixture("mixed_column.mj"))]);
    assert_eq!(code, 1);
    assert!(stderr.contains("neither data- nor function-oriented"), "{stderr}");
}

#[test]
fn parse_and_type_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mj");
    std::fs::write(&bad, "class A { int f() { return true; } }\n").unwrap();
    let (code, _, stderr) = run(&["detect", path(&bad)]);
    assert_eq!(code, 2);
    assert!(stderr.contains("bad.mj: error in A.f: return type mismatch"), "{stderr}");
    std::fs::write(&bad, "class {").unwrap();
    assert_eq!(run(&["fmt", path(&bad)]).0, 2);
    assert_eq!(run(&["fmt", path(&dir.path().join("missing.mj"))]).0, 2);
}

#[test]
fn fmt_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let messy = dir.path().join("messy.mj");
    std::fs::write(&messy, "class  A{public int f(){return 1+2;} private int x; // trailing\n}").unwrap();
    let once = dir.path().join("once.mj");
    let twice = dir.path().join("twice.mj");
    assert_eq!(run(&["fmt", path(&messy), "-o", path(&once)]).0, 0);
    assert_eq!(run(&["fmt", path(&once), "-o", path(&twice)]).0, 0);
    let a = std::fs::read(&once).unwrap();
    assert_eq!(a, std::fs::read(&twice).unwrap());
    assert!(String::from_utf8(a).unwrap().starts_with("class A {\n    private int x;\n"));
    for name in ["pdata.mj", "pfun.mj", "p6x6.mj", "mixed_column.mj", "mixed_row.mj"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        assert_eq!(run(&["fmt", path(&fixture(name))]).1, text, "{name} is not canonical");
    }
}

#[test]
fn scenario_writes_program_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("final.mj");
    let log = dir.path().join("steps.log");
    let script = fixture("scenario/evolution.script");
    let (code, stdout, stderr) =
        run(&["scenario", path(&script), path(&fixture("pdata.mj")), "-o", path(&out), "--log", path(&log)]);
    assert_eq!((code, stdout.as_str(), stderr.as_str()), (0, "", ""));
    let log = std::fs::read_to_string(&log).unwrap();
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[0], "step 0 (line 2) add-subtype Mult mult.members: DataOriented; touched Mult (new)");
    assert_eq!(
        lines[3],
        "step 3 (line 5) add-operation check boolean check.members: FunctionOriented; touched Expr (+4 -0), CheckVisitor (new)"
    );
    assert_eq!(lines[5], "step 5 (line 7) edit-class Add add.members: DataOriented; touched Add (+3 -2)");
    assert_eq!(
        lines[7],
        "step 7 (line 9) edit-class ShowVisitor show_visitor.members: FunctionOriented; touched ShowVisitor (+2 -2)"
    );
    assert_eq!(run(&["roundtrip", path(&out)]).0, 0);
}

#[test]
fn scenario_failures() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("s.script");
    let out = dir.path().join("out.mj");
    std::fs::write(&script, "to-visitor\nassert-form data\n").unwrap();
    let (code, _, stderr) = run(&["scenario", path(&script), path(&fixture("pdata.mj")), "-o", path(&out)]);
    assert_eq!(code, 1);
    assert!(stderr.contains("step 1 (line 2) assert-form data failed:\nexpected DataOriented, found FunctionOriented"), "{stderr}");
    assert!(!out.exists());

    std::fs::write(&script, "to-visitor\nfrobnicate\n").unwrap();
    assert_eq!(run(&["scenario", path(&script), path(&fixture("pdata.mj"))]).0, 2);

    std::fs::write(&script, "").unwrap();
    let pdata = std::fs::read_to_string(fixture("pdata.mj")).unwrap();
    assert_eq!(run(&["scenario", path(&script), path(&fixture("pdata.mj"))]), (0, pdata, String::new()));
}
