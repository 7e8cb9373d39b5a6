//! Reference interpreter for MiniObj, used as the behavior-preservation oracle.
//!
//! Evaluation is call-by-value with dynamic dispatch on the receiver's runtime
//! class; type parameters are erased. Every expression evaluation costs one
//! step, and both the step count and the call depth are bounded.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::thread;

use thiserror::Error;

use crate::lang::pretty::quote_str;
use crate::lang::{BinOp, Expr, Program, Stmt, Symbols};

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;
pub const DEFAULT_MAX_DEPTH: usize = 10_000;

/// Stack reserved for the evaluation thread; sized for `DEFAULT_MAX_DEPTH`.
const EVAL_STACK_BYTES: usize = 512 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Str(String),
    Bool(bool),
    Obj(Arc<Object>),
    /// Result of calling a `void` method.
    Void,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Object {
    pub class: String,
    pub fields: BTreeMap<String, Value>,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(&quote_str(s)),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Void => f.write_str("void"),
            Value::Obj(o) => {
                write!(f, "{}(", o.class)?;
                for (i, (k, v)) in o.fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}={v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    UnresolvedMethod,
    AbstractInstantiation,
    ArityMismatch,
    TypeConfusion,
    StepLimit,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalErrorKind::UnresolvedMethod => "unresolved-method",
            EvalErrorKind::AbstractInstantiation => "abstract-instantiation",
            EvalErrorKind::ArityMismatch => "arity-mismatch",
            EvalErrorKind::TypeConfusion => "type-confusion",
            EvalErrorKind::StepLimit => "step-limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {detail}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub detail: String,
}

fn fail<T>(kind: EvalErrorKind, detail: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError { kind, detail: detail.into() })
}

/// Evaluates `entry` against `p` with the default limits.
pub fn evaluate(p: &Program, entry: &Expr) -> Result<Value, EvalError> {
    Interpreter::new(p).eval(entry)
}

pub struct Interpreter<'p> {
    syms: Symbols<'p>,
    step_limit: u64,
    max_depth: usize,
}

struct Frame {
    this: Option<Value>,
    vars: Vec<(String, Value)>,
}

struct Run {
    steps: u64,
    depth: usize,
}

impl<'p> Interpreter<'p> {
    pub fn new(p: &'p Program) -> Interpreter<'p> {
        Interpreter { syms: Symbols::new(p), step_limit: DEFAULT_STEP_LIMIT, max_depth: DEFAULT_MAX_DEPTH }
    }

    pub fn with_step_limit(mut self, limit: u64) -> Self {
        self.step_limit = limit;
        self
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    /// Evaluates on a dedicated thread whose stack fits the depth bound.
    pub fn eval(&self, entry: &Expr) -> Result<Value, EvalError> {
        thread::scope(|s| {
            thread::Builder::new()
                .stack_size(EVAL_STACK_BYTES)
                .spawn_scoped(s, || self.eval_here(entry))
                .expect("spawn evaluation thread")
                .join()
                .unwrap_or_else(|_| fail(EvalErrorKind::TypeConfusion, "evaluator panicked"))
        })
    }

    fn eval_here(&self, entry: &Expr) -> Result<Value, EvalError> {
        let mut run = Run { steps: 0, depth: 0 };
        let frame = Frame { this: None, vars: Vec::new() };
        self.expr(&mut run, &frame, entry)
    }

    fn expr(&self, run: &mut Run, frame: &Frame, e: &Expr) -> Result<Value, EvalError> {
        run.steps += 1;
        if run.steps > self.step_limit {
            return fail(EvalErrorKind::StepLimit, format!("exceeded {} steps", self.step_limit));
        }
        match e {
            Expr::Int(v) => Ok(Value::Int(*v)),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::This => frame
                .this
                .clone()
                .map_or_else(|| fail(EvalErrorKind::TypeConfusion, "'this' outside of a method"), Ok),
            Expr::Var(v) => match frame.vars.iter().rev().find(|(n, _)| n == v) {
                Some((_, val)) => Ok(val.clone()),
                None => fail(EvalErrorKind::TypeConfusion, format!("unbound variable {v}")),
            },
            Expr::Field(t, f) => match self.expr(run, frame, t)? {
                Value::Obj(o) => match o.fields.get(f) {
                    Some(v) => Ok(v.clone()),
                    None => fail(EvalErrorKind::TypeConfusion, format!("{} has no field {f}", o.class)),
                },
                other => fail(EvalErrorKind::TypeConfusion, format!("field .{f} read on {other}")),
            },
            Expr::Call(t, m, args) => {
                let recv = self.expr(run, frame, t)?;
                let argv = args.iter().map(|a| self.expr(run, frame, a)).collect::<Result<Vec<_>, _>>()?;
                self.invoke(run, recv, m, argv)
            }
            Expr::New(cn, args) => {
                let argv = args.iter().map(|a| self.expr(run, frame, a)).collect::<Result<Vec<_>, _>>()?;
                self.construct(cn, argv)
            }
            Expr::Binary(op, l, r) => {
                let lv = self.expr(run, frame, l)?;
                let rv = self.expr(run, frame, r)?;
                binary(*op, lv, rv)
            }
            Expr::ToStr(inner) => match self.expr(run, frame, inner)? {
                Value::Int(v) => Ok(Value::Str(v.to_string())),
                other => fail(EvalErrorKind::TypeConfusion, format!("str applied to {other}")),
            },
        }
    }

    fn invoke(&self, run: &mut Run, recv: Value, m: &str, argv: Vec<Value>) -> Result<Value, EvalError> {
        let Value::Obj(o) = &recv else {
            return fail(EvalErrorKind::TypeConfusion, format!("method .{m}() called on {recv}"));
        };
        let Some((_, md)) = self.syms.concrete_method(&o.class, m) else {
            return fail(EvalErrorKind::UnresolvedMethod, format!("{} has no implementation of {m}", o.class));
        };
        if md.params.len() != argv.len() {
            return fail(
                EvalErrorKind::ArityMismatch,
                format!("{}.{m} expects {} argument(s), got {}", o.class, md.params.len(), argv.len()),
            );
        }
        if run.depth >= self.max_depth {
            return fail(EvalErrorKind::StepLimit, format!("call depth exceeded {}", self.max_depth));
        }
        run.depth += 1;
        let mut frame = Frame {
            this: Some(recv.clone()),
            vars: md.params.iter().map(|p| p.name.clone()).zip(argv).collect(),
        };
        let mut result = Ok(Value::Void);
        for s in md.body.as_deref().unwrap_or_default() {
            match s {
                Stmt::Return(e) => {
                    result = self.expr(run, &frame, e);
                    break;
                }
                Stmt::Local(_, n, e) => match self.expr(run, &frame, e) {
                    Ok(v) => frame.vars.push((n.clone(), v)),
                    Err(err) => {
                        result = Err(err);
                        break;
                    }
                },
                Stmt::Expr(e) => {
                    if let Err(err) = self.expr(run, &frame, e) {
                        result = Err(err);
                        break;
                    }
                }
            }
        }
        run.depth -= 1;
        result
    }

    fn construct(&self, cn: &str, argv: Vec<Value>) -> Result<Value, EvalError> {
        let Some(c) = self.syms.class(cn) else {
            return fail(EvalErrorKind::TypeConfusion, format!("unknown class {cn}"));
        };
        if c.is_abstract {
            return fail(EvalErrorKind::AbstractInstantiation, format!("cannot instantiate abstract class {cn}"));
        }
        let mut fields = BTreeMap::new();
        match c.ctor() {
            None if !argv.is_empty() => {
                return fail(EvalErrorKind::ArityMismatch, format!("{cn} has no constructor taking arguments"));
            }
            None => {}
            Some(k) => {
                if k.params.len() != argv.len() {
                    return fail(
                        EvalErrorKind::ArityMismatch,
                        format!("constructor of {cn} expects {} argument(s), got {}", k.params.len(), argv.len()),
                    );
                }
                for (f, p) in &k.assigns {
                    let idx = k.params.iter().position(|q| &q.name == p);
                    let Some(idx) = idx else {
                        return fail(EvalErrorKind::TypeConfusion, format!("unknown constructor parameter {p}"));
                    };
                    fields.insert(f.clone(), argv[idx].clone());
                }
            }
        }
        for (_, f) in self.syms.all_fields(cn) {
            if !fields.contains_key(&f.name) {
                return fail(EvalErrorKind::TypeConfusion, format!("field {cn}.{} left uninitialized", f.name));
            }
        }
        Ok(Value::Obj(Arc::new(Object { class: cn.to_string(), fields })))
    }
}

fn binary(op: BinOp, l: Value, r: Value) -> Result<Value, EvalError> {
    match (op, l, r) {
        (BinOp::Add, Value::Int(a), Value::Int(b)) => match a.checked_add(b) {
            Some(v) => Ok(Value::Int(v)),
            None => fail(EvalErrorKind::TypeConfusion, format!("integer overflow in {a} + {b}")),
        },
        (BinOp::Add, Value::Str(a), Value::Str(b)) => Ok(Value::Str(a + &b)),
        (BinOp::Eq, Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a == b)),
        (BinOp::Eq, Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(a == b)),
        (BinOp::Eq, Value::Str(a), Value::Str(b)) => Ok(Value::Bool(a == b)),
        (BinOp::Lt, Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a < b)),
        (op, l, r) => fail(EvalErrorKind::TypeConfusion, format!("operator {} applied to {l} and {r}", op.symbol())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, parse_expr};

    fn run(src: &str, entry: &str) -> Result<Value, EvalError> {
        evaluate(&parse(src).unwrap(), &parse_expr(entry).unwrap())
    }

    const PDATA: &str = include_str!("../fixtures/pdata.mj");

    #[test]
    fn pdata_eval_and_show() {
        assert_eq!(run(PDATA, "new Add(new Num(1), new Num(2)).eval()"), Ok(Value::Int(3)));
        assert_eq!(run(PDATA, "new Add(new Num(1), new Num(2)).show()"), Ok(Value::Str("(1+2)".into())));
    }

    #[test]
    fn dispatch_picks_most_derived() {
        let src = "class A { public int f() { return 1; } public int g() { return this.f(); } }\n\
                   class B extends A { public int f() { return 2; } }";
        assert_eq!(run(src, "new B().g()"), Ok(Value::Int(2)));
        assert_eq!(run(src, "new A().g()"), Ok(Value::Int(1)));
    }

    #[test]
    fn errors_by_kind() {
        let src = "abstract class A { public abstract int f(); } class L { public int f() { return this.f(); } }";
        assert_eq!(run(src, "new A()").unwrap_err().kind, EvalErrorKind::AbstractInstantiation);
        assert_eq!(run(src, "new L().f()").unwrap_err().kind, EvalErrorKind::StepLimit);
        assert_eq!(run(src, "new L().g()").unwrap_err().kind, EvalErrorKind::UnresolvedMethod);
        assert_eq!(run(src, "new L().f(1)").unwrap_err().kind, EvalErrorKind::ArityMismatch);
        assert_eq!(run(src, "1 + \"a\"").unwrap_err().kind, EvalErrorKind::TypeConfusion);
        assert_eq!(run(src, "9223372036854775807 + 1").unwrap_err().kind, EvalErrorKind::TypeConfusion);
    }

    #[test]
    fn step_limit_is_configurable() {
        let p = parse(PDATA).unwrap();
        let e = parse_expr("new Add(new Num(1), new Num(2)).eval()").unwrap();
        let err = Interpreter::new(&p).with_step_limit(5).eval(&e).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::StepLimit);
    }

    #[test]
    fn objects_carry_inherited_fields() {
        let src = "abstract class B { int x; } class C extends B { int y; C(int x, int y) { this.x = x; this.y = y; } }";
        let v = run(src, "new C(1, 2)").unwrap();
        assert_eq!(v.to_string(), "C(x=1, y=2)");
    }
}
