//! Seeded generators: random object trees for a detected hierarchy, and
//! random syntactically well-formed programs.

use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{
    BinOp, ClassDecl, CtorDecl, Decl, Expr, FieldDecl, InterfaceDecl, Member, MethodDecl, MethodSig, Param, Program,
    Stmt, Type, Visibility,
};
use crate::lens::HierarchyInfo;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn leafy(p: &Program, h: &HierarchyInfo, s: &str) -> bool {
    let recursive = |t: &Type| t.class_name().is_some_and(|n| n == h.root || h.subtypes.iter().any(|x| x == n));
    p.class(s).and_then(ClassDecl::ctor).is_none_or(|c| !c.params.iter().any(|prm| recursive(&prm.ty)))
}

fn arg(p: &Program, h: &HierarchyInfo, t: &Type, rng: &mut ChaCha8Rng, depth: usize) -> Option<Expr> {
    Some(match t {
        Type::Int => Expr::Int(rng.random_range(0..100)),
        Type::Bool => Expr::Bool(rng.random_bool(0.5)),
        Type::Str => Expr::Str(["a", "b", "xy", ""].choose(rng)?.to_string()),
        Type::Named(n, None) if *n == h.root => tree_below(p, h, None, rng, depth)?,
        Type::Named(n, None) if h.subtypes.contains(n) => tree_below(p, h, Some(n), rng, depth)?,
        _ => return None,
    })
}

fn tree_below(p: &Program, h: &HierarchyInfo, only: Option<&str>, rng: &mut ChaCha8Rng, depth: usize) -> Option<Expr> {
    let s = match only {
        Some(s) => s.to_string(),
        None => {
            let leaves: Vec<&String> = h.subtypes.iter().filter(|s| leafy(p, h, s)).collect();
            if depth <= 1 && !leaves.is_empty() {
                (*leaves.choose(rng)?).clone()
            } else {
                h.subtypes.choose(rng)?.clone()
            }
        }
    };
    let params = p.class(&s)?.ctor().map(|c| c.params.clone()).unwrap_or_default();
    let mut args = Vec::with_capacity(params.len());
    for prm in &params {
        args.push(arg(p, h, &prm.ty, rng, depth.saturating_sub(1))?);
    }
    Some(Expr::new_obj(s, args))
}

/// A random object tree of the hierarchy's subtypes, nested at most
/// `max_depth` constructor calls deep. `None` when some constructor takes a
/// type the generator cannot produce.
pub fn random_tree(p: &Program, h: &HierarchyInfo, rng: &mut ChaCha8Rng, max_depth: usize) -> Option<Expr> {
    let depth = rng.random_range(1..=max_depth.max(1));
    tree_below(p, h, None, rng, depth)
}

/// `count` trees, each paired with every operation: `tree.op()`.
pub fn entry_corpus(p: &Program, h: &HierarchyInfo, seed: u64, count: usize, max_depth: usize) -> Vec<Expr> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count * h.operations.len());
    for _ in 0..count {
        let Some(t) = random_tree(p, h, &mut rng, max_depth) else { break };
        for o in &h.operations {
            out.push(Expr::call(t.clone(), o.name.clone(), vec![]));
        }
    }
    out
}

const LOWER: &[&str] = &["a", "b", "value", "left", "right", "x", "count", "node", "item", "total"];
const UPPER: &[&str] = &["Shape", "Node", "Leaf", "Pair", "Box", "Item", "Walker", "Tree"];
const WORDS: &[&str] = &["computes", "the", "value", "of", "a", "node", "quietly", "twice", "42", "x+y"];

struct ProgramGen<'r> {
    rng: &'r mut ChaCha8Rng,
    classes: Vec<String>,
}

impl ProgramGen<'_> {
    fn lower(&mut self) -> String {
        LOWER.choose(self.rng).expect("non-empty").to_string()
    }

    fn class_name(&mut self) -> String {
        self.classes.choose(self.rng).expect("non-empty").clone()
    }

    fn comment(&mut self) -> Vec<String> {
        if !self.rng.random_bool(0.3) {
            return Vec::new();
        }
        (0..self.rng.random_range(1..3))
            .map(|_| {
                let n = self.rng.random_range(1..5);
                let words: Vec<&str> = (0..n).map(|_| *WORDS.choose(self.rng).expect("non-empty")).collect();
                format!(" {}", words.join(" "))
            })
            .collect()
    }

    fn vis(&mut self) -> Visibility {
        *[Visibility::Public, Visibility::Private, Visibility::Protected, Visibility::Package]
            .choose(self.rng)
            .expect("non-empty")
    }

    fn ty(&mut self, var: Option<&str>) -> Type {
        match self.rng.random_range(0..6) {
            0 => Type::Int,
            1 => Type::Bool,
            2 => Type::Str,
            3 => match var {
                Some(v) => Type::Var(v.to_string()),
                None => Type::Int,
            },
            4 => {
                let arg = match self.rng.random_range(0..3) {
                    0 => Type::Int,
                    1 => Type::Str,
                    _ => Type::named(self.class_name()),
                };
                Type::generic(self.class_name(), arg)
            }
            _ => Type::named(self.class_name()),
        }
    }

    fn string(&mut self) -> String {
        let pool = ['a', 'Z', ' ', '"', '\\', '\n', '\t', '+', '7', 'é'];
        (0..self.rng.random_range(0..6)).map(|_| *pool.choose(self.rng).expect("non-empty")).collect()
    }

    fn expr(&mut self, depth: usize) -> Expr {
        let leaf = depth == 0 || self.rng.random_bool(0.3);
        if leaf {
            return match self.rng.random_range(0..5) {
                0 => Expr::Int(self.rng.random_range(0..10_000)),
                1 => Expr::Str(self.string()),
                2 => Expr::Bool(self.rng.random_bool(0.5)),
                3 => Expr::var(self.lower()),
                _ => Expr::This,
            };
        }
        let d = depth - 1;
        match self.rng.random_range(0..5) {
            0 => Expr::field(self.expr(d), self.lower()),
            1 => {
                let n = self.rng.random_range(0..3);
                let args = (0..n).map(|_| self.expr(d)).collect();
                Expr::call(self.expr(d), self.lower(), args)
            }
            2 => {
                let n = self.rng.random_range(0..3);
                let args = (0..n).map(|_| self.expr(d)).collect();
                Expr::new_obj(self.class_name(), args)
            }
            3 => {
                let op = *[BinOp::Add, BinOp::Eq, BinOp::Lt].choose(self.rng).expect("non-empty");
                Expr::binary(op, self.expr(d), self.expr(d))
            }
            _ => Expr::ToStr(Box::new(self.expr(d))),
        }
    }

    fn stmt(&mut self) -> Stmt {
        match self.rng.random_range(0..3) {
            0 => Stmt::Return(self.expr(3)),
            1 => {
                let ty = self.ty(None);
                Stmt::Local(ty, self.lower(), self.expr(3))
            }
            _ => Stmt::Expr(self.expr(3)),
        }
    }

    fn params(&mut self, var: Option<&str>) -> Vec<Param> {
        (0..self.rng.random_range(0..3)).map(|_| Param::new(self.ty(var), self.lower())).collect()
    }

    fn method(&mut self, in_abstract: bool) -> MethodDecl {
        let type_param = self.rng.random_bool(0.2).then(|| "T".to_string());
        let var = type_param.as_deref();
        let is_abstract = in_abstract && self.rng.random_bool(0.4);
        let body = (!is_abstract).then(|| (0..self.rng.random_range(0..4)).map(|_| self.stmt()).collect());
        MethodDecl {
            comment: self.comment(),
            vis: self.vis(),
            is_abstract,
            type_param: type_param.clone(),
            ret: if self.rng.random_bool(0.15) { Type::Void } else { self.ty(var) },
            name: self.lower(),
            params: self.params(var),
            body,
        }
    }

    fn class(&mut self, name: &str) -> ClassDecl {
        let mut c = ClassDecl::new(name);
        c.comment = self.comment();
        c.is_abstract = self.rng.random_bool(0.3);
        c.extends = self.rng.random_bool(0.4).then(|| self.class_name());
        c.implements = self.rng.random_bool(0.2).then(|| match self.rng.random_bool(0.5) {
            true => Type::generic(self.class_name(), Type::Int),
            false => Type::named(self.class_name()),
        });
        for _ in 0..self.rng.random_range(0..3) {
            c.members.push(Member::Field(FieldDecl {
                comment: self.comment(),
                vis: self.vis(),
                ty: self.ty(None),
                name: self.lower(),
            }));
        }
        if self.rng.random_bool(0.5) {
            let params = self.params(None);
            let assigns = params.iter().map(|p| (self.lower(), p.name.clone())).collect();
            c.members.push(Member::Ctor(CtorDecl { comment: self.comment(), vis: self.vis(), name: name.into(), params, assigns }));
        }
        for _ in 0..self.rng.random_range(0..4) {
            let m = self.method(c.is_abstract);
            c.members.push(Member::Method(m));
        }
        // members arrive in any order; the printer sorts them
        let n = c.members.len();
        for i in (1..n).rev() {
            let j = self.rng.random_range(0..=i);
            c.members.swap(i, j);
        }
        c
    }

    fn interface(&mut self, name: &str) -> InterfaceDecl {
        let type_param = self.rng.random_bool(0.5).then(|| "T".to_string());
        let sigs = (0..self.rng.random_range(0..3))
            .map(|_| {
                let var = type_param.as_deref();
                MethodSig { comment: self.comment(), type_param: None, ret: self.ty(var), name: self.lower(), params: self.params(None) }
            })
            .collect();
        InterfaceDecl { comment: self.comment(), name: name.into(), type_param, sigs }
    }
}

/// A random program that parses back from its own pretty-print. It is not
/// meant to type-check.
pub fn random_program(rng: &mut ChaCha8Rng) -> Program {
    let n = rng.random_range(1..5);
    let mut names: Vec<String> = UPPER.iter().map(|s| s.to_string()).collect();
    for i in (1..names.len()).rev() {
        let j = rng.random_range(0..=i);
        names.swap(i, j);
    }
    names.truncate(n);
    let mut g = ProgramGen { rng, classes: names.clone() };
    let decls = names
        .iter()
        .map(|name| match g.rng.random_bool(0.25) {
            true => Decl::Interface(g.interface(name)),
            false => Decl::Class(g.class(name)),
        })
        .collect();
    Program::new(decls)
}

const OPS: &[&str] = &["eval", "show", "size", "isBig", "label"];
const SUBTYPES: &[&str] = &["Lit", "Pair", "Wrap", "Tag", "Neg", "Triple"];

struct HierarchyGen<'r> {
    rng: &'r mut ChaCha8Rng,
    ops: Vec<(String, Type)>,
}

impl HierarchyGen<'_> {
    /// An expression of type `want` over the fields of the current subtype.
    fn value(&mut self, want: &Type, fields: &[FieldDecl], locals: &[(Type, String)], depth: usize) -> Expr {
        let mut options: Vec<Expr> = Vec::new();
        for f in fields {
            let read = Expr::field(Expr::This, f.name.clone());
            if f.ty == *want {
                options.push(read.clone());
            }
            if f.ty == Type::named("Node") {
                for (op, ret) in &self.ops {
                    if ret == want {
                        options.push(Expr::call(read.clone(), op.clone(), vec![]));
                    }
                }
            }
        }
        options.extend(locals.iter().filter(|(t, _)| t == want).map(|(_, n)| Expr::var(n)));
        let compound = depth > 0 && self.rng.random_bool(0.5);
        match want {
            Type::Int if compound => {
                let l = self.value(&Type::Int, fields, locals, depth - 1);
                let r = self.value(&Type::Int, fields, locals, depth - 1);
                Expr::binary(BinOp::Add, l, r)
            }
            Type::Str if compound => {
                let inner = if self.rng.random_bool(0.5) { Type::Int } else { Type::Str };
                let v = self.value(&inner, fields, locals, depth - 1);
                let v = if inner == Type::Int { Expr::ToStr(Box::new(v)) } else { v };
                let tag = ["(", "[", "-", ""].choose(self.rng).expect("non-empty");
                Expr::binary(BinOp::Add, Expr::Str(tag.to_string()), v)
            }
            Type::Bool if compound => {
                let l = self.value(&Type::Int, fields, locals, depth - 1);
                let r = self.value(&Type::Int, fields, locals, depth - 1);
                let op = if self.rng.random_bool(0.5) { BinOp::Lt } else { BinOp::Eq };
                Expr::binary(op, l, r)
            }
            _ if !options.is_empty() && self.rng.random_bool(0.8) => options.choose(self.rng).expect("non-empty").clone(),
            Type::Int => Expr::Int(self.rng.random_range(0..50)),
            Type::Bool => Expr::Bool(self.rng.random_bool(0.5)),
            _ => Expr::Str(["x", "y", "node", ""].choose(self.rng).expect("non-empty").to_string()),
        }
    }

    fn body(&mut self, ret: &Type, fields: &[FieldDecl]) -> Vec<Stmt> {
        let mut stmts = Vec::new();
        let mut locals = Vec::new();
        if self.rng.random_bool(0.25) {
            let e = self.value(&Type::Int, fields, &locals, 2);
            stmts.push(Stmt::Local(Type::Int, "tmp".into(), e));
            locals.push((Type::Int, "tmp".to_string()));
        }
        stmts.push(Stmt::Return(self.value(ret, fields, &locals, 2)));
        stmts
    }
}

/// A random data-oriented hierarchy: an abstract `Node` with abstract
/// operations and concrete subtypes implementing every one of them. The
/// first subtype holds no nested nodes, so finite trees always exist.
pub fn random_hierarchy(rng: &mut ChaCha8Rng) -> Program {
    let nops = rng.random_range(1..=OPS.len());
    let ops: Vec<(String, Type)> = OPS[..nops]
        .iter()
        .map(|o| {
            let t = [Type::Int, Type::Str, Type::Bool].choose(rng).expect("non-empty").clone();
            (o.to_string(), t)
        })
        .collect();
    let nsubs = rng.random_range(1..=SUBTYPES.len());
    let mut g = HierarchyGen { rng, ops };
    let mut root = ClassDecl::new("Node");
    root.is_abstract = true;
    root.comment = vec![" Random hierarchy.".into()];
    for (op, ret) in &g.ops {
        root.members.push(Member::Method(MethodDecl {
            comment: if g.rng.random_bool(0.3) { vec![format!(" Operation {op}.")] } else { Vec::new() },
            vis: Visibility::Public,
            is_abstract: true,
            type_param: None,
            ret: ret.clone(),
            name: op.clone(),
            params: Vec::new(),
            body: None,
        }));
    }
    let mut decls = vec![Decl::Class(root)];
    for (i, name) in SUBTYPES[..nsubs].iter().enumerate() {
        let mut fields = Vec::new();
        for (j, fname) in ["first", "second", "third"].iter().enumerate() {
            if j >= g.rng.random_range(0..=3) {
                break;
            }
            let ty = match g.rng.random_range(0..3) {
                0 if i > 0 => Type::named("Node"),
                0 | 1 => Type::Int,
                _ => Type::Str,
            };
            let vis = if g.rng.random_bool(0.8) { Visibility::Private } else { Visibility::Public };
            fields.push(FieldDecl { comment: Vec::new(), vis, ty, name: fname.to_string() });
        }
        let mut c = ClassDecl::new(*name);
        c.extends = Some("Node".into());
        c.members.extend(fields.iter().cloned().map(Member::Field));
        if !fields.is_empty() {
            c.members.push(Member::Ctor(CtorDecl {
                comment: Vec::new(),
                vis: Visibility::Public,
                name: name.to_string(),
                params: fields.iter().map(|f| Param::new(f.ty.clone(), f.name.clone())).collect(),
                assigns: fields.iter().map(|f| (f.name.clone(), f.name.clone())).collect(),
            }));
        }
        for (op, ret) in g.ops.clone() {
            let body = g.body(&ret, &fields);
            c.members.push(Member::Method(MethodDecl {
                comment: if g.rng.random_bool(0.2) { vec![format!(" {name} {op}.")] } else { Vec::new() },
                vis: Visibility::Public,
                is_abstract: false,
                type_param: None,
                ret,
                name: op,
                params: Vec::new(),
                body: Some(body),
            }));
        }
        decls.push(Decl::Class(c));
    }
    Program::new(decls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{canonicalize, parse, pretty};
    use crate::lens::detect_hierarchy;

    #[test]
    fn trees_respect_depth_and_constructors() {
        let p = parse(include_str!("../fixtures/p6x6.mj")).unwrap();
        let h = detect_hierarchy(&p).unwrap();
        let mut r = rng(7);
        for _ in 0..50 {
            let t = random_tree(&p, &h, &mut r, 6).unwrap();
            assert!(t.depth() <= 6 * 2 + 1, "{t:?}");
            assert!(crate::lang::typecheck(&p).is_empty());
        }
        let corpus = entry_corpus(&p, &h, 1, 10, 4);
        assert_eq!(corpus.len(), 60);
        assert_eq!(corpus, entry_corpus(&p, &h, 1, 10, 4));
    }

    #[test]
    fn random_hierarchies_are_data_oriented() {
        let mut r = rng(11);
        for _ in 0..30 {
            let p = random_hierarchy(&mut r);
            assert_eq!(crate::lang::typecheck(&p), vec![], "{}", pretty(&p));
            let h = detect_hierarchy(&p).unwrap();
            let m = crate::lens::coverage_matrix(&p, &h);
            assert_eq!(crate::lens::classify(&m), crate::lens::StructureClass::DataOriented);
        }
    }

    #[test]
    fn generated_programs_reparse() {
        let mut r = rng(3);
        for _ in 0..200 {
            let p = random_program(&mut r);
            let text = pretty(&p);
            let back = parse(&text).unwrap_or_else(|d| panic!("{d:?}\n{text}"));
            assert_eq!(back, canonicalize(&p), "{text}");
            assert_eq!(pretty(&back), text);
        }
    }
}
