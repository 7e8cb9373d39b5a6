//! Recursive-descent parser for MiniObj.

use std::collections::HashSet;

use super::ast::*;
use super::diag::Diagnostic;
use super::lexer::{tokenize, Tok, Token};

type PResult<T> = Result<T, Diagnostic>;

/// Parses a whole program. Syntax errors stop at the first problem; duplicate
/// declaration names are all reported.
pub fn parse(source: &str) -> Result<Program, Vec<Diagnostic>> {
    parse_named(source, "<input>")
}

pub fn parse_named(source: &str, source_name: &str) -> Result<Program, Vec<Diagnostic>> {
    let mut p = Parser::new(source).map_err(|d| vec![d])?;
    let decls = p.program().map_err(|d| vec![d])?;
    let mut seen = HashSet::new();
    let dups: Vec<Diagnostic> = decls
        .iter()
        .filter(|d| !seen.insert(d.name().to_string()))
        .map(|d| Diagnostic::error(d.name(), format!("duplicate declaration {}", d.name())))
        .collect();
    if !dups.is_empty() {
        return Err(dups);
    }
    Ok(Program { decls, source_name: source_name.to_string() })
}

pub fn parse_expr(source: &str) -> Result<Expr, Diagnostic> {
    let mut p = Parser::new(source)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a sequence of class members as they would appear inside
/// `class <class_name> { ... }`.
pub fn parse_members(source: &str, class_name: &str) -> Result<Vec<Member>, Diagnostic> {
    let mut p = Parser::new(source)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.member(class_name)?);
    }
    Ok(out)
}

/// Parses a single concrete or abstract method declaration.
pub fn parse_method(source: &str) -> Result<MethodDecl, Diagnostic> {
    let mut p = Parser::new(source)?;
    let span = p.peek().span;
    let m = p.member("")?;
    p.expect_eof()?;
    match m {
        Member::Method(m) => Ok(m),
        _ => Err(Diagnostic::error("", "expected a method declaration").at(span)),
    }
}

/// Parses a signature such as `<T> T accept(Visitor<T> v)`; the trailing `;`
/// is optional.
pub fn parse_sig(source: &str) -> Result<MethodSig, Diagnostic> {
    parse_sig_with(source, &[])
}

/// Like [`parse_sig`], reading identifiers in `type_vars` as type variables
/// (for signatures that belong to a generic interface).
pub fn parse_sig_with(source: &str, type_vars: &[&str]) -> Result<MethodSig, Diagnostic> {
    let mut p = Parser::new(source)?;
    p.tvars.extend(type_vars.iter().map(|s| s.to_string()));
    let sig = p.sig(false)?;
    p.eat(";");
    p.expect_eof()?;
    Ok(sig)
}

pub fn parse_type(source: &str) -> Result<Type, Diagnostic> {
    let mut p = Parser::new(source)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a statement list (a method body without braces). Identifiers in
/// `type_vars` are read as type variables.
pub fn parse_stmts(source: &str, type_vars: &[&str]) -> Result<Vec<Stmt>, Diagnostic> {
    let mut p = Parser::new(source)?;
    p.tvars.extend(type_vars.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.stmt()?);
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    tvars: Vec<String>,
}

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser { toks: tokenize(src)?, pos: 0, tvars: Vec::new() })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn is(&self, s: &str) -> bool {
        match &self.peek().tok {
            Tok::Punct(p) => *p == s,
            Tok::Ident(i) => i == s,
            _ => false,
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(Diagnostic::error("", msg).at(self.peek().span))
    }

    fn describe(&self) -> String {
        match &self.peek().tok {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(v) => format!("'{v}'"),
            Tok::Str(_) => "string literal".into(),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected '{s}', found {}", self.describe()))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.err(format!("unexpected {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match &self.peek().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn program(&mut self) -> PResult<Vec<Decl>> {
        let mut decls = Vec::new();
        while !self.at_eof() {
            decls.push(self.decl()?);
        }
        Ok(decls)
    }

    fn decl(&mut self) -> PResult<Decl> {
        let comment = self.peek().comments.clone();
        if self.eat("interface") {
            let name = self.ident()?;
            let type_param = if self.eat("<") {
                let v = self.ident()?;
                self.expect(">")?;
                Some(v)
            } else {
                None
            };
            self.tvars = type_param.iter().cloned().collect();
            self.expect("{")?;
            let mut sigs = Vec::new();
            while !self.eat("}") {
                if self.at_eof() {
                    return self.err("expected '}'");
                }
                let sig = self.sig(true)?;
                self.expect(";")?;
                sigs.push(sig);
            }
            self.tvars.clear();
            return Ok(Decl::Interface(InterfaceDecl { comment, name, type_param, sigs }));
        }
        let is_abstract = self.eat("abstract");
        if !self.eat("class") {
            return self.err(format!("expected 'class' or 'interface', found {}", self.describe()));
        }
        let name = self.ident()?;
        let extends = if self.eat("extends") { Some(self.ident()?) } else { None };
        let implements = if self.eat("implements") { Some(self.ty()?) } else { None };
        self.expect("{")?;
        let mut members = Vec::new();
        while !self.eat("}") {
            if self.at_eof() {
                return self.err("expected '}'");
            }
            members.push(self.member(&name)?);
        }
        Ok(Decl::Class(ClassDecl { comment, name, is_abstract, extends, implements, members }))
    }

    /// `[<X>] type name(params)`; keeps the method type variable in scope of
    /// the current parse only while reading the signature.
    fn sig(&mut self, keep_comments: bool) -> PResult<MethodSig> {
        let comment = if keep_comments { self.peek().comments.clone() } else { Vec::new() };
        let saved = self.tvars.len();
        let type_param = self.type_param()?;
        let ret = self.ty()?;
        let name = self.ident()?;
        let params = self.params()?;
        self.tvars.truncate(saved);
        Ok(MethodSig { comment, type_param, ret, name, params })
    }

    fn type_param(&mut self) -> PResult<Option<String>> {
        if self.eat("<") {
            let v = self.ident()?;
            self.expect(">")?;
            self.tvars.push(v.clone());
            Ok(Some(v))
        } else {
            Ok(None)
        }
    }

    fn member(&mut self, class: &str) -> PResult<Member> {
        let comment = self.peek().comments.clone();
        let vis = if self.eat("public") {
            Visibility::Public
        } else if self.eat("private") {
            Visibility::Private
        } else if self.eat("protected") {
            Visibility::Protected
        } else {
            Visibility::Package
        };
        let is_abstract = self.eat("abstract");
        let saved = self.tvars.len();
        let type_param = self.type_param()?;
        let is_ctor = matches!(&self.peek().tok, Tok::Ident(s) if s == class) && self.peek_at(1) == &Tok::Punct("(");
        if is_ctor {
            if is_abstract || type_param.is_some() {
                return self.err("constructors cannot be abstract or generic");
            }
            let name = self.ident()?;
            let params = self.params()?;
            self.expect("{")?;
            let mut assigns = Vec::new();
            while !self.eat("}") {
                if !self.eat("this") {
                    return self.err(format!(
                        "constructor bodies may only contain 'this.f = p;' assignments, found {}",
                        self.describe()
                    ));
                }
                self.expect(".")?;
                let f = self.ident()?;
                self.expect("=")?;
                let p = self.ident()?;
                self.expect(";")?;
                assigns.push((f, p));
            }
            return Ok(Member::Ctor(CtorDecl { comment, vis, name, params, assigns }));
        }
        let ty = self.ty()?;
        let name = self.ident()?;
        if self.eat(";") {
            if is_abstract || type_param.is_some() {
                return self.err("fields cannot be abstract or generic");
            }
            self.tvars.truncate(saved);
            return Ok(Member::Field(FieldDecl { comment, vis, ty, name }));
        }
        let params = self.params()?;
        let body = if is_abstract {
            self.expect(";")?;
            None
        } else {
            Some(self.block()?)
        };
        self.tvars.truncate(saved);
        Ok(Member::Method(MethodDecl { comment, vis, is_abstract, type_param, ret: ty, name, params, body }))
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            let ty = self.ty()?;
            let name = self.ident()?;
            out.push(Param { ty, name });
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn ty(&mut self) -> PResult<Type> {
        let t = match &self.peek().tok {
            Tok::Ident(s) => match s.as_str() {
                "int" => Type::Int,
                "boolean" => Type::Bool,
                "string" => Type::Str,
                "void" => Type::Void,
                _ => {
                    let name = self.ident()?;
                    if self.tvars.contains(&name) {
                        return Ok(Type::Var(name));
                    }
                    if self.eat("<") {
                        let arg = self.ty()?;
                        self.expect(">")?;
                        return Ok(Type::generic(name, arg));
                    }
                    return Ok(Type::Named(name, None));
                }
            },
            _ => return self.err(format!("expected type, found {}", self.describe())),
        };
        self.bump();
        Ok(t)
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.eat("}") {
            if self.at_eof() {
                return self.err("expected '}'");
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.eat("return") {
            let e = self.expr()?;
            self.expect(";")?;
            return Ok(Stmt::Return(e));
        }
        if let Some((ty, name)) = self.try_local_head()? {
            let e = self.expr()?;
            self.expect(";")?;
            return Ok(Stmt::Local(ty, name, e));
        }
        let e = self.expr()?;
        self.expect(";")?;
        Ok(Stmt::Expr(e))
    }

    /// Recognizes `type name =` at the cursor, backtracking otherwise.
    fn try_local_head(&mut self) -> PResult<Option<(Type, String)>> {
        let start = self.pos;
        let Tok::Ident(first) = &self.peek().tok else { return Ok(None) };
        let builtin = matches!(first.as_str(), "int" | "boolean" | "string" | "void");
        if !builtin && KEYWORDS.contains(&first.as_str()) {
            return Ok(None);
        }
        let attempt = (|| -> PResult<(Type, String)> {
            let ty = self.ty()?;
            let name = self.ident()?;
            self.expect("=")?;
            Ok((ty, name))
        })();
        match attempt {
            Ok(r) => Ok(Some(r)),
            Err(e) if builtin => Err(e),
            Err(_) => {
                self.pos = start;
                Ok(None)
            }
        }
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.postfix()?;
        loop {
            let op = match &self.peek().tok {
                Tok::Punct("+") => BinOp::Add,
                Tok::Punct("==") => BinOp::Eq,
                Tok::Punct("<") => BinOp::Lt,
                _ => break,
            };
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.eat(".") {
            let name = self.ident()?;
            if self.is("(") {
                let args = self.args()?;
                e = Expr::Call(Box::new(e), name, args);
            } else {
                e = Expr::Field(Box::new(e), name);
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = self.peek().tok.clone();
        match tok {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::Bool(s == "true"))
                }
                "this" => {
                    self.bump();
                    Ok(Expr::This)
                }
                "new" => {
                    self.bump();
                    let class = self.ident()?;
                    let args = self.args()?;
                    Ok(Expr::New(class, args))
                }
                "str" => {
                    self.bump();
                    self.expect("(")?;
                    let e = self.expr()?;
                    self.expect(")")?;
                    Ok(Expr::ToStr(Box::new(e)))
                }
                _ => Ok(Expr::Var(self.ident()?)),
            },
            _ => self.err(format!("expected expression, found {}", self.describe())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::diag::Span;

    #[test]
    fn empty_source_is_empty_program() {
        assert_eq!(parse("").unwrap().decls.len(), 0);
        assert_eq!(parse("  // only a comment\n").unwrap().decls.len(), 0);
    }

    #[test]
    fn duplicate_declaration() {
        let errs = parse("class A {} class A {}").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].message, "duplicate declaration A");
    }

    #[test]
    fn syntax_error_has_position() {
        let errs = parse("class A {\n    int x\n}").unwrap_err();
        assert_eq!(errs[0].span, Some(Span { line: 3, col: 1 }));
        assert!(errs[0].message.contains("expected"));
    }

    #[test]
    fn precedence_and_postfix() {
        let e = parse_expr("a + b.c() < 3 == true").unwrap();
        let expected = Expr::binary(
            BinOp::Eq,
            Expr::binary(
                BinOp::Lt,
                Expr::binary(BinOp::Add, Expr::var("a"), Expr::call(Expr::var("b"), "c", vec![])),
                Expr::Int(3),
            ),
            Expr::Bool(true),
        );
        assert_eq!(e, expected);
        let e = parse_expr("new Add(new Num(1), new Num(2)).eval()").unwrap();
        assert!(matches!(e, Expr::Call(t, m, _) if m == "eval" && matches!(*t, Expr::New(..))));
    }

    #[test]
    fn generic_members_and_locals() {
        let src = "abstract class E { public abstract <T> T accept(Visitor<T> v); }\n\
                   interface Visitor<T> { T visitE(E e); }\n\
                   class V implements Visitor<int> { public int visitE(E e) { Visitor<int> me = this; int x = 1; return x; } }";
        let p = parse(src).unwrap();
        let e = p.class("E").unwrap();
        let acc = e.method("accept").unwrap();
        assert_eq!(acc.ret, Type::Var("T".into()));
        assert_eq!(acc.params[0].ty, Type::generic("Visitor", Type::Var("T".into())));
        let v = p.class("V").unwrap();
        assert_eq!(v.implements, Some(Type::generic("Visitor", Type::Int)));
        let body = v.method("visitE").unwrap().body.as_ref().unwrap();
        assert!(matches!(&body[0], Stmt::Local(Type::Named(n, Some(_)), _, Expr::This) if n == "Visitor"));
        assert!(matches!(&body[1], Stmt::Local(Type::Int, _, _)));
        let i = p.interface("Visitor").unwrap();
        assert_eq!(i.sigs[0].ret, Type::Var("T".into()));
    }

    #[test]
    fn comparison_statement_is_not_a_local() {
        let stmts = parse_stmts("a < b;", &[]).unwrap();
        assert!(matches!(&stmts[0], Stmt::Expr(Expr::Binary(BinOp::Lt, _, _))));
    }

    #[test]
    fn ctor_body_restricted() {
        let errs = parse("class A { int x; A(int x) { return x; } }").unwrap_err();
        assert!(errs[0].message.contains("constructor bodies"));
    }

    #[test]
    fn leading_comments_attach() {
        let p = parse("// top\nclass A {\n    // field\n    int x;\n    // dropped at end\n}").unwrap();
        let a = p.class("A").unwrap();
        assert_eq!(a.comment, vec![" top".to_string()]);
        assert_eq!(a.members[0].comment(), &[" field".to_string()]);
    }
}
