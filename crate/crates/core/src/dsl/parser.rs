// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Recursive descent parser for the modelling language.
//!
//! Precedence, loosest first: `->` (right associative), `\/`, `/\`,
//! comparisons (non-associative), `+ -`, `*`, then the unary operators
//! `!`, `-` and `abs(..)`. Quantifier bodies extend as far right as possible.

use std::collections::HashSet;

use super::ast::{BinOp, Clause, Expr, ListExpr, ModelAST, Quantifier, Range, VarDecl};
use super::lexer::{Pos, Token, TokenKind};
use super::DslError;

pub fn parse(tokens: &[Token]) -> Result<ModelAST, DslError> {
    let mut parser = Parser { tokens, at: 0 };
    let mut model = ModelAST::default();
    let mut given = Vec::new();

    while !parser.done() {
        match parser.peek_kind() {
            Some(TokenKind::Find) => {
                let decl = parser.declaration()?;
                if model.decls.iter().any(|d| d.name == decl.name) || given.contains(&decl.name) {
                    return Err(DslError::DuplicateDeclaration { name: decl.name });
                }
                model.decls.push(decl);
            }
            Some(TokenKind::Given) => {
                parser.bump();
                let name = parser.ident()?;
                parser.expect(TokenKind::Colon)?;
                parser.expect(TokenKind::Int)?;
                if given.contains(&name) || model.decl(&name).is_some() {
                    return Err(DslError::DuplicateDeclaration { name });
                }
                given.push(name);
            }
            Some(TokenKind::Such) => {
                parser.bump();
                parser.expect(TokenKind::That)?;
            }
            Some(TokenKind::Comma) => {
                parser.bump();
            }
            _ => model.constraints.push(parser.expr()?),
        }
    }

    model.params = collect_params(&model, given);
    Ok(model)
}

/// Parses a single expression, e.g. for tests and builders.
pub fn parse_expr(tokens: &[Token]) -> Result<Expr, DslError> {
    let mut parser = Parser { tokens, at: 0 };
    let e = parser.expr()?;
    if !parser.done() {
        return Err(parser.unexpected(&["end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    tokens: &'a [Token],
    at: usize,
}

impl Parser<'_> {
    fn done(&self) -> bool {
        self.at >= self.tokens.len()
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.tokens.get(self.at).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.at);
        self.at += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> DslError {
        let (pos, found) = match self.tokens.get(self.at) {
            Some(t) => (Some(t.pos), t.kind.to_string()),
            None => (None, "end of input".to_string()),
        };
        DslError::Syntax {
            pos,
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), DslError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.unexpected(&[&kind.to_string()]))
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match self.peek_kind() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.at += 1;
                Ok(name)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn declaration(&mut self) -> Result<VarDecl, DslError> {
        self.expect(TokenKind::Find)?;
        let name = self.ident()?;
        self.expect(TokenKind::Colon)?;
        let index = if self.eat(&TokenKind::LBrack) {
            let r = self.int_range()?;
            self.expect(TokenKind::RBrack)?;
            self.expect(TokenKind::Of)?;
            Some(r)
        } else {
            None
        };
        let domain = self.int_range()?;
        Ok(VarDecl { name, index, domain })
    }

    /// `int(lo..hi)`
    fn int_range(&mut self) -> Result<Range, DslError> {
        self.expect(TokenKind::Int)?;
        self.expect(TokenKind::LParen)?;
        let lo = self.additive()?;
        self.expect(TokenKind::DotDot)?;
        let hi = self.additive()?;
        self.expect(TokenKind::RParen)?;
        Ok(Range { lo, hi })
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Expr, DslError> {
        let lhs = self.disjunction()?;
        if self.eat(&TokenKind::Implies) {
            let rhs = self.implication()?;
            return Ok(Expr::bin(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&TokenKind::Or) {
            let rhs = self.conjunction()?;
            lhs = Expr::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.comparison()?;
        while self.eat(&TokenKind::And) {
            let rhs = self.comparison()?;
            lhs = Expr::bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> Result<Expr, DslError> {
        let lhs = self.additive()?;
        let op = match self.peek_kind() {
            Some(TokenKind::Eq) => BinOp::Eq,
            Some(TokenKind::Neq) => BinOp::Ne,
            Some(TokenKind::Lt) => BinOp::Lt,
            Some(TokenKind::Le) => BinOp::Le,
            Some(TokenKind::Gt) => BinOp::Gt,
            Some(TokenKind::Ge) => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::bin(op, lhs, rhs))
    }

    fn additive(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        while self.eat(&TokenKind::Star) {
            let rhs = self.unary()?;
            lhs = Expr::bin(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if self.eat(&TokenKind::Bang) {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.eat(&TokenKind::Minus) {
            // a negated literal is a negative literal
            return Ok(match self.unary()? {
                Expr::Int(n) if n != i64::MIN => Expr::Int(-n),
                e => Expr::Neg(Box::new(e)),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        let Some(kind) = self.peek_kind().cloned() else {
            return Err(self.unexpected(&["expression"]));
        };
        match kind {
            TokenKind::Number(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            TokenKind::True => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            TokenKind::False => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            TokenKind::Ident(name) => {
                self.bump();
                if self.eat(&TokenKind::LBrack) {
                    let idx = self.expr()?;
                    self.expect(TokenKind::RBrack)?;
                    Ok(Expr::Index(name, Box::new(idx)))
                } else {
                    Ok(Expr::Name(name))
                }
            }
            TokenKind::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Abs => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Abs(Box::new(e)))
            }
            TokenKind::AllDiff => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let list = self.list()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::AllDiff(list))
            }
            TokenKind::ForAll | TokenKind::Exists => self.quantified(),
            _ => Err(self.unexpected(&["expression"])),
        }
    }

    /// `forAll i, j : int(a..b) . body`; several binders nest left to right.
    fn quantified(&mut self) -> Result<Expr, DslError> {
        let kind = match self.bump().map(|t| &t.kind) {
            Some(TokenKind::ForAll) => Quantifier::ForAll,
            _ => Quantifier::Exists,
        };
        let mut binders = vec![self.ident()?];
        while self.eat(&TokenKind::Comma) {
            binders.push(self.ident()?);
        }
        self.expect(TokenKind::Colon)?;
        let range = self.int_range()?;
        self.expect(TokenKind::Dot)?;
        let body = self.expr()?;
        Ok(binders.into_iter().rev().fold(body, |body, binder| Expr::Quant {
            kind,
            binder,
            range: Box::new(range.clone()),
            body: Box::new(body),
        }))
    }

    /// `[e1, e2, ...]` or `[e | i : int(a..b), guard, ...]`
    fn list(&mut self) -> Result<ListExpr, DslError> {
        self.expect(TokenKind::LBrack)?;
        if self.eat(&TokenKind::RBrack) {
            return Ok(ListExpr::Explicit(Vec::new()));
        }
        let first = self.expr()?;
        if self.eat(&TokenKind::Bar) {
            let mut clauses = Vec::new();
            loop {
                let is_generator = matches!(self.peek_kind(), Some(TokenKind::Ident(_)))
                    && matches!(self.tokens.get(self.at + 1).map(|t| &t.kind), Some(TokenKind::Colon));
                if is_generator {
                    let binder = self.ident()?;
                    self.expect(TokenKind::Colon)?;
                    let range = self.int_range()?;
                    clauses.push(Clause::Generator { binder, range });
                } else {
                    clauses.push(Clause::Guard(self.expr()?));
                }
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(TokenKind::RBrack)?;
            return Ok(ListExpr::Comprehension {
                element: Box::new(first),
                clauses,
            });
        }
        let mut items = vec![first];
        while self.eat(&TokenKind::Comma) {
            items.push(self.expr()?);
        }
        self.expect(TokenKind::RBrack)?;
        Ok(ListExpr::Explicit(items))
    }
}

/// Free identifiers that are neither declared variables nor bound by a
/// quantifier or generator are parameters.
fn collect_params(model: &ModelAST, given: Vec<String>) -> Vec<String> {
    let vars: HashSet<&str> = model.decls.iter().map(|d| d.name.as_str()).collect();
    let mut params = given;
    let mut scope = Vec::new();
    for d in &model.decls {
        if let Some(r) = &d.index {
            free_in_range(r, &vars, &mut scope, &mut params);
        }
        free_in_range(&d.domain, &vars, &mut scope, &mut params);
    }
    for c in &model.constraints {
        free_names(c, &vars, &mut scope, &mut params);
    }
    params
}

fn free_in_range(r: &Range, vars: &HashSet<&str>, scope: &mut Vec<String>, out: &mut Vec<String>) {
    free_names(&r.lo, vars, scope, out);
    free_names(&r.hi, vars, scope, out);
}

fn note(name: &str, vars: &HashSet<&str>, scope: &[String], out: &mut Vec<String>) {
    if !vars.contains(name) && !scope.iter().any(|b| b == name) && !out.iter().any(|p| p == name) {
        out.push(name.to_string());
    }
}

fn free_names(e: &Expr, vars: &HashSet<&str>, scope: &mut Vec<String>, out: &mut Vec<String>) {
    match e {
        Expr::Int(_) | Expr::Bool(_) => {}
        Expr::Name(n) => note(n, vars, scope, out),
        Expr::Index(m, i) => {
            note(m, vars, scope, out);
            free_names(i, vars, scope, out);
        }
        Expr::Neg(i) | Expr::Abs(i) | Expr::Not(i) => free_names(i, vars, scope, out),
        Expr::Binary(_, a, b) => {
            free_names(a, vars, scope, out);
            free_names(b, vars, scope, out);
        }
        Expr::Quant {
            binder, range, body, ..
        } => {
            free_in_range(range, vars, scope, out);
            scope.push(binder.clone());
            free_names(body, vars, scope, out);
            scope.pop();
        }
        Expr::AllDiff(ListExpr::Explicit(items)) => {
            for i in items {
                free_names(i, vars, scope, out);
            }
        }
        Expr::AllDiff(ListExpr::Comprehension { element, clauses }) => {
            let depth = scope.len();
            for c in clauses {
                match c {
                    Clause::Generator { binder, range } => {
                        free_in_range(range, vars, scope, out);
                        scope.push(binder.clone());
                    }
                    Clause::Guard(g) => free_names(g, vars, scope, out),
                }
            }
            free_names(element, vars, scope, out);
            scope.truncate(depth);
        }
    }
}

/// Position of a syntax error, if any, for diagnostics.
pub fn error_pos(err: &DslError) -> Option<Pos> {
    match err {
        DslError::IllegalCharacter { pos, .. } | DslError::IntegerOverflow { pos } => Some(*pos),
        DslError::Syntax { pos, .. } => *pos,
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::lexer::tokenize;

    fn expr(src: &str) -> Expr {
        parse_expr(&tokenize(src).unwrap()).unwrap()
    }

    #[test]
    fn forall_with_equality_body() {
        let e = expr("forAll i : int(1..max) . y[i] = x[i] - x[i-1]");
        let expected = Expr::quant(
            Quantifier::ForAll,
            "i",
            Expr::Int(1),
            Expr::name("max"),
            Expr::bin(
                BinOp::Eq,
                Expr::index("y", Expr::name("i")),
                Expr::bin(
                    BinOp::Sub,
                    Expr::index("x", Expr::name("i")),
                    Expr::index("x", Expr::bin(BinOp::Sub, Expr::name("i"), Expr::Int(1))),
                ),
            ),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn exists_with_alldiff_comprehension() {
        let e = expr("exists i : int(0..max). allDiff([x[j] | j : int(0..max), j<i]) /\\ x[i]=p");
        let Expr::Quant { kind, binder, body, .. } = e else {
            panic!("expected quantifier");
        };
        assert_eq!(kind, Quantifier::Exists);
        assert_eq!(binder, "i");
        let Expr::Binary(BinOp::And, lhs, _) = *body else {
            panic!("expected conjunction body");
        };
        match *lhs {
            Expr::AllDiff(ListExpr::Comprehension { clauses, .. }) => {
                assert_eq!(clauses.len(), 2);
                assert!(matches!(clauses[0], Clause::Generator { .. }));
                assert!(matches!(clauses[1], Clause::Guard(_)));
            }
            other => panic!("expected comprehension, got {other:?}"),
        }
    }

    #[test]
    fn malformed_declaration() {
        let err = parse(&tokenize("find x : of").unwrap()).unwrap_err();
        assert!(matches!(err, DslError::Syntax { .. }), "{err:?}");
    }

    #[test]
    fn precedence() {
        // a -> b -> c is right associative; /\ binds tighter than \/
        let e = expr("a = 1 \\/ b = 2 /\\ c = 3 -> d = 4 -> e = 5");
        let Expr::Binary(BinOp::Implies, lhs, rhs) = e else {
            panic!()
        };
        assert!(matches!(*lhs, Expr::Binary(BinOp::Or, _, _)));
        assert!(matches!(*rhs, Expr::Binary(BinOp::Implies, _, _)));
        let e = expr("1 + 2 * 3 - -x");
        assert_eq!(
            e,
            Expr::bin(
                BinOp::Sub,
                Expr::bin(
                    BinOp::Add,
                    Expr::Int(1),
                    Expr::bin(BinOp::Mul, Expr::Int(2), Expr::Int(3))
                ),
                Expr::Neg(Box::new(Expr::name("x")))
            )
        );
    }

    #[test]
    fn multiple_binders_nest() {
        let e = expr("exists k, j : int(2..3) . x[k] = j");
        let Expr::Quant { binder, body, .. } = e else { panic!() };
        assert_eq!(binder, "k");
        let Expr::Quant { binder, .. } = *body else { panic!() };
        assert_eq!(binder, "j");
    }

    #[test]
    fn params_are_free_identifiers() {
        let src = "given r : int\nfind x : [int(0..max)] of int(-r..r)\nforAll i : int(1..max) . x[i] != q";
        let m = parse(&tokenize(src).unwrap()).unwrap();
        assert_eq!(m.params, vec!["r", "max", "q"]);
    }

    #[test]
    fn duplicate_declaration_rejected() {
        let src = "find x : int(0..1)\nfind x : int(0..2)";
        assert!(matches!(
            parse(&tokenize(src).unwrap()),
            Err(DslError::DuplicateDeclaration { .. })
        ));
    }
}
