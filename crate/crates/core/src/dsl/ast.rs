// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Syntax tree for qualitative models.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "/\\",
            BinOp::Or => "\\/",
            BinOp::Implies => "->",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    ForAll,
    Exists,
}

/// Inclusive integer range `int(lo..hi)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Range {
    pub lo: Expr,
    pub hi: Expr,
}

/// A comprehension clause: either a generator `i : int(a..b)` or a guard.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Clause {
    Generator { binder: String, range: Range },
    Guard(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ListExpr {
    Explicit(Vec<Expr>),
    Comprehension { element: Box<Expr>, clauses: Vec<Clause> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    /// Parameter, scalar variable, or quantifier binder.
    Name(String),
    Index(String, Box<Expr>),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Quant {
        kind: Quantifier,
        binder: String,
        range: Box<Range>,
        body: Box<Expr>,
    },
    AllDiff(ListExpr),
}

impl Expr {
    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn name(n: impl Into<String>) -> Expr {
        Expr::Name(n.into())
    }

    pub fn index(matrix: impl Into<String>, idx: Expr) -> Expr {
        Expr::Index(matrix.into(), Box::new(idx))
    }

    pub fn quant(kind: Quantifier, binder: impl Into<String>, lo: Expr, hi: Expr, body: Expr) -> Expr {
        Expr::Quant {
            kind,
            binder: binder.into(),
            range: Box::new(Range { lo, hi }),
            body: Box::new(body),
        }
    }

    /// Left-folded conjunction; `true` for an empty list.
    pub fn conjunction(mut parts: Vec<Expr>) -> Expr {
        if parts.is_empty() {
            return Expr::Bool(true);
        }
        let first = parts.remove(0);
        parts.into_iter().fold(first, |acc, e| Expr::bin(BinOp::And, acc, e))
    }

    /// Number of nodes in the tree, counting ranges and list clauses.
    pub fn node_count(&self) -> usize {
        match self {
            Expr::Int(_) | Expr::Bool(_) | Expr::Name(_) => 1,
            Expr::Index(_, i) | Expr::Neg(i) | Expr::Abs(i) | Expr::Not(i) => 1 + i.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
            Expr::Quant { range, body, .. } => 1 + range.lo.node_count() + range.hi.node_count() + body.node_count(),
            Expr::AllDiff(list) => 1 + list.node_count(),
        }
    }
}

impl ListExpr {
    fn node_count(&self) -> usize {
        match self {
            ListExpr::Explicit(items) => items.iter().map(Expr::node_count).sum(),
            ListExpr::Comprehension { element, clauses } => {
                element.node_count()
                    + clauses
                        .iter()
                        .map(|c| match c {
                            Clause::Generator { range, .. } => 1 + range.lo.node_count() + range.hi.node_count(),
                            Clause::Guard(g) => g.node_count(),
                        })
                        .sum::<usize>()
            }
        }
    }
}

/// `find name : [int(lo..hi)] of int(dlo..dhi)` or a scalar `find name : int(dlo..dhi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub index: Option<Range>,
    pub domain: Range,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelAST {
    /// Integer parameters in order of first appearance. Includes names
    /// declared with `given` and any free identifier used in the model.
    pub params: Vec<String>,
    pub decls: Vec<VarDecl>,
    pub constraints: Vec<Expr>,
}

impl ModelAST {
    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn node_count(&self) -> usize {
        self.constraints.iter().map(Expr::node_count).sum()
    }

    /// Appends another model's declarations and constraints.
    pub fn extend(&mut self, other: ModelAST) {
        for p in other.params {
            if !self.params.contains(&p) {
                self.params.push(p);
            }
        }
        self.decls.extend(other.decls);
        self.constraints.extend(other.constraints);
    }
}
