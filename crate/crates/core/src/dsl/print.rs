// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Source rendering. Binary operations and quantifiers are fully
//! parenthesised so the output re-parses to the same tree.

use std::fmt;

use super::ast::{Clause, Expr, ListExpr, ModelAST, Quantifier, Range, VarDecl};

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "int({}..{})", self.lo, self.hi)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) if *n < 0 => write!(f, "(-{})", n.unsigned_abs()),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Name(n) => write!(f, "{n}"),
            Expr::Index(m, i) => write!(f, "{m}[{i}]"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Abs(e) => write!(f, "abs({e})"),
            Expr::Not(e) => write!(f, "!({e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Quant {
                kind,
                binder,
                range,
                body,
            } => {
                let kw = match kind {
                    Quantifier::ForAll => "forAll",
                    Quantifier::Exists => "exists",
                };
                write!(f, "({kw} {binder} : {range} . {body})")
            }
            Expr::AllDiff(list) => write!(f, "allDiff({list})"),
        }
    }
}

impl fmt::Display for ListExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListExpr::Explicit(items) => {
                write!(f, "[")?;
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, "]")
            }
            ListExpr::Comprehension { element, clauses } => {
                write!(f, "[{element} | ")?;
                for (k, c) in clauses.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    match c {
                        Clause::Generator { binder, range } => write!(f, "{binder} : {range}")?,
                        Clause::Guard(g) => write!(f, "{g}")?,
                    }
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Display for VarDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "find {} : ", self.name)?;
        if let Some(idx) = &self.index {
            write!(f, "[{idx}] of ")?;
        }
        write!(f, "{}", self.domain)
    }
}

impl fmt::Display for ModelAST {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.params {
            writeln!(f, "given {p} : int")?;
        }
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        if !self.constraints.is_empty() {
            writeln!(f, "such that")?;
        }
        for (k, c) in self.constraints.iter().enumerate() {
            let sep = if k + 1 < self.constraints.len() { "," } else { "" };
            writeln!(f, "  {c}{sep}")?;
        }
        Ok(())
    }
}
