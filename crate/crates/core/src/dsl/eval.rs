// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Direct evaluation of a typed model against a full assignment of its
//! declared cells. Used as a reference semantics, independent of flattening.

use std::collections::HashMap;

use super::ast::{BinOp, Clause, Expr, ListExpr, Quantifier};
use super::validate::TypedModel;
use super::DslError;

/// Canonical name of a declared cell: `x[3]` for matrices, `x` for scalars.
pub fn cell_name(matrix: &str, index: Option<i64>) -> String {
    match index {
        Some(i) => format!("{matrix}[{i}]"),
        None => matrix.to_string(),
    }
}

impl TypedModel {
    /// All declared cells in declaration order, with their domains.
    pub fn cells(&self) -> Vec<(String, (i64, i64))> {
        let mut out = Vec::new();
        for d in &self.decls {
            match d.index {
                Some((lo, hi)) => {
                    for i in lo..=hi {
                        out.push((cell_name(&d.name, Some(i)), d.domain));
                    }
                }
                None => out.push((cell_name(&d.name, None), d.domain)),
            }
        }
        out
    }

    /// True when every constraint holds and every cell lies in its domain.
    pub fn satisfied_by(&self, values: &HashMap<String, i64>) -> Result<bool, DslError> {
        for (cell, (lo, hi)) in self.cells() {
            let v = *values.get(&cell).ok_or(DslError::MissingCell { cell: cell.clone() })?;
            if v < lo || v > hi {
                return Ok(false);
            }
        }
        let mut ev = Evaluator {
            model: self,
            values,
            env: Vec::new(),
        };
        for c in &self.constraints {
            if !ev.boolean(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

struct Evaluator<'a> {
    model: &'a TypedModel,
    values: &'a HashMap<String, i64>,
    env: Vec<(String, i64)>,
}

impl Evaluator<'_> {
    fn lookup(&self, name: &str) -> Result<i64, DslError> {
        if let Some((_, v)) = self.env.iter().rev().find(|(b, _)| b == name) {
            return Ok(*v);
        }
        self.values
            .get(name)
            .copied()
            .ok_or_else(|| DslError::MissingCell { cell: name.to_string() })
    }

    fn integer(&mut self, e: &Expr) -> Result<i64, DslError> {
        Ok(match e {
            Expr::Int(n) => *n,
            Expr::Name(n) => self.lookup(n)?,
            Expr::Index(m, i) => {
                let idx = self.integer(i)?;
                let decl = self
                    .model
                    .decl(m)
                    .ok_or_else(|| DslError::MissingCell { cell: m.clone() })?;
                let (lo, hi) = decl.index.unwrap_or((0, -1));
                if idx < lo || idx > hi {
                    return Err(DslError::IndexOutOfRange {
                        access: e.to_string(),
                        reach: (idx, idx),
                        range: (lo, hi),
                    });
                }
                self.lookup(&cell_name(m, Some(idx)))?
            }
            Expr::Neg(a) => -self.integer(a)?,
            Expr::Abs(a) => self.integer(a)?.abs(),
            Expr::Binary(BinOp::Add, a, b) => self.integer(a)? + self.integer(b)?,
            Expr::Binary(BinOp::Sub, a, b) => self.integer(a)? - self.integer(b)?,
            Expr::Binary(BinOp::Mul, a, b) => self.integer(a)? * self.integer(b)?,
            _ => {
                return Err(DslError::TypeError {
                    message: format!("`{e}` is not an integer expression"),
                })
            }
        })
    }

    fn boolean(&mut self, e: &Expr) -> Result<bool, DslError> {
        Ok(match e {
            Expr::Bool(b) => *b,
            Expr::Not(a) => !self.boolean(a)?,
            Expr::Binary(op, a, b) if op.is_comparison() => {
                let (a, b) = (self.integer(a)?, self.integer(b)?);
                match op {
                    BinOp::Eq => a == b,
                    BinOp::Ne => a != b,
                    BinOp::Lt => a < b,
                    BinOp::Le => a <= b,
                    BinOp::Gt => a > b,
                    _ => a >= b,
                }
            }
            Expr::Binary(BinOp::And, a, b) => self.boolean(a)? && self.boolean(b)?,
            Expr::Binary(BinOp::Or, a, b) => self.boolean(a)? || self.boolean(b)?,
            Expr::Binary(BinOp::Implies, a, b) => !self.boolean(a)? || self.boolean(b)?,
            Expr::Quant {
                kind,
                binder,
                range,
                body,
            } => {
                let lo = self.integer(&range.lo)?;
                let hi = self.integer(&range.hi)?;
                let mut result = matches!(kind, Quantifier::ForAll);
                for v in lo..=hi {
                    self.env.push((binder.clone(), v));
                    let holds = self.boolean(body);
                    self.env.pop();
                    let holds = holds?;
                    match kind {
                        Quantifier::ForAll if !holds => {
                            result = false;
                            break;
                        }
                        Quantifier::Exists if holds => {
                            result = true;
                            break;
                        }
                        _ => {}
                    }
                }
                result
            }
            Expr::AllDiff(list) => {
                let mut items = Vec::new();
                self.list(list, &mut items)?;
                let mut sorted = items.clone();
                sorted.sort_unstable();
                sorted.dedup();
                sorted.len() == items.len()
            }
            _ => {
                return Err(DslError::TypeError {
                    message: format!("`{e}` is not a boolean expression"),
                })
            }
        })
    }

    fn list(&mut self, list: &ListExpr, out: &mut Vec<i64>) -> Result<(), DslError> {
        match list {
            ListExpr::Explicit(items) => {
                for i in items {
                    out.push(self.integer(i)?);
                }
                Ok(())
            }
            ListExpr::Comprehension { element, clauses } => self.generate(element, clauses, out),
        }
    }

    fn generate(&mut self, element: &Expr, clauses: &[Clause], out: &mut Vec<i64>) -> Result<(), DslError> {
        let Some((first, rest)) = clauses.split_first() else {
            out.push(self.integer(element)?);
            return Ok(());
        };
        match first {
            Clause::Guard(g) => {
                if self.boolean(g)? {
                    self.generate(element, rest, out)?;
                }
                Ok(())
            }
            Clause::Generator { binder, range } => {
                let lo = self.integer(&range.lo)?;
                let hi = self.integer(&range.hi)?;
                for v in lo..=hi {
                    self.env.push((binder.clone(), v));
                    let r = self.generate(element, rest, out);
                    self.env.pop();
                    r?;
                }
                Ok(())
            }
        }
    }
}
