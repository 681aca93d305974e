// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::collections::{BTreeMap, HashMap};

use super::ast::{BinOp, Clause, Expr, ListExpr, ModelAST, Range};
use super::DslError;

/// A declaration with every bound evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteDecl {
    pub name: String,
    /// Inclusive index range; `None` for a scalar variable.
    pub index: Option<(i64, i64)>,
    /// Inclusive value domain.
    pub domain: (i64, i64),
}

/// A model with parameters substituted, types checked and statically
/// analysable matrix accesses bounds-checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedModel {
    pub bindings: BTreeMap<String, i64>,
    pub decls: Vec<ConcreteDecl>,
    /// Constraints with every parameter replaced by its integer value.
    pub constraints: Vec<Expr>,
}

impl TypedModel {
    pub fn decl(&self, name: &str) -> Option<&ConcreteDecl> {
        self.decls.iter().find(|d| d.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "integer",
            Ty::Bool => "boolean",
        }
    }
}

pub fn validate(ast: &ModelAST, bindings: &BTreeMap<String, i64>) -> Result<TypedModel, DslError> {
    for p in &ast.params {
        if !bindings.contains_key(p) {
            return Err(DslError::UnboundParameter { name: p.clone() });
        }
    }
    let params: HashMap<&str, i64> = ast.params.iter().map(|p| (p.as_str(), bindings[p])).collect();

    let mut decls = Vec::with_capacity(ast.decls.len());
    for d in &ast.decls {
        let index = match &d.index {
            Some(r) => Some(eval_range(r, &params, &d.name)?),
            None => None,
        };
        let domain = eval_range(&d.domain, &params, &d.name)?;
        decls.push(ConcreteDecl {
            name: d.name.clone(),
            index,
            domain,
        });
    }

    let mut checker = Checker {
        params: &params,
        decls: &decls,
        scope: Vec::new(),
    };
    let mut constraints = Vec::with_capacity(ast.constraints.len());
    for c in &ast.constraints {
        let substituted = checker.substitute(c)?;
        let ty = checker.type_of(&substituted)?;
        if ty != Ty::Bool {
            return Err(DslError::TypeError {
                message: format!("constraint `{substituted}` is {}, expected boolean", ty.name()),
            });
        }
        checker.check_indices(&substituted)?;
        constraints.push(substituted);
    }

    Ok(TypedModel {
        bindings: bindings.clone(),
        decls,
        constraints,
    })
}

fn eval_range(r: &Range, params: &HashMap<&str, i64>, decl: &str) -> Result<(i64, i64), DslError> {
    let lo = eval_const(&r.lo, params)?;
    let hi = eval_const(&r.hi, params)?;
    if lo > hi {
        return Err(DslError::EmptyDomain {
            decl: decl.to_string(),
            lo,
            hi,
        });
    }
    Ok((lo, hi))
}

fn eval_const(e: &Expr, params: &HashMap<&str, i64>) -> Result<i64, DslError> {
    let not_const = || DslError::TypeError {
        message: format!("`{e}` must be a constant integer expression"),
    };
    Ok(match e {
        Expr::Int(n) => *n,
        Expr::Name(n) => *params.get(n.as_str()).ok_or_else(not_const)?,
        Expr::Neg(a) => -eval_const(a, params)?,
        Expr::Abs(a) => eval_const(a, params)?.abs(),
        Expr::Binary(op, a, b) if op.is_arithmetic() => {
            let (a, b) = (eval_const(a, params)?, eval_const(b, params)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                _ => a * b,
            }
        }
        _ => return Err(not_const()),
    })
}

/// Affine form `constant + Σ coef·binder`.
#[derive(Debug, Clone, Default)]
struct Affine {
    constant: i64,
    coefs: Vec<(String, i64)>,
}

impl Affine {
    fn add(mut self, other: Affine, sign: i64) -> Affine {
        self.constant += sign * other.constant;
        for (b, c) in other.coefs {
            match self.coefs.iter_mut().find(|(n, _)| *n == b) {
                Some(slot) => slot.1 += sign * c,
                None => self.coefs.push((b, sign * c)),
            }
        }
        self
    }

    fn scale(mut self, k: i64) -> Affine {
        self.constant *= k;
        for (_, c) in &mut self.coefs {
            *c *= k;
        }
        self
    }

    fn as_const(&self) -> Option<i64> {
        self.coefs.iter().all(|(_, c)| *c == 0).then_some(self.constant)
    }
}

struct Checker<'a> {
    params: &'a HashMap<&'a str, i64>,
    decls: &'a [ConcreteDecl],
    /// Binders in scope with their static interval, when one is known.
    scope: Vec<(String, Option<(i64, i64)>)>,
}

impl Checker<'_> {
    fn is_binder(&self, name: &str) -> bool {
        self.scope.iter().any(|(b, _)| b == name)
    }

    fn bind(&mut self, binder: &str) -> Result<(), DslError> {
        if self.decls.iter().any(|d| d.name == binder) || self.params.contains_key(binder) {
            return Err(DslError::ShadowedName {
                name: binder.to_string(),
            });
        }
        self.scope.push((binder.to_string(), None));
        Ok(())
    }

    fn substitute(&mut self, e: &Expr) -> Result<Expr, DslError> {
        Ok(match e {
            Expr::Int(_) | Expr::Bool(_) => e.clone(),
            Expr::Name(n) => {
                if self.is_binder(n) {
                    e.clone()
                } else if let Some(v) = self.params.get(n.as_str()) {
                    Expr::Int(*v)
                } else {
                    e.clone()
                }
            }
            Expr::Index(m, i) => Expr::Index(m.clone(), Box::new(self.substitute(i)?)),
            Expr::Neg(a) => Expr::Neg(Box::new(self.substitute(a)?)),
            Expr::Abs(a) => Expr::Abs(Box::new(self.substitute(a)?)),
            Expr::Not(a) => Expr::Not(Box::new(self.substitute(a)?)),
            Expr::Binary(op, a, b) => Expr::bin(*op, self.substitute(a)?, self.substitute(b)?),
            Expr::Quant {
                kind,
                binder,
                range,
                body,
            } => {
                let range = self.substitute_range(range)?;
                self.bind(binder)?;
                let body = self.substitute(body);
                self.scope.pop();
                Expr::Quant {
                    kind: *kind,
                    binder: binder.clone(),
                    range: Box::new(range),
                    body: Box::new(body?),
                }
            }
            Expr::AllDiff(ListExpr::Explicit(items)) => Expr::AllDiff(ListExpr::Explicit(
                items.iter().map(|i| self.substitute(i)).collect::<Result<_, _>>()?,
            )),
            Expr::AllDiff(ListExpr::Comprehension { element, clauses }) => {
                let depth = self.scope.len();
                let mut out = Vec::with_capacity(clauses.len());
                let mut result = Ok(());
                for c in clauses {
                    match c {
                        Clause::Generator { binder, range } => {
                            let range = match self.substitute_range(range) {
                                Ok(r) => r,
                                Err(err) => {
                                    result = Err(err);
                                    break;
                                }
                            };
                            if let Err(err) = self.bind(binder) {
                                result = Err(err);
                                break;
                            }
                            out.push(Clause::Generator {
                                binder: binder.clone(),
                                range,
                            });
                        }
                        Clause::Guard(g) => match self.substitute(g) {
                            Ok(g) => out.push(Clause::Guard(g)),
                            Err(err) => {
                                result = Err(err);
                                break;
                            }
                        },
                    }
                }
                let element = result.and_then(|_| self.substitute(element));
                self.scope.truncate(depth);
                Expr::AllDiff(ListExpr::Comprehension {
                    element: Box::new(element?),
                    clauses: out,
                })
            }
        })
    }

    fn substitute_range(&mut self, r: &Range) -> Result<Range, DslError> {
        Ok(Range {
            lo: self.substitute(&r.lo)?,
            hi: self.substitute(&r.hi)?,
        })
    }

    /// True when the expression reads a decision variable.
    fn mentions_variable(&self, e: &Expr) -> bool {
        match e {
            Expr::Int(_) | Expr::Bool(_) => false,
            Expr::Name(n) => !self.is_binder(n),
            Expr::Index(..) => true,
            Expr::Neg(a) | Expr::Abs(a) | Expr::Not(a) => self.mentions_variable(a),
            Expr::Binary(_, a, b) => self.mentions_variable(a) || self.mentions_variable(b),
            Expr::Quant { .. } | Expr::AllDiff(_) => true,
        }
    }

    fn expect(&mut self, e: &Expr, want: Ty) -> Result<(), DslError> {
        let got = self.type_of(e)?;
        if got != want {
            return Err(DslError::TypeError {
                message: format!("`{e}` is {}, expected {}", got.name(), want.name()),
            });
        }
        Ok(())
    }

    fn constant_int(&mut self, e: &Expr, what: &str) -> Result<(), DslError> {
        self.expect(e, Ty::Int)?;
        if self.mentions_variable(e) {
            return Err(DslError::TypeError {
                message: format!("{what} `{e}` must not depend on decision variables"),
            });
        }
        Ok(())
    }

    fn type_of(&mut self, e: &Expr) -> Result<Ty, DslError> {
        Ok(match e {
            Expr::Int(_) => Ty::Int,
            Expr::Bool(_) => Ty::Bool,
            Expr::Name(n) => {
                if self.is_binder(n) {
                    Ty::Int
                } else {
                    match self.decls.iter().find(|d| &d.name == n) {
                        Some(d) if d.index.is_none() => Ty::Int,
                        Some(_) => {
                            return Err(DslError::TypeError {
                                message: format!("matrix `{n}` used without an index"),
                            })
                        }
                        None => return Err(DslError::UnboundParameter { name: n.clone() }),
                    }
                }
            }
            Expr::Index(m, i) => {
                match self.decls.iter().find(|d| &d.name == m) {
                    Some(d) if d.index.is_some() => {}
                    Some(_) => {
                        return Err(DslError::TypeError {
                            message: format!("scalar `{m}` cannot be indexed"),
                        })
                    }
                    None => return Err(DslError::UnboundParameter { name: m.clone() }),
                }
                self.expect(i, Ty::Int)?;
                if self.mentions_variable(i) {
                    return Err(DslError::VariableIndex { access: e.to_string() });
                }
                Ty::Int
            }
            Expr::Neg(a) | Expr::Abs(a) => {
                self.expect(a, Ty::Int)?;
                Ty::Int
            }
            Expr::Not(a) => {
                self.expect(a, Ty::Bool)?;
                Ty::Bool
            }
            Expr::Binary(op, a, b) => {
                let operand = if op.is_logical() { Ty::Bool } else { Ty::Int };
                self.expect(a, operand)?;
                self.expect(b, operand)?;
                if op.is_arithmetic() {
                    Ty::Int
                } else {
                    Ty::Bool
                }
            }
            Expr::Quant {
                binder, range, body, ..
            } => {
                self.constant_int(&range.lo, "quantifier bound")?;
                self.constant_int(&range.hi, "quantifier bound")?;
                self.scope.push((binder.clone(), None));
                let r = self.expect(body, Ty::Bool);
                self.scope.pop();
                r?;
                Ty::Bool
            }
            Expr::AllDiff(ListExpr::Explicit(items)) => {
                for i in items {
                    self.expect(i, Ty::Int)?;
                }
                Ty::Bool
            }
            Expr::AllDiff(ListExpr::Comprehension { element, clauses }) => {
                let depth = self.scope.len();
                let mut r = Ok(());
                for c in clauses {
                    r = match c {
                        Clause::Generator { binder, range } => {
                            let checked = self
                                .constant_int(&range.lo, "generator bound")
                                .and_then(|_| self.constant_int(&range.hi, "generator bound"));
                            self.scope.push((binder.clone(), None));
                            checked
                        }
                        Clause::Guard(g) => self.expect(g, Ty::Bool).and_then(|_| {
                            if self.mentions_variable(g) {
                                Err(DslError::TypeError {
                                    message: format!("comprehension guard `{g}` must not depend on decision variables"),
                                })
                            } else {
                                Ok(())
                            }
                        }),
                    };
                    if r.is_err() {
                        break;
                    }
                }
                let r = r.and_then(|_| self.expect(element, Ty::Int));
                self.scope.truncate(depth);
                r?;
                Ty::Bool
            }
        })
    }

    fn affine(&self, e: &Expr) -> Option<Affine> {
        match e {
            Expr::Int(n) => Some(Affine {
                constant: *n,
                coefs: Vec::new(),
            }),
            Expr::Name(n) if self.is_binder(n) => Some(Affine {
                constant: 0,
                coefs: vec![(n.clone(), 1)],
            }),
            Expr::Neg(a) => Some(self.affine(a)?.scale(-1)),
            Expr::Binary(BinOp::Add, a, b) => Some(self.affine(a)?.add(self.affine(b)?, 1)),
            Expr::Binary(BinOp::Sub, a, b) => Some(self.affine(a)?.add(self.affine(b)?, -1)),
            Expr::Binary(BinOp::Mul, a, b) => {
                let (a, b) = (self.affine(a)?, self.affine(b)?);
                if let Some(k) = a.as_const() {
                    Some(b.scale(k))
                } else {
                    b.as_const().map(|k| a.scale(k))
                }
            }
            _ => None,
        }
    }

    /// Exact range of an affine expression over the current binder intervals.
    fn affine_range(&self, e: &Expr) -> Option<(i64, i64)> {
        let a = self.affine(e)?;
        let (mut lo, mut hi) = (a.constant, a.constant);
        for (b, c) in &a.coefs {
            if *c == 0 {
                continue;
            }
            let (blo, bhi) = self.scope.iter().rev().find(|(n, _)| n == b).and_then(|(_, r)| *r)?;
            let (p, q) = (c * blo, c * bhi);
            lo += p.min(q);
            hi += p.max(q);
        }
        Some((lo, hi))
    }

    /// Pushes a binder with its static interval. Returns false when the
    /// range is provably empty, in which case the body is never expanded.
    fn push_static(&mut self, binder: &str, range: &Range) -> bool {
        let lo = self.affine_range(&range.lo);
        let hi = self.affine_range(&range.hi);
        let interval = match (lo, hi) {
            (Some((lmin, _)), Some((_, hmax))) => {
                if hmax < lmin {
                    return false;
                }
                Some((lmin, hmax))
            }
            _ => None,
        };
        self.scope.push((binder.to_string(), interval));
        true
    }

    fn check_indices(&mut self, e: &Expr) -> Result<(), DslError> {
        match e {
            Expr::Int(_) | Expr::Bool(_) | Expr::Name(_) => Ok(()),
            Expr::Index(m, i) => {
                let decl = self.decls.iter().find(|d| &d.name == m).expect("type checked");
                let (lo, hi) = decl.index.expect("type checked");
                if let Some((ilo, ihi)) = self.affine_range(i) {
                    if ilo < lo || ihi > hi {
                        return Err(DslError::IndexOutOfRange {
                            access: e.to_string(),
                            reach: (ilo, ihi),
                            range: (lo, hi),
                        });
                    }
                }
                Ok(())
            }
            Expr::Neg(a) | Expr::Abs(a) | Expr::Not(a) => self.check_indices(a),
            Expr::Binary(_, a, b) => {
                self.check_indices(a)?;
                self.check_indices(b)
            }
            Expr::Quant {
                binder, range, body, ..
            } => {
                if !self.push_static(binder, range) {
                    return Ok(());
                }
                let r = self.check_indices(body);
                self.scope.pop();
                r
            }
            Expr::AllDiff(ListExpr::Explicit(items)) => items.iter().try_for_each(|i| self.check_indices(i)),
            Expr::AllDiff(ListExpr::Comprehension { element, clauses }) => {
                let depth = self.scope.len();
                let mut live = true;
                for c in clauses {
                    if let Clause::Generator { binder, range } = c {
                        if !self.push_static(binder, range) {
                            live = false;
                            break;
                        }
                    }
                }
                let r = if live { self.check_indices(element) } else { Ok(()) };
                self.scope.truncate(depth);
                r
            }
        }
    }
}
