// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

use std::collections::BTreeSet;

use crate::dsl::{BinOp, Expr, ModelAST, Quantifier, Range, VarDecl};

use super::{Predicate, QmError, QualSpec, SeriesSpec};

fn int(n: i64) -> Expr {
    Expr::Int(n)
}

fn var(n: &str) -> Expr {
    Expr::name(n)
}

fn at(matrix: &str, i: Expr) -> Expr {
    Expr::index(matrix, i)
}

fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::bin(op, a, b)
}

fn minus(a: Expr, k: i64) -> Expr {
    if k == 0 {
        a
    } else {
        bin(BinOp::Sub, a, int(k))
    }
}

fn forall(binder: &str, lo: i64, hi: i64, body: Expr) -> Expr {
    Expr::quant(Quantifier::ForAll, binder, int(lo), int(hi), body)
}

fn matrix(name: String, lo: i64, hi: i64, dlo: i64, dhi: i64) -> VarDecl {
    VarDecl {
        name,
        index: Some(Range {
            lo: int(lo),
            hi: int(hi),
        }),
        domain: Range {
            lo: int(dlo),
            hi: int(dhi),
        },
    }
}

fn fragment(decls: Vec<VarDecl>, constraints: Vec<Expr>) -> ModelAST {
    ModelAST {
        params: Vec::new(),
        decls,
        constraints,
    }
}

/// Declares the series with `order` difference levels and defines them.
pub fn derivative_chain(s: &SeriesSpec, order: u8) -> Result<ModelAST, QmError> {
    if order > 2 {
        return Err(QmError::InvalidSeries(format!("order {order} for `{}`", s.name)));
    }
    if s.max < order as i64 + 1 {
        return Err(QmError::HorizonTooShort {
            series: s.name.clone(),
            max: s.max,
            order,
        });
    }
    s.check()?;
    let (x, y, z) = (s.values(), s.first_difference(), s.second_difference());
    let mut decls = vec![matrix(x.clone(), 0, s.max, 0, s.scale)];
    let mut constraints = Vec::new();
    if order >= 1 {
        decls.push(matrix(y.clone(), 1, s.max, -s.r, s.r));
        let i = var("i");
        constraints.push(forall(
            "i",
            1,
            s.max,
            bin(
                BinOp::Eq,
                at(&y, i.clone()),
                bin(BinOp::Sub, at(&x, i.clone()), at(&x, minus(i, 1))),
            ),
        ));
    }
    if order >= 2 {
        decls.push(matrix(z.clone(), 1, s.max - 1, -s.r, s.r));
        let j = var("j");
        constraints.push(forall(
            "j",
            1,
            s.max - 1,
            bin(
                BinOp::Eq,
                at(&z, j.clone()),
                bin(BinOp::Sub, at(&y, bin(BinOp::Add, j.clone(), int(1))), at(&y, j)),
            ),
        ));
    }
    Ok(fragment(decls, constraints))
}

fn require_first(s: &SeriesSpec) -> Result<(), QmError> {
    if s.order < 1 {
        return Err(QmError::RequiresFirstDerivative { series: s.name.clone() });
    }
    Ok(())
}

/// One peak `p` in `window`: rising strictly before it, falling strictly
/// after it, `x[p] = scale` and `y[p] = 0`.
pub fn unique_peak(s: &SeriesSpec, window: (i64, i64)) -> Result<ModelAST, QmError> {
    s.check()?;
    require_first(s)?;
    let (lo, hi) = window;
    if lo > hi || lo < 1 || hi > s.max {
        return Err(QmError::OutOfRange(format!(
            "peak window {lo}..{hi} of `{}` not within 1..{}",
            s.name, s.max
        )));
    }
    let (x, y) = (s.values(), s.first_difference());
    let (i, p) = (var("i"), var("p"));
    let shape = forall(
        "i",
        1,
        s.max,
        bin(
            BinOp::And,
            bin(
                BinOp::Implies,
                bin(BinOp::Lt, i.clone(), p.clone()),
                bin(BinOp::Gt, at(&y, i.clone()), int(0)),
            ),
            bin(
                BinOp::Implies,
                bin(BinOp::Gt, i.clone(), p.clone()),
                bin(BinOp::Lt, at(&y, i), int(0)),
            ),
        ),
    );
    let body = Expr::conjunction(vec![
        shape,
        bin(BinOp::Eq, at(&x, p.clone()), int(s.scale)),
        bin(BinOp::Eq, at(&y, p), int(0)),
    ]);
    let peak = Expr::quant(Quantifier::Exists, "p", int(lo), int(hi), body);
    Ok(fragment(Vec::new(), vec![peak]))
}

/// `|z[i]| < bound` for every `i > from`. Empty when no such `i` exists.
pub fn smoothness_bound(s: &SeriesSpec, bound: i64, from: i64) -> Result<ModelAST, QmError> {
    s.check()?;
    if s.order < 2 {
        return Err(QmError::RequiresSecondDerivative { series: s.name.clone() });
    }
    if bound < 1 {
        return Err(QmError::OutOfRange(format!(
            "smoothness bound {bound} must be positive"
        )));
    }
    let lo = (from + 1).max(1);
    let hi = s.max - 1;
    if lo > hi {
        return Ok(ModelAST::default());
    }
    let z = s.second_difference();
    let body = bin(BinOp::Lt, Expr::Abs(Box::new(at(&z, var("i")))), int(bound));
    Ok(fragment(Vec::new(), vec![forall("i", lo, hi, body)]))
}

/// `x[i] = 0` for every `i <= t`.
pub fn zero_until(s: &SeriesSpec, t: i64) -> Result<ModelAST, QmError> {
    s.check()?;
    if !(0..=s.max).contains(&t) {
        return Err(QmError::OutOfRange(format!(
            "zero-until index {t} of `{}` outside 0..{}",
            s.name, s.max
        )));
    }
    let body = bin(BinOp::Eq, at(&s.values(), var("i")), int(0));
    Ok(fragment(Vec::new(), vec![forall("i", 0, t, body)]))
}

/// `b` follows `a` after `lag` steps: its first difference has the sign
/// of `a`'s `lag` steps earlier, and `100·b[i] ≤ scale_pct·a[i-lag] + slack`.
pub fn lagged_coupling(
    a: &SeriesSpec,
    b: &SeriesSpec,
    lag: i64,
    scale_pct: i64,
    slack: i64,
) -> Result<ModelAST, QmError> {
    a.check()?;
    b.check()?;
    require_first(a)?;
    require_first(b)?;
    let horizon = a.max.min(b.max);
    if lag < 0 || lag >= horizon {
        return Err(QmError::LagTooLarge { lag, horizon });
    }
    if !(1..=100).contains(&scale_pct) {
        return Err(QmError::OutOfRange(format!(
            "coupling scale {scale_pct} outside 1..100"
        )));
    }
    let last = b.max.min(a.max + lag);
    let (ya, yb) = (a.first_difference(), b.first_difference());
    let i = var("i");
    let earlier = minus(i.clone(), lag);
    let follows = |rel: BinOp| {
        bin(
            BinOp::Implies,
            bin(rel, at(&ya, earlier.clone()), int(0)),
            bin(rel, at(&yb, i.clone()), int(0)),
        )
    };
    let sign = forall(
        "i",
        lag + 1,
        last,
        Expr::conjunction(vec![follows(BinOp::Gt), follows(BinOp::Eq), follows(BinOp::Lt)]),
    );
    let cap = forall(
        "i",
        lag,
        last,
        bin(BinOp::Le, bin(BinOp::Mul, int(100), at(&b.values(), i.clone())), {
            let scaled = bin(BinOp::Mul, int(scale_pct), at(&a.values(), earlier.clone()));
            if slack == 0 {
                scaled
            } else {
                bin(BinOp::Add, scaled, int(slack))
            }
        }),
    );
    Ok(fragment(Vec::new(), vec![sign, cap]))
}

/// Joins declarations, difference chains, predicates and couplings.
pub fn assemble(spec: &QualSpec) -> Result<ModelAST, QmError> {
    let mut seen = BTreeSet::new();
    let mut model = ModelAST::default();
    for s in &spec.series {
        if !seen.insert(s.name.as_str()) {
            return Err(QmError::DuplicateSeries { name: s.name.clone() });
        }
        model.extend(derivative_chain(s, s.order)?);
    }
    for p in &spec.predicates {
        let part = match p {
            Predicate::Peak { series, window } => {
                let s = spec.series(series)?;
                unique_peak(s, (s.landmark(&window.0)?, s.landmark(&window.1)?))?
            }
            Predicate::ZeroUntil { series, until } => {
                let s = spec.series(series)?;
                zero_until(s, s.landmark(until)?)?
            }
            Predicate::Smooth { series, bound, from } => {
                let s = spec.series(series)?;
                smoothness_bound(s, *bound, s.landmark(from)?)?
            }
        };
        model.extend(part);
    }
    for c in &spec.couplings {
        let a = spec.series(&c.from)?;
        let b = spec.series(&c.to)?;
        model.extend(lagged_coupling(a, b, c.lag, c.scale_pct, c.slack)?);
    }
    Ok(model)
}
