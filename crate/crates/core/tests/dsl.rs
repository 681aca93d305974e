// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use qualmod::dsl::{
    error_pos, parse_expr, parse_model, tokenize, validate, BinOp, Clause, DslError, Expr, ListExpr, Quantifier, Range,
    TokenKind,
};

#[test]
fn corpus_round_trips_through_printing() {
    for m in common::corpus() {
        let ast = parse_model(&m.source).unwrap();
        let printed = ast.to_string();
        let again = parse_model(&printed).unwrap_or_else(|e| panic!("{}: {e}\n{printed}", m.name));
        assert_eq!(ast, again, "{}", m.name);
    }
}

#[test]
fn single_population_model_instantiates() {
    let src = std::fs::read_to_string(common::models_dir().join("table1.qm")).unwrap();
    let bindings = BTreeMap::from([
        ("max".to_string(), 20),
        ("r".to_string(), 10),
        ("birth".to_string(), 3),
        ("top".to_string(), 100),
    ]);
    let typed = validate(&parse_model(&src).unwrap(), &bindings).unwrap();
    let y = typed.decl("y").unwrap();
    assert_eq!(y.index, Some((1, 20)));
    assert_eq!(y.domain, (-10, 10));
    assert_eq!(typed.decl("x").unwrap().index, Some((0, 20)));
    assert_eq!(typed.cells().len(), 21 + 20 + 19);
}

#[test]
fn tokens_carry_positions() {
    let toks = tokenize("find x : [int(0..max)] of int(0..100)").unwrap();
    assert_eq!(toks[0].kind, TokenKind::Find);
    assert!(tokenize("").unwrap().is_empty());
    match tokenize("x @ y") {
        Err(DslError::IllegalCharacter { pos, .. }) => assert_eq!((pos.line, pos.col), (1, 3)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn syntax_errors_report_a_position() {
    let err = parse_model("find x : of").unwrap_err();
    assert!(matches!(err, DslError::Syntax { .. }));
    assert!(error_pos(&err).is_some());
}

#[test]
fn validation_errors() {
    let ast = parse_model("find x : [int(0..max)] of int(0..3)\nforAll i : int(0..max) . x[i] = x[i-1]").unwrap();
    let bind = BTreeMap::from([("max".to_string(), 3)]);
    assert!(matches!(validate(&ast, &bind), Err(DslError::IndexOutOfRange { .. })));
    assert!(matches!(
        validate(&ast, &BTreeMap::new()),
        Err(DslError::UnboundParameter { name }) if name == "max"
    ));
}

#[test]
fn reference_evaluator_agrees_with_hand_check() {
    let ast = parse_model("find x : [int(1..2)] of int(0..3)\nx[1] < x[2] -> abs(x[1] - x[2]) = 1").unwrap();
    let typed = validate(&ast, &BTreeMap::new()).unwrap();
    let at = |a: i64, b: i64| {
        let values = [("x[1]".to_string(), a), ("x[2]".to_string(), b)].into_iter().collect();
        typed.satisfied_by(&values).unwrap()
    };
    assert!(at(1, 2));
    assert!(!at(0, 2));
    assert!(at(3, 0));
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-20i64..20).prop_map(Expr::Int),
        any::<bool>().prop_map(Expr::Bool),
        prop::sample::select(vec!["a", "b", "x", "k"]).prop_map(Expr::name),
        (prop::sample::select(vec!["m", "n"]), 0i64..5).prop_map(|(m, i)| Expr::index(m, Expr::Int(i))),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let ops = vec![
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
        BinOp::Implies,
    ];
    leaf().prop_recursive(4, 40, 3, move |inner| {
        prop_oneof![
            (prop::sample::select(ops.clone()), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Expr::bin(op, a, b)),
            inner.clone().prop_map(|e| Expr::Abs(Box::new(e))),
            inner.clone().prop_map(|e| Expr::Not(Box::new(e))),
            inner
                .clone()
                .prop_filter("negated literals fold", |e| !matches!(e, Expr::Int(_)))
                .prop_map(|e| Expr::Neg(Box::new(e))),
            (any::<bool>(), 0i64..3, 0i64..5, inner.clone()).prop_map(|(all, lo, hi, body)| {
                let kind = if all { Quantifier::ForAll } else { Quantifier::Exists };
                Expr::quant(kind, "i", Expr::Int(lo), Expr::Int(hi), body)
            }),
            prop::collection::vec(inner.clone(), 1..4).prop_map(|v| Expr::AllDiff(ListExpr::Explicit(v))),
            (inner.clone(), inner).prop_map(|(el, guard)| Expr::AllDiff(ListExpr::Comprehension {
                element: Box::new(el),
                clauses: vec![
                    Clause::Generator {
                        binder: "j".into(),
                        range: Range {
                            lo: Expr::Int(0),
                            hi: Expr::Int(3)
                        }
                    },
                    Clause::Guard(guard)
                ],
            })),
        ]
    })
}

proptest! {
    #[test]
    fn printed_expressions_reparse_identically(e in expr()) {
        let text = e.to_string();
        let back = parse_expr(&tokenize(&text).unwrap()).unwrap();
        prop_assert_eq!(back, e, "{}", text);
    }
}
