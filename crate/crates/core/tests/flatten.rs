// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

mod common;

use std::collections::{BTreeMap, HashMap};

use qualmod::dsl::{parse_model, validate, TypedModel};
use qualmod::flatten::{compile, expand_model, FlatConstraint, FlattenError, FlattenOptions, Origin};
use qualmod::solver::{brute_force, DEFAULT_BRUTE_FORCE_CAP};

/// Every declared assignment accepted by the reference evaluator.
fn enumerate_by_evaluation(model: &TypedModel) -> Vec<Vec<i64>> {
    let cells = model.cells();
    let mut out = Vec::new();
    let mut values: Vec<i64> = cells.iter().map(|(_, d)| d.0).collect();
    loop {
        let named: HashMap<String, i64> = cells
            .iter()
            .map(|(n, _)| n.clone())
            .zip(values.iter().copied())
            .collect();
        if model.satisfied_by(&named).unwrap() {
            out.push(values.clone());
        }
        let mut k = 0;
        loop {
            if k == values.len() {
                return out;
            }
            if values[k] < cells[k].1 .1 {
                values[k] += 1;
                break;
            }
            values[k] = cells[k].1 .0;
            k += 1;
        }
    }
}

fn space(model: &TypedModel) -> u128 {
    model
        .cells()
        .iter()
        .map(|(_, (lo, hi))| (hi - lo + 1) as u128)
        .product()
}

#[test]
fn encoding_preserves_reference_semantics() {
    let mut checked = 0;
    for m in common::corpus() {
        if space(&m.typed) > 200_000 {
            continue;
        }
        let mut expected = enumerate_by_evaluation(&m.typed);
        expected.sort();
        for cse in [false, true] {
            let inst = compile(
                &m.typed,
                &FlattenOptions {
                    cse,
                    ..Default::default()
                },
            )
            .unwrap();
            let got = brute_force(&inst, DEFAULT_BRUTE_FORCE_CAP).unwrap();
            assert_eq!(got, expected, "{} (cse={cse})", m.name);
        }
        checked += 1;
    }
    assert!(checked >= 12, "only {checked} corpus models were small enough");
}

#[test]
fn instances_are_well_formed() {
    for m in common::corpus() {
        for cse in [false, true] {
            let inst = compile(
                &m.typed,
                &FlattenOptions {
                    cse,
                    ..Default::default()
                },
            )
            .unwrap();
            inst.well_formed().unwrap_or_else(|e| panic!("{}: {e}", m.name));
            assert_eq!(inst.declared_count(), m.typed.cells().len());
            assert!(inst.vars[inst.declared_count()..]
                .iter()
                .all(|v| v.origin == Origin::Auxiliary));
        }
    }
}

#[test]
fn cse_never_grows_the_model() {
    let mut strict = Vec::new();
    for m in common::corpus() {
        let plain = expand_model(
            &m.typed,
            &FlattenOptions {
                cse: false,
                ..Default::default()
            },
        )
        .unwrap();
        let shared = expand_model(&m.typed, &FlattenOptions::default()).unwrap();
        assert!(shared.node_count() <= plain.node_count(), "{}", m.name);
        if shared.node_count() < plain.node_count() {
            strict.push(m.name);
        }
    }
    assert!(strict.iter().any(|n| n == "table1_coarse"), "{strict:?}");
    assert!(strict.iter().any(|n| n == "shared_subexpr"), "{strict:?}");
}

#[test]
fn expansion_cap_is_enforced() {
    let ast = parse_model(
        "find x : [int(0..n)] of int(0..1)\nforAll i : int(0..n) . forAll j : int(0..n) . x[i] <= x[j] + 1",
    )
    .unwrap();
    let typed = validate(&ast, &BTreeMap::from([("n".to_string(), 200)])).unwrap();
    let opts = FlattenOptions {
        cse: true,
        expansion_cap: 10_000,
    };
    assert!(matches!(
        compile(&typed, &opts),
        Err(FlattenError::ExpansionTooLarge { limit: 10_000 })
    ));
}

#[test]
fn implication_encoding() {
    let ast =
        parse_model("find x : [int(1..1)] of int(0..5)\nfind y : [int(1..1)] of int(-3..3)\nx[1] = 3 -> y[1] < 0")
            .unwrap();
    let inst = compile(&validate(&ast, &BTreeMap::new()).unwrap(), &FlattenOptions::default()).unwrap();
    let kinds: Vec<&str> = inst.constraints.iter().map(FlatConstraint::kind).collect();
    assert_eq!(kinds, vec!["reif", "reif", "or"]);
}
