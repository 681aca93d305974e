// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

mod common;

use qualmod::dsl::validate;
use qualmod::flatten::{compile, FlattenOptions};
use qualmod::qm::{
    assemble, derivative_chain, lagged_coupling, parse_qualspec, smoothness_bound, unique_peak, QmError, SeriesSpec,
};
use qualmod::solver::{solve, Mode, SearchConfig};

#[test]
fn builders_match_direct_evaluation_small() {
    let report = common::oracle::check_all_builders(4).unwrap_or_else(|e| panic!("{e}"));
    assert!(report.len() > 20);
}

#[test]
fn builder_errors() {
    let s = SeriesSpec::new("F", 2, 2).with_scale(2);
    assert!(matches!(derivative_chain(&s, 2), Err(QmError::HorizonTooShort { .. })));
    let flat = SeriesSpec::new("F", 4, 2).with_order(0);
    assert!(matches!(
        unique_peak(&flat, (1, 2)),
        Err(QmError::RequiresFirstDerivative { .. })
    ));
    let one = SeriesSpec::new("F", 4, 2).with_order(1);
    assert!(matches!(
        smoothness_bound(&one, 2, 0),
        Err(QmError::RequiresSecondDerivative { .. })
    ));
    let a = SeriesSpec::new("A", 4, 2);
    assert!(matches!(
        lagged_coupling(&a, &a, 4, 100, 0),
        Err(QmError::LagTooLarge { .. })
    ));
    assert!(matches!(unique_peak(&a, (0, 9)), Err(QmError::OutOfRange(_))));
}

#[test]
fn follicle_spec_is_satisfiable() {
    let text = std::fs::read_to_string(common::models_dir().join("follicles.qspec")).unwrap();
    let spec = parse_qualspec(&text).unwrap();
    assert_eq!(spec.series.len(), 3);
    let model = assemble(&spec).unwrap();
    let typed = validate(&model, &Default::default()).unwrap();
    let inst = compile(&typed, &FlattenOptions::default()).unwrap();
    let cfg = SearchConfig {
        mode: Mode::Sample(3),
        seed: 5,
        ..Default::default()
    };
    let out = solve(&inst, &cfg).unwrap();
    assert_eq!(out.solutions.len(), 3);
    for sol in &out.solutions {
        let f2 = inst.series("F2").unwrap();
        for v in &f2[..=5] {
            assert_eq!(sol.values[*v], 0, "secondary follicles before puberty");
        }
        let f0 = inst.series("F0").unwrap();
        assert!(f0.iter().any(|v| sol.values[*v] == 100));
    }
}

#[test]
fn spec_errors_name_the_line() {
    let err = parse_qualspec("series F0 max=6 r=3\npeak F0 window=1..3\npeak F9 window=1..2\n")
        .and_then(|s| assemble(&s))
        .unwrap_err();
    assert!(matches!(err, QmError::UnknownSeries { .. }), "{err:?}");
    assert!(matches!(
        parse_qualspec("series F0 max=six r=3"),
        Err(QmError::Parse { line: 1, .. })
    ));
}
