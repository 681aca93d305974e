// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Enumerate, then sample, the coarse single-population model.
//!
//! cargo run --example solve_and_sample

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use qualmod::cli::load_model;
use qualmod::flatten::{compile, FlattenOptions};
use qualmod::solver::{check_solution, format_solution, format_stats, solve, Mode, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("models/table1.qm");
    let params = BTreeMap::from([
        ("max".to_string(), 6),
        ("r".to_string(), 6),
        ("birth".to_string(), 3),
        ("top".to_string(), 6),
    ]);
    let typed = load_model(&path, &std::fs::read_to_string(&path)?, &params)?;
    let inst = compile(&typed, &FlattenOptions::default())?;

    let all = solve(
        &inst,
        &SearchConfig {
            mode: Mode::All,
            ..Default::default()
        },
    )?;
    println!("all: {}", format_stats(&all.stats, true));

    let cfg = SearchConfig {
        mode: Mode::Sample(25),
        seed: 7,
        ..Default::default()
    };
    let sampled = solve(&inst, &cfg)?;
    let distinct: BTreeSet<_> = sampled.solutions.iter().map(|s| s.values.clone()).collect();
    println!(
        "sampled {} solutions, {} distinct",
        sampled.solutions.len(),
        distinct.len()
    );
    for s in sampled.solutions.iter().take(3) {
        assert!(check_solution(&inst, &s.values)?);
        println!("{}", format_solution(&inst, s));
    }
    Ok(())
}
