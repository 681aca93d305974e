// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Compare expression sizes and encodings with and without common
//! subexpression elimination.
//!
//! cargo run --example flatten_with_cse

use std::collections::BTreeMap;

use qualmod::dsl::{parse_model, validate};
use qualmod::flatten::{compile, expand_model, FlattenOptions};

const MODEL: &str = "
find x : [int(0..4)] of int(0..4)
such that
  forAll i : int(1..4) . x[i] - x[i-1] > -2 /\\ x[i] - x[i-1] < 2,
  forAll i : int(1..4) . abs(x[i] - x[i-1]) <= 1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let typed = validate(&parse_model(MODEL)?, &BTreeMap::new())?;
    for cse in [false, true] {
        let opts = FlattenOptions {
            cse,
            ..Default::default()
        };
        let expanded = expand_model(&typed, &opts)?;
        let inst = compile(&typed, &opts)?;
        println!(
            "cse={cse}: {} expression nodes, {} auxiliaries, {} constraints",
            expanded.node_count(),
            inst.aux_count(),
            inst.constraints.len()
        );
    }
    let inst = compile(&typed, &FlattenOptions::default())?;
    print!("{}", inst.dump());
    Ok(())
}
