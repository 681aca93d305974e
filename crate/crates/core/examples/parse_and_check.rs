// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Parse a model, bind its parameters and list the cells it declares.
//!
//! cargo run --example parse_and_check

use std::collections::BTreeMap;

use qualmod::dsl::{parse_model, validate, DslError};

const MODEL: &str = "
given max : int
find x : [int(0..max)] of int(0..100)
find y : [int(1..max)] of int(-10..10)
such that
  forAll i : int(1..max) . y[i] = x[i] - x[i-1]
";

fn main() -> Result<(), DslError> {
    let ast = parse_model(MODEL)?;
    println!("parameters: {:?}", ast.params);
    println!("{ast}");

    let typed = validate(&ast, &BTreeMap::from([("max".to_string(), 4)]))?;
    for (cell, (lo, hi)) in typed.cells() {
        println!("{cell:>5} in {lo}..{hi}");
    }

    // errors carry positions
    if let Err(e) = parse_model("find x : of int(0..1)") {
        println!("rejected: {e}");
    }
    Ok(())
}
