// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Rank candidate models by realism and complexity.
//!
//! cargo run --example pareto_ranking

use qualmod::quant::{rank_candidates, ModelClass};

fn main() {
    let candidates = [
        ("linear chain", 0.6, ModelClass::LinearOde),
        ("switching chain", 0.8, ModelClass::PiecewiseLinearOde),
        ("logistic", 0.8, ModelClass::QuadraticOde),
        ("reaction-diffusion", 1.0, ModelClass::Pde),
        ("decay only", 0.2, ModelClass::LinearOde),
    ];
    let points: Vec<(f64, u8)> = candidates.iter().map(|(_, r, c)| (*r, c.grade())).collect();
    let ranking = rank_candidates(&points, 1e-9);
    println!("front:");
    for i in &ranking.front {
        let (name, realism, class) = candidates[*i];
        println!(
            "  {name:<20} realism={realism} grade={} ({})",
            class.grade(),
            class.tag()
        );
    }
    println!("dominated:");
    for (i, by) in &ranking.dominated {
        println!("  {:<20} by {}", candidates[*i].0, candidates[*by].0);
    }
}
