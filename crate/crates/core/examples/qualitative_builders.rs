// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! Build a behaviour spec from the qualitative builders and print the
//! model they produce.
//!
//! cargo run --example qualitative_builders

use qualmod::qm::{assemble, Coupling, Landmark, Predicate, QualSpec, SeriesSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QualSpec {
        series: vec![
            SeriesSpec::new("P", 6, 60),
            SeriesSpec::new("S", 6, 60).with_order(1).with_landmark("onset", 2),
        ],
        predicates: vec![
            Predicate::Peak {
                series: "P".into(),
                window: (Landmark::Index(1), Landmark::Index(3)),
            },
            Predicate::Smooth {
                series: "P".into(),
                bound: 50,
                from: Landmark::Index(1),
            },
            Predicate::ZeroUntil {
                series: "S".into(),
                until: Landmark::Named("onset".into()),
            },
        ],
        couplings: vec![Coupling {
            from: "P".into(),
            to: "S".into(),
            lag: 2,
            scale_pct: 100,
            slack: 0,
        }],
    };
    let model = assemble(&spec)?;
    println!("{} expression nodes", model.node_count());
    print!("{model}");
    Ok(())
}
