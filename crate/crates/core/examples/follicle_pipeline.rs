// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! The whole command-line pipeline on the three-series follicle spec:
//! check, sample, fit against boundary facts, rank.
//!
//! cargo run --example follicle_pipeline

use std::path::Path;

fn run(args: &[&str]) -> i32 {
    println!("$ qualmod {}", args.join(" "));
    qualmod::cli::run(
        std::iter::once("qualmod").chain(args.iter().copied()),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}

fn main() {
    let models = Path::new(env!("CARGO_MANIFEST_DIR")).join("models");
    let dir = std::env::temp_dir().join("qualmod-follicles");
    std::fs::create_dir_all(&dir).expect("temporary directory");
    let spec = models.join("follicles.qspec");
    let facts = models.join("follicles.facts");
    let (sols, fits, ranked) = (dir.join("f.sol"), dir.join("f.fit"), dir.join("f.rank"));
    let p = |p: &Path| p.to_str().unwrap().to_string();

    let steps = [
        vec!["check".to_string(), p(&spec)],
        vec![
            "sample".into(),
            p(&spec),
            "10".into(),
            "--seed".into(),
            "1".into(),
            "--out".into(),
            p(&sols),
        ],
        vec![
            "fit".into(),
            p(&sols),
            "--facts".into(),
            p(&facts),
            "--out".into(),
            p(&fits),
        ],
        vec!["rank".into(), p(&fits), "--out".into(), p(&ranked)],
    ];
    for step in &steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        let code = run(&args);
        if code != 0 {
            std::process::exit(code);
        }
    }
    print!("{}", std::fs::read_to_string(&ranked).unwrap());
}
