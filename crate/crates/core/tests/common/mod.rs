// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub mod oracle;

use qualmod::dsl::{parse_model, validate, TypedModel};

pub struct CorpusModel {
    pub name: String,
    pub source: String,
    pub params: BTreeMap<String, i64>,
    pub typed: TypedModel,
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models")
}

/// Reads `$ params: k=v ...` from the first line that has it.
pub fn header_params(source: &str) -> BTreeMap<String, i64> {
    let line = source
        .lines()
        .find_map(|l| l.strip_prefix("$ params:"))
        .expect("corpus model without a params header");
    line.split_whitespace()
        .map(|kv| {
            let (k, v) = kv.split_once('=').expect("params are k=v");
            (k.to_string(), v.parse().expect("integer parameter"))
        })
        .collect()
}

/// Every corpus model, sorted by file name.
pub fn corpus() -> Vec<CorpusModel> {
    let mut paths: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "qm"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let source = fs::read_to_string(&p).unwrap();
            let params = header_params(&source);
            let ast = parse_model(&source).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            let typed = validate(&ast, &params).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            CorpusModel {
                name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                source,
                params,
                typed,
            }
        })
        .collect()
}
