// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use qualmod::quant::parse_fit_record;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = qualmod::cli::run(
        std::iter::once("qualmod").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "ok.qm", "find x : [int(0..n)] of int(0..3)\nx[0] < x[n]");
    let (code, out, _) = run(&["check", &good, "--param", "n=2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("ok: 3 cells"));

    let bad = write(dir.path(), "bad.qm", "find x : int(0..3)\nx < < 2");
    let (code, _, err) = run(&["check", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.qm:2:"), "{err}");

    let (code, _, _) = run(&["check", &good]);
    assert_eq!(code, 2, "unbound parameter");
    let (code, _, _) = run(&["check", "/nonexistent/model.qm"]);
    assert_eq!(code, 3);
}

#[test]
fn solve_exit_codes_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let unsat = write(
        dir.path(),
        "unsat.qm",
        "find x : [int(1..3)] of int(0..1)\nallDiff([x[i] | i : int(1..3)])",
    );
    assert_eq!(run(&["solve", &unsat]).0, 1);

    let big = write(
        dir.path(),
        "big.qm",
        "find x : [int(1..8)] of int(0..7)\nallDiff([x[i] | i : int(1..8)])",
    );
    let out = dir.path().join("big.sol");
    let (code, _, _) = run(&[
        "solve",
        &big,
        "--mode",
        "all",
        "--limit-nodes",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 4);
    let manifest = fs::read_to_string(dir.path().join("big.sol.manifest")).unwrap();
    assert!(manifest.contains("command=solve\n"));
    assert!(manifest.contains("mode=all\n"));
    assert!(manifest.contains("limit_nodes=100\n"));

    let (code, text, _) = run(&["solve", &big]);
    assert_eq!(code, 0);
    assert_eq!(text.lines().filter(|l| l.starts_with("sol ")).count(), 1);
    assert!(text.lines().last().unwrap().starts_with("stats nodes="));

    assert_eq!(run(&["solve", &big, "--mode", "sample", "zero"]).0, 2);
    assert_eq!(run(&["solve", &big, "--seed", "abc"]).0, 2);
}

#[test]
fn sample_shorthand_and_random_seed_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "m.qm", "find x : [int(1..4)] of int(0..4)\nx[1] <= x[2]");
    let (_, a, _) = run(&["sample", &model, "6", "--seed", "9"]);
    let (_, b, _) = run(&["solve", &model, "--mode", "sample", "6", "--seed", "9"]);
    assert_eq!(a, b);
    assert_eq!(a.lines().filter(|l| l.starts_with("sol ")).count(), 6);

    let out = dir.path().join("r.sol");
    assert_eq!(
        run(&[
            "sample",
            &model,
            "2",
            "--seed",
            "random",
            "--out",
            out.to_str().unwrap()
        ])
        .0,
        0
    );
    let manifest = fs::read_to_string(dir.path().join("r.sol.manifest")).unwrap();
    let seed: u64 = manifest
        .lines()
        .find_map(|l| l.strip_prefix("seed="))
        .unwrap()
        .parse()
        .unwrap();
    let (_, replay, _) = run(&["sample", &model, "2", "--seed", &seed.to_string()]);
    assert_eq!(replay, fs::read_to_string(&out).unwrap());
}

const EXACT: &str = "sol 0 5 F0[0]=4096 F0[1]=2048 F0[2]=1024 F0[3]=512 F0[4]=256 F0[5]=128 \
F1[0]=0 F1[1]=1024 F1[2]=1024 F1[3]=768 F1[4]=512 F1[5]=320 \
F2[0]=0 F2[1]=0 F2[2]=512 F2[3]=896 F2[4]=1056 F2[5]=1048\nstats nodes=1 solutions=1\n";

#[test]
fn fit_recovers_exact_rates() {
    let dir = tempfile::tempdir().unwrap();
    let sols = write(dir.path(), "exact.sol", EXACT);
    let facts = write(
        dir.path(),
        "f.facts",
        "peak F0 100\npeak F1 100\npeak F2 100\nzero_at F1 0\nbelow F0 end 100\n",
    );
    let (code, text, _) = run(&["fit", &sols, "--facts", &facts]);
    assert_eq!(code, 0);
    let rec = parse_fit_record(text.lines().next().unwrap()).unwrap();
    assert_eq!(rec.provenance, "0:5");
    let want = [
        ("kT0", 0.25),
        ("kL0", 0.25),
        ("kT1", 0.5),
        ("kL1", 0.0),
        ("kT2", 0.25),
        ("kL2", 0.0),
    ];
    for ((name, got), (wname, w)) in rec.rates.iter().zip(want) {
        assert_eq!(name, wname);
        assert!((got - w).abs() < 1e-9, "{name}={got}");
    }
    assert!(rec.residual < 1e-9);
    assert_eq!(rec.realism, 0.5);
    assert_eq!(rec.grade, 1);
}

#[test]
fn fit_warnings_do_not_fail_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let sols = write(dir.path(), "exact.sol", EXACT);
    let facts = write(dir.path(), "f.facts", "peak F0 300000\nzero_at F0 0\n");
    let (code, text, _) = run(&["fit", &sols, "--facts", &facts]);
    assert_eq!(code, 0);
    assert!(text.starts_with("warn 0:5 "), "{text}");
    assert!(text.contains("F1"));

    let empty = write(dir.path(), "empty.sol", "stats nodes=3 solutions=0\n");
    let (code, text, err) = run(&["fit", &empty, "--facts", &facts]);
    assert_eq!(code, 0);
    assert!(text.is_empty());
    assert!(err.contains("no solutions"));

    let flat = write(dir.path(), "flat.sol", "sol 0 1 F0[0]=0 F0[1]=0 F0[2]=0\n");
    let (code, text, _) = run(&["fit", &flat, "--facts", &facts, "--structure", "F0:TL"]);
    assert_eq!(code, 0);
    assert!(text.lines().next().unwrap().starts_with("fit 0:1 "));
    assert!(text.contains("warn 0:1 unidentifiable kT0,kL0"), "{text}");
}

#[test]
fn rank_marks_the_front() {
    let dir = tempfile::tempdir().unwrap();
    let fits = write(
        dir.path(),
        "x.fit",
        "fit 0:1 kT0=0.1 residual=0 realism=0.5 grade=2\nwarn 0:1 something\n\
         fit 1:2 kT0=0.1 residual=0 realism=0.9 grade=4\nfit 2:3 kT0=0.1 residual=0 realism=0.9 grade=2\n",
    );
    let (code, text, _) = run(&["rank", &fits]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("fit 2:3 ") && lines[0].ends_with("front=1"));
    assert!(lines[1].starts_with("fit 0:1 ") && lines[1].ends_with("front=0"));
    assert!(lines[2].starts_with("fit 1:2 ") && lines[2].ends_with("front=0"));

    let bad = write(
        dir.path(),
        "bad.fit",
        "fit 0:1 kT0=0.1 residual=0 realism=0.5 grade=2\nfit 1:1 realism=oops\n",
    );
    let (code, _, err) = run(&["rank", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");

    let empty = write(dir.path(), "empty.fit", "# nothing\n");
    assert_eq!(run(&["rank", &empty]).0, 1);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qualmod");
    let model = common::models_dir().join("table1.qm");
    let status = Command::new(bin)
        .args([
            "check",
            model.to_str().unwrap(),
            "-p",
            "max=6",
            "-p",
            "r=6",
            "-p",
            "birth=3",
            "-p",
            "top=6",
        ])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let missing = Command::new(bin).args(["check", "/nonexistent.qm"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(3));
    let usage = Command::new(bin).args(["solve"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
