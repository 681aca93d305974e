// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qualmod::cli::load_model;
use qualmod::flatten::{compile, expand_model, FlattenOptions};
use qualmod::quant::{
    dominates, euler_simulate, euler_simulate_substeps, fit_rates, rank_candidates, CompartmentModel, FitStructure,
    Provenance, QuantError,
};
use qualmod::solver::{
    assignment_from_names, brute_force, check_solution, parse_solution, solve, Mode, SearchConfig, Status,
    DEFAULT_BRUTE_FORCE_CAP,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = qualmod::cli::run(
        std::iter::once("qualmod").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8_lossy(&err).into_owned())
}

fn all_mode() -> SearchConfig {
    SearchConfig {
        mode: Mode::All,
        ..Default::default()
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let corpus = common::corpus();
    ensure(corpus.len() >= 20, || format!("corpus has {} models", corpus.len()))?;
    let coarse = corpus
        .iter()
        .find(|m| m.name == "table1_coarse")
        .ok_or("corpus lacks the coarse single-population model")?;
    ensure(
        coarse.params.get("max") == Some(&6)
            && coarse.params.get("r") == Some(&6)
            && coarse.params.get("top") == Some(&6),
        || "coarse model must use max=6, r=6 and values 0..6".into(),
    )?;
    let mut total = 0;
    for m in &corpus {
        let inst = compile(&m.typed, &FlattenOptions::default()).map_err(|e| format!("{}: {e}", m.name))?;
        let out = solve(&inst, &all_mode()).map_err(|e| e.to_string())?;
        ensure(out.status == Status::Complete, || {
            format!("{}: search incomplete", m.name)
        })?;
        let mut got: Vec<Vec<i64>> = out.solutions.into_iter().map(|s| s.values).collect();
        got.sort();
        let expected = brute_force(&inst, DEFAULT_BRUTE_FORCE_CAP).map_err(|e| format!("{}: {e}", m.name))?;
        ensure(got == expected, || {
            format!(
                "{}: search found {} solutions, brute force {}",
                m.name,
                got.len(),
                expected.len()
            )
        })?;
        total += expected.len();
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} models, {total} solutions, {:.1}s",
        corpus.len(),
        elapsed.as_secs_f64()
    ))
}

fn cse_soundness() -> Outcome {
    let mut strict = Vec::new();
    let corpus = common::corpus();
    for m in &corpus {
        let plain_opts = FlattenOptions {
            cse: false,
            ..Default::default()
        };
        let plain = expand_model(&m.typed, &plain_opts).map_err(|e| e.to_string())?;
        let shared = expand_model(&m.typed, &FlattenOptions::default()).map_err(|e| e.to_string())?;
        ensure(shared.node_count() <= plain.node_count(), || {
            format!(
                "{}: {} nodes after, {} before",
                m.name,
                shared.node_count(),
                plain.node_count()
            )
        })?;
        if shared.node_count() < plain.node_count() {
            strict.push(format!("{} {}->{}", m.name, plain.node_count(), shared.node_count()));
        }
        let mut sets = Vec::new();
        for opts in [plain_opts, FlattenOptions::default()] {
            let inst = compile(&m.typed, &opts).map_err(|e| e.to_string())?;
            let sols = solve(&inst, &all_mode()).map_err(|e| e.to_string())?.solutions;
            let count = sols.len();
            let set: BTreeSet<Vec<i64>> = sols.into_iter().map(|s| s.values).collect();
            sets.push((count, set));
        }
        ensure(sets[0] == sets[1], || format!("{}: CSE changed the solutions", m.name))?;
    }
    ensure(!strict.is_empty(), || "no model shrank under CSE".into())?;
    Ok(format!(
        "{} models, strict decrease in {}: {}",
        corpus.len(),
        strict.len(),
        strict[0]
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let model = common::models_dir().join("table1.qm");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}.sol"));
        let (code, err) = cli(&[
            "solve",
            model.to_str().unwrap(),
            "-p",
            "max=20",
            "-p",
            "r=10",
            "-p",
            "birth=3",
            "-p",
            "top=100",
            "--mode",
            "sample",
            "20",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        ensure(code == 0, || format!("exit {code}: {err}"))?;
        outputs.push(fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], || "outputs differ".into())?;
    let lines = String::from_utf8_lossy(&outputs[0])
        .lines()
        .filter(|l| l.starts_with("sol "))
        .count();
    ensure(lines == 20, || format!("{lines} solutions"))?;
    Ok(format!("20 samples, {} identical bytes", outputs[0].len()))
}

fn sampling_coverage() -> Outcome {
    let m = common::corpus()
        .into_iter()
        .find(|m| m.name == "table1_coarse")
        .unwrap();
    let inst = compile(&m.typed, &FlattenOptions::default()).map_err(|e| e.to_string())?;
    let space = brute_force(&inst, DEFAULT_BRUTE_FORCE_CAP)
        .map_err(|e| e.to_string())?
        .len();
    ensure(space >= 50, || format!("only {space} solutions"))?;
    let cfg = SearchConfig {
        mode: Mode::Sample(100),
        seed: 1,
        ..Default::default()
    };
    let out = solve(&inst, &cfg).map_err(|e| e.to_string())?;
    let seeds: Vec<u64> = out.solutions.iter().map(|s| s.seed).collect();
    ensure(seeds == (1..=100).collect::<Vec<_>>(), || "seeds are not 1..100".into())?;
    let distinct: BTreeSet<&Vec<i64>> = out.solutions.iter().map(|s| &s.values).collect();
    ensure(distinct.len() >= 10, || format!("{} distinct", distinct.len()))?;
    Ok(format!(
        "{} distinct of 100 samples ({space} solutions)",
        distinct.len()
    ))
}

fn euler_accuracy() -> Outcome {
    let m = CompartmentModel::new(vec![0.03], vec![0.07]);
    let coarse = euler_simulate(&m, &[100.0], 10).map_err(|e| e.to_string())?.values[0][10];
    let err = (coarse - 100.0 * 0.9f64.powi(10)).abs();
    ensure(err <= 1e-12, || format!("unit-step error {err:e}"))?;
    let fine = euler_simulate_substeps(&m, &[100.0], 10, 2)
        .map_err(|e| e.to_string())?
        .values[0][10];
    let exact = 100.0 * (-1.0f64).exp();
    let ratio = (coarse - exact).abs() / (fine - exact).abs();
    ensure((1.8..=2.2).contains(&ratio), || format!("error ratio {ratio}"))?;
    Ok(format!("unit-step error {err:.1e}, halving ratio {ratio:.3}"))
}

fn fit_recovery() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2026);
    let structure: FitStructure = "F0:TL,F1:TL,F2:T".parse().unwrap();
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let mut transfer = vec![0.0; 3];
        let mut loss = vec![0.0; 3];
        for c in 0..3 {
            let sum = rng.gen_range(0.0..=0.5);
            if c < 2 {
                let split = rng.gen_range(0.0..=1.0);
                transfer[c] = sum * split;
                loss[c] = sum - transfer[c];
            } else {
                transfer[c] = sum;
            }
        }
        let truth = CompartmentModel::new(transfer, loss);
        let traj = euler_simulate(&truth, &[100.0, 50.0, 20.0], 12)
            .map_err(|e| e.to_string())?
            .into_bundle(&["F0", "F1", "F2"], Provenance::default());
        let fit = fit_rates(&traj, &structure).map_err(|e| format!("trial {trial}: {e}"))?;
        for c in 0..3 {
            worst = worst
                .max((fit.model.transfer[c] - truth.transfer[c]).abs())
                .max((fit.model.loss[c] - truth.loss[c]).abs());
        }
        ensure(worst <= 1e-6, || format!("trial {trial}: rate error {worst:e}"))?;
        ensure(fit.residual <= 1e-9, || {
            format!("trial {trial}: residual {:e}", fit.residual)
        })?;
    }
    let single = CompartmentModel::new(vec![0.05], vec![0.05]);
    let traj = euler_simulate(&single, &[100.0], 10)
        .map_err(|e| e.to_string())?
        .into_bundle(&["F0"], Provenance::default());
    match fit_rates(&traj, &"F0:TL".parse().unwrap()) {
        Err(QuantError::Unidentifiable { params, .. }) if params == ["kT0", "kL0"] => {}
        other => return Err(format!("single compartment gave {other:?}")),
    }
    Ok(format!(
        "50 trials, worst rate error {worst:.1e}; single compartment unidentifiable"
    ))
}

fn predicate_fidelity() -> Outcome {
    let report = common::oracle::check_all_builders(6)?;
    Ok(format!("{} builder/horizon combinations agree", report.len()))
}

fn pareto_correctness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let eps = 1e-9;
    for trial in 0..1000 {
        let n = rng.gen_range(1..=200);
        let levels = rng.gen_range(1..=20);
        let points: Vec<(f64, u8)> = (0..n)
            .map(|_| (rng.gen_range(0..=levels) as f64 / levels as f64, rng.gen_range(1..=5)))
            .collect();
        let ranking = rank_candidates(&points, eps);
        for i in 0..n {
            let beaten = (0..n).any(|j| dominates(points[j], points[i], eps));
            let tied_earlier = (0..i).any(|j| (points[j].0 - points[i].0).abs() <= eps && points[j].1 == points[i].1);
            ensure(ranking.on_front(i) == (!beaten && !tied_earlier), || {
                format!("trial {trial}: candidate {i} misclassified")
            })?;
        }
        for &(i, rep) in &ranking.dominated {
            ensure(ranking.on_front(rep), || {
                format!("trial {trial}: {i} points at non-front {rep}")
            })?;
        }
    }
    Ok("1000 trials, 0 discrepancies".into())
}

fn pipeline() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = common::models_dir().join("follicles.qspec");
    let facts = common::models_dir().join("follicles.facts");
    let facts_text = fs::read_to_string(&facts).map_err(|e| e.to_string())?;
    for needed in ["peak F0 300000", "zero_at F0 0", "below F0 end 1000"] {
        ensure(facts_text.contains(needed), || format!("facts lack `{needed}`"))?;
    }
    let sols = dir.path().join("f.sol");
    let fits = dir.path().join("f.fit");
    let ranked = dir.path().join("f.rank");
    let (spec_s, facts_s) = (spec.to_str().unwrap(), facts.to_str().unwrap());
    let steps: [Vec<&str>; 4] = [
        vec!["check", spec_s],
        vec![
            "solve",
            spec_s,
            "--mode",
            "sample",
            "10",
            "--seed",
            "1",
            "--out",
            sols.to_str().unwrap(),
        ],
        vec![
            "fit",
            sols.to_str().unwrap(),
            "--facts",
            facts_s,
            "--out",
            fits.to_str().unwrap(),
        ],
        vec!["rank", fits.to_str().unwrap(), "--out", ranked.to_str().unwrap()],
    ];
    for args in &steps {
        let (code, err) = cli(args);
        ensure(code == 0, || format!("`{}` exited {code}: {err}", args[0]))?;
    }
    let typed = load_model(&spec, &fs::read_to_string(&spec).unwrap(), &BTreeMap::new())?;
    let inst = compile(&typed, &FlattenOptions::default()).map_err(|e| e.to_string())?;
    let text = fs::read_to_string(&sols).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for line in text.lines().filter(|l| l.starts_with("sol ")) {
        let rec = parse_solution(line).ok_or("malformed solution line")?;
        let named: BTreeMap<String, i64> = rec.values.into_iter().collect();
        let assignment = assignment_from_names(&inst, &named).map_err(|e| e.to_string())?;
        ensure(check_solution(&inst, &assignment).map_err(|e| e.to_string())?, || {
            format!("solution {} fails the check", rec.index)
        })?;
        checked += 1;
    }
    ensure(checked == 10, || format!("{checked} solutions"))?;
    let ranked_text = fs::read_to_string(&ranked).map_err(|e| e.to_string())?;
    let front = ranked_text.lines().filter(|l| l.ends_with("front=1")).count();
    ensure(ranked_text.lines().count() == 10 && front >= 1, || {
        "ranking incomplete".into()
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "10 solutions checked, {front} on the front, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("CSE soundness", cse_soundness),
        ("determinism", determinism),
        ("sampling coverage", sampling_coverage),
        ("Euler accuracy", euler_accuracy),
        ("fit recovery", fit_recovery),
        ("qualitative predicate fidelity", predicate_fidelity),
        ("Pareto correctness", pareto_correctness),
        ("end-to-end pipeline", pipeline),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
