// Copyright 2026 The qualmod Authors. All rights reserved.
// Use of this source code is governed by the Apache License,
// Version 2.0, that can be found in the LICENSE file.

//! The `qualmod` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | `solve`: no solution exists; `rank`: no records |
//! | 2 | invalid model, spec, facts, arguments or records |
//! | 3 | file could not be read or written |
//! | 4 | `solve`: a node or time limit stopped the search |
//!
//! Every command that writes `--out FILE` also writes `FILE.manifest`,
//! which records the inputs, bindings, seed and limits of the run.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::dsl::{self, TypedModel};
use crate::flatten::{self, FlattenOptions};
use crate::qm;
use crate::quant::{
    complexity_grade, fit_rates, format_fit_record, parse_facts, parse_fit_record, rank_candidates, realism_score,
    scale_trajectory, FactsFile, FitRecord, FitStructure, PercentSeries, Provenance, QuantError,
};
use crate::solver::{
    self, format_solution, format_stats, parse_solution, Mode, SearchConfig, Status, ValueOrder, VarOrder,
};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1;

/// Default fit structure: three compartments, losses only from the first.
pub const DEFAULT_STRUCTURE: &str = "F0:TL,F1:T,F2:T";

#[derive(Debug, Parser)]
#[command(
    name = "qualmod",
    version,
    about = "Qualitative models: check, solve, sample, fit and rank"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model (`.qm`) or behaviour spec (`.qspec`).
    Check(ModelArgs),
    /// Search for solutions.
    Solve(SolveArgs),
    /// Shorthand for `solve --mode sample N`.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of restarts.
        count: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Scale solutions to absolute values and fit compartment rates.
    Fit(FitArgs),
    /// Mark the realism/complexity Pareto front of fit records.
    Rank(RankArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model file.
    model: PathBuf,
    /// Parameter binding `name=value`; repeatable.
    #[arg(long = "param", short = 'p', value_name = "NAME=INT")]
    params: Vec<String>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `first`, `all`, or `sample N`.
    #[arg(long, num_args = 1..=2, value_names = ["MODE", "N"], default_value = "first")]
    mode: Vec<String>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Integer seed, or `random` for a fresh one (recorded in the manifest).
    #[arg(long)]
    seed: Option<String>,
    /// Node budget per search.
    #[arg(long = "limit-nodes")]
    limit_nodes: Option<u64>,
    /// Wall-clock budget in milliseconds.
    #[arg(long = "limit-ms")]
    limit_ms: Option<u64>,
    /// Randomise the variable order in first/all modes.
    #[arg(long)]
    random_vars: bool,
    /// Randomise the value order in first/all modes.
    #[arg(long)]
    random_values: bool,
    /// Skip common subexpression elimination.
    #[arg(long)]
    no_cse: bool,
    /// Worker threads for sampling restarts.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Solution records from `solve`.
    solutions: PathBuf,
    #[arg(long)]
    facts: PathBuf,
    /// Free rates per compartment, e.g. `F0:TL,F1:T,F2:T`.
    #[arg(long, default_value = DEFAULT_STRUCTURE)]
    structure: String,
    /// Model class used for the complexity grade.
    #[arg(long, default_value = "linear-ODE")]
    class: String,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RankArgs {
    /// Fit records from `fit`.
    fits: PathBuf,
    /// Realism values this close are equal.
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed command: exit code and message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            code: 3,
            message: format!("{}: {e}", path.display()),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut ctx = Context { stdout, stderr };
    let result = match cli.command {
        Command::Check(a) => ctx.check(&a),
        Command::Solve(a) => match parse_mode(&a.mode) {
            Ok(mode) => ctx.solve(&a.model, mode, &a.search),
            Err(f) => Err(f),
        },
        Command::Sample { model, count, search } => ctx.solve(&model, Mode::Sample(count), &search),
        Command::Fit(a) => ctx.fit(&a),
        Command::Rank(a) => ctx.rank(&a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_mode(words: &[String]) -> Result<Mode, Failure> {
    match words.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["first"] => Ok(Mode::First),
        ["all"] => Ok(Mode::All),
        ["sample", n] => n
            .parse()
            .ok()
            .filter(|n| *n >= 1)
            .map(Mode::Sample)
            .ok_or_else(|| Failure::invalid(format!("sample count `{n}` must be a positive integer"))),
        _ => Err(Failure::invalid(format!(
            "mode must be `first`, `all` or `sample N`, found `{}`",
            words.join(" ")
        ))),
    }
}

fn mode_label(mode: Mode) -> String {
    match mode {
        Mode::First => "first".into(),
        Mode::All => "all".into(),
        Mode::Sample(n) => format!("sample {n}"),
    }
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, i64>, Failure> {
    let mut out = BTreeMap::new();
    for p in raw {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Failure::invalid(format!("parameter `{p}` is not name=value")))?;
        let v = v
            .trim()
            .parse()
            .map_err(|_| Failure::invalid(format!("parameter `{k}` needs an integer, found `{v}`")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn resolve_seed(raw: Option<&str>) -> Result<u64, Failure> {
    match raw {
        None => Ok(DEFAULT_SEED),
        Some("random") => {
            let nanos = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_nanos() as u64);
            Ok(solver::XorShift64Star::new(nanos ^ u64::from(std::process::id())).next_u64())
        }
        Some(s) => s
            .parse()
            .map_err(|_| Failure::invalid(format!("seed `{s}` is neither an integer nor `random`"))),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// Loads a `.qm` model, or assembles a `.qspec` behaviour spec.
pub fn load_model(path: &Path, text: &str, params: &BTreeMap<String, i64>) -> Result<TypedModel, String> {
    let ast = if path.extension().is_some_and(|e| e == "qspec") {
        let spec = qm::parse_qualspec(text).map_err(|e| format!("{}: {e}", path.display()))?;
        qm::assemble(&spec).map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        dsl::parse_model(text).map_err(|e| format!("{}:{e}", path.display()))?
    };
    dsl::validate(&ast, params).map_err(|e| format!("{}: {e}", path.display()))
}

struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    fn new(command: &str) -> Self {
        Manifest {
            lines: vec![
                ("command".into(), command.into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
        }
    }

    fn add(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest");
    PathBuf::from(name)
}

struct Context<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Context<'_> {
    /// Writes the primary output and, for files, its manifest.
    fn emit(&mut self, out: Option<&Path>, body: &str, mut manifest: Manifest) -> Result<(), Failure> {
        match out {
            None => self
                .stdout
                .write_all(body.as_bytes())
                .map_err(|e| Failure::io(Path::new("<stdout>"), e)),
            Some(path) => {
                fs::write(path, body).map_err(|e| Failure::io(path, e))?;
                manifest.add("output", path.display());
                let mpath = manifest_path(path);
                fs::write(&mpath, manifest.render()).map_err(|e| Failure::io(&mpath, e))
            }
        }
    }

    fn check(&mut self, a: &ModelArgs) -> CmdResult {
        let params = parse_params(&a.params)?;
        let text = read(&a.model)?;
        let typed = load_model(&a.model, &text, &params).map_err(Failure::invalid)?;
        let instance = flatten::compile(&typed, &FlattenOptions::default())
            .map_err(|e| Failure::invalid(format!("{}: {e}", a.model.display())))?;
        let _ = writeln!(
            self.stdout,
            "ok: {} cells, {} auxiliary variables, {} constraints",
            instance.declared_count(),
            instance.aux_count(),
            instance.constraints.len()
        );
        Ok(0)
    }

    fn solve(&mut self, m: &ModelArgs, mode: Mode, s: &SearchArgs) -> CmdResult {
        let params = parse_params(&m.params)?;
        let seed = resolve_seed(s.seed.as_deref())?;
        let text = read(&m.model)?;
        let typed = load_model(&m.model, &text, &params).map_err(Failure::invalid)?;
        let opts = FlattenOptions {
            cse: !s.no_cse,
            ..FlattenOptions::default()
        };
        let instance =
            flatten::compile(&typed, &opts).map_err(|e| Failure::invalid(format!("{}: {e}", m.model.display())))?;
        let config = SearchConfig {
            var_order: if s.random_vars {
                VarOrder::Random
            } else {
                VarOrder::Declaration
            },
            value_order: if s.random_values {
                ValueOrder::Random
            } else {
                ValueOrder::Ascending
            },
            seed,
            mode,
            node_limit: s.limit_nodes,
            time_limit: s.limit_ms.map(Duration::from_millis),
            jobs: s.jobs,
        };
        let outcome = solver::solve(&instance, &config).map_err(|e| Failure::invalid(e.to_string()))?;

        let mut body = String::new();
        for sol in &outcome.solutions {
            body.push_str(&format_solution(&instance, sol));
            body.push('\n');
        }
        body.push_str(&format_stats(&outcome.stats, false));
        body.push('\n');

        let mut manifest = Manifest::new("solve");
        manifest.add("input", m.model.display());
        for (k, v) in &params {
            manifest.add(&format!("param.{k}"), v);
        }
        manifest.add("mode", mode_label(mode));
        manifest.add("seed", seed);
        manifest.add("var_order", if s.random_vars { "random" } else { "declaration" });
        manifest.add("value_order", if s.random_values { "random" } else { "ascending" });
        manifest.add("cse", !s.no_cse);
        manifest.add("limit_nodes", s.limit_nodes.map_or("none".into(), |n| n.to_string()));
        manifest.add("limit_ms", s.limit_ms.map_or("none".into(), |n| n.to_string()));
        self.emit(s.out.as_deref(), &body, manifest)?;
        let _ = writeln!(self.stderr, "{}", format_stats(&outcome.stats, true));

        Ok(match outcome.status {
            Status::LimitExceeded(l) => {
                let _ = writeln!(self.stderr, "search stopped by {l:?} limit");
                4
            }
            Status::Complete if outcome.solutions.is_empty() => {
                let _ = writeln!(self.stderr, "unsatisfiable");
                1
            }
            Status::Complete => 0,
        })
    }

    fn fit(&mut self, a: &FitArgs) -> CmdResult {
        let structure: FitStructure = a
            .structure
            .parse()
            .map_err(|e| Failure::invalid(format!("--structure: {e}")))?;
        let grade = complexity_grade(&a.class).map_err(|e| Failure::invalid(e.to_string()))?;
        let facts =
            parse_facts(&read(&a.facts)?).map_err(|e| Failure::invalid(format!("{}: {e}", a.facts.display())))?;
        let text = read(&a.solutions)?;
        let mut records = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.starts_with("sol ") {
                let rec = parse_solution(line).ok_or_else(|| {
                    Failure::invalid(format!("{}: line {}: malformed solution", a.solutions.display(), n + 1))
                })?;
                records.push(rec);
            }
        }
        if records.is_empty() {
            let _ = writeln!(self.stderr, "warning: no solutions in {}", a.solutions.display());
        }

        let fit_one = |rec: &solver::SolutionRecord| fit_solution(rec, &structure, &facts, grade);
        let results: Vec<Result<(FitRecord, Vec<String>), String>> = match a.jobs {
            Some(j) => rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Failure::invalid(e.to_string()))?
                .install(|| records.par_iter().map(fit_one).collect()),
            None => records.par_iter().map(fit_one).collect(),
        };

        let mut body = String::new();
        for (rec, result) in records.iter().zip(results) {
            let label = format!("{}:{}", rec.index, rec.seed);
            match result {
                Ok((fit, warnings)) => {
                    body.push_str(&format_fit_record(&fit));
                    body.push('\n');
                    for w in warnings {
                        let _ = writeln!(body, "warn {label} {w}");
                    }
                }
                Err(w) => {
                    let _ = writeln!(body, "warn {label} {w}");
                }
            }
        }
        let mut manifest = Manifest::new("fit");
        manifest.add("input", a.solutions.display());
        manifest.add("facts", a.facts.display());
        manifest.add("structure", &structure);
        manifest.add("class", &a.class);
        self.emit(a.out.as_deref(), &body, manifest)?;
        Ok(0)
    }

    fn rank(&mut self, a: &RankArgs) -> CmdResult {
        let text = read(&a.fits)?;
        let mut fits = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with("warn ") {
                continue;
            }
            let rec = parse_fit_record(t)
                .map_err(|e| Failure::invalid(format!("{}: line {}: {e}", a.fits.display(), n + 1)))?;
            fits.push(rec);
        }
        if fits.is_empty() {
            return Err(Failure {
                code: 1,
                message: format!("{}: no fit records", a.fits.display()),
            });
        }
        let points: Vec<(f64, u8)> = fits.iter().map(|f| (f.realism, f.grade)).collect();
        let ranking = rank_candidates(&points, a.eps);
        let mut body = String::new();
        let on_front = |i: usize| ranking.on_front(i);
        let order = ranking
            .front
            .iter()
            .copied()
            .chain((0..fits.len()).filter(|i| !on_front(*i)));
        for i in order {
            let mut rec = fits[i].clone();
            rec.front = Some(on_front(i));
            body.push_str(&format_fit_record(&rec));
            body.push('\n');
        }
        let mut manifest = Manifest::new("rank");
        manifest.add("input", a.fits.display());
        manifest.add("eps", a.eps);
        self.emit(a.out.as_deref(), &body, manifest)?;
        Ok(0)
    }
}

/// Values of every `name[i]` cell grouped by matrix, in index order.
fn series_of(rec: &solver::SolutionRecord) -> BTreeMap<String, Vec<(i64, i64)>> {
    let mut out: BTreeMap<String, Vec<(i64, i64)>> = BTreeMap::new();
    for (cell, v) in &rec.values {
        if let Some((name, rest)) = cell.split_once('[') {
            if let Some(i) = rest.strip_suffix(']').and_then(|i| i.parse().ok()) {
                out.entry(name.to_string()).or_default().push((i, *v));
            }
        }
    }
    for cells in out.values_mut() {
        cells.sort();
    }
    out
}

/// Scales, fits and scores one solution. `Err` is a warning that
/// prevents a fit record.
fn fit_solution(
    rec: &solver::SolutionRecord,
    structure: &FitStructure,
    facts: &FactsFile,
    grade: u8,
) -> Result<(FitRecord, Vec<String>), String> {
    let cells = series_of(rec);
    let mut percent = Vec::new();
    for c in &structure.compartments {
        let values = cells
            .get(&c.series)
            .ok_or_else(|| format!("solution has no series `{}`", c.series))?;
        percent.push(PercentSeries {
            name: c.series.clone(),
            values: values.iter().map(|(_, v)| *v).collect(),
        });
    }
    let provenance = Provenance {
        solution: Some(rec.index),
        seed: Some(rec.seed),
        facts: facts.facts.iter().map(|f| f.to_string()).collect(),
    };
    let traj = scale_trajectory(&percent, &facts.peaks, provenance.clone()).map_err(|e| e.to_string())?;
    let mut warnings = Vec::new();
    let fit = match fit_rates(&traj, structure) {
        Ok(fit) => fit,
        Err(QuantError::Unidentifiable { params, partial }) => {
            warnings.push(format!("unidentifiable {}", params.join(",")));
            *partial
        }
        Err(e) => return Err(e.to_string()),
    };
    let realism = match realism_score(&traj, &facts.facts) {
        Ok(r) => r.score,
        Err(e) => {
            warnings.push(format!("realism {e}"));
            0.0
        }
    };
    let mut rates = Vec::new();
    for i in 0..fit.model.compartments() {
        rates.push((format!("kT{i}"), fit.model.transfer[i]));
        rates.push((format!("kL{i}"), fit.model.loss[i]));
    }
    let record = FitRecord {
        provenance: provenance.label(),
        rates,
        residual: fit.residual,
        realism,
        grade,
        front: None,
    };
    Ok((record, warnings))
}
