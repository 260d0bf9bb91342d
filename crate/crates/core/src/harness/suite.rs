//! Experiment suites: a flat config of cells, one row per (cell, seed).
//!
//! ```text
//! # global keys apply to every cell
//! alpha = 1/2
//! timing = false
//! cell = loose edf seeds=0..20 n=40 horizon=400
//! cell = general-tight general seeds=0..5 n=20 horizon=200 target=2 general.delta=1/5
//! cell = mixed opt seeds=0..20 n=15 horizon=60 mutate=deadline-miss
//! ```

use std::fmt;
use std::io;
use std::ops::Range;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen::{generate, Class, GenSpec};
use super::mutate::mutate;
use crate::algo::{build_policy, Algo, Base};
use crate::config::{parse_pairs, AlgoConfig, ConfigError};
use crate::engine::run_semi_online;
use crate::model::{verify_schedule, Instance, Schedule, Time, ViolationKind};
use crate::offline::{optimal_schedule, optimum_machines};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteAlgo {
    /// The offline optimal schedule.
    Offline,
    Online(Algo),
}

impl fmt::Display for SuiteAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteAlgo::Offline => f.write_str("opt"),
            SuiteAlgo::Online(a) => a.fmt(f),
        }
    }
}

impl std::str::FromStr for SuiteAlgo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "opt" {
            Ok(SuiteAlgo::Offline)
        } else {
            s.parse().map(SuiteAlgo::Online)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub class: Class,
    pub algo: SuiteAlgo,
    pub seeds: Range<u64>,
    pub n: usize,
    pub horizon: Time,
    pub target: Option<usize>,
    pub mutate: Option<ViolationKind>,
    pub config: AlgoConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Suite {
    pub cells: Vec<Cell>,
    /// Record wall-clock time per row. Off by default so reruns are
    /// byte-identical.
    pub timing: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("line {line}: {msg}")]
    Cell { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub cell: usize,
    pub instance: String,
    pub seed: u64,
    pub class: String,
    pub n: usize,
    pub m_opt: usize,
    pub algorithm: String,
    pub machines: usize,
    pub peak: usize,
    pub missed: usize,
    pub violations: usize,
    pub failures: usize,
    pub mutation: String,
    pub detected: bool,
    pub wall_ms: u64,
    pub pass: bool,
    pub error: String,
}

pub fn parse_violation_kind(s: &str) -> Option<ViolationKind> {
    ViolationKind::ALL.into_iter().find(|k| k.as_str() == s)
}

fn parse_seeds(s: &str) -> Option<Range<u64>> {
    match s.split_once("..") {
        Some((a, b)) => Some(a.parse().ok()?..b.parse().ok()?),
        None => {
            let a: u64 = s.parse().ok()?;
            Some(a..a + 1)
        }
    }
}

fn parse_cell(line: usize, src: &str, global: &AlgoConfig) -> Result<Cell, SuiteError> {
    let err = |msg: String| SuiteError::Cell { line, msg };
    let mut words = src.split_whitespace();
    let class: Class = words.next().ok_or_else(|| err("missing class".into()))?.parse().map_err(err)?;
    let algo: SuiteAlgo = words.next().ok_or_else(|| err("missing algorithm".into()))?.parse().map_err(err)?;
    let mut cell = Cell {
        class,
        algo,
        seeds: 0..1,
        n: 20,
        horizon: 200,
        target: None,
        mutate: None,
        config: global.clone(),
    };
    for word in words {
        let (k, v) = word.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{word}`")))?;
        let bad = || err(format!("bad value for `{k}`: `{v}`"));
        match k {
            "seeds" => cell.seeds = parse_seeds(v).ok_or_else(bad)?,
            "n" => cell.n = v.parse().map_err(|_| bad())?,
            "horizon" => cell.horizon = v.parse().map_err(|_| bad())?,
            "target" => cell.target = Some(v.parse().map_err(|_| bad())?),
            "mutate" => cell.mutate = Some(parse_violation_kind(v).ok_or_else(bad)?),
            _ => {
                if !cell.config.apply(k, v)? {
                    return Err(err(format!("unknown cell key `{k}`")));
                }
            }
        }
    }
    Ok(cell)
}

impl Suite {
    pub fn parse(src: &str) -> Result<Self, SuiteError> {
        let mut suite = Suite::default();
        let mut global = AlgoConfig::default();
        let mut pending = Vec::new();
        for (line, key, value) in parse_pairs(src)? {
            match key.as_str() {
                "cell" => pending.push((line, value)),
                "timing" => {
                    suite.timing = match value.as_str() {
                        "true" => true,
                        "false" => false,
                        _ => return Err(ConfigError::BadValue { key, value }.into()),
                    }
                }
                _ => {
                    if !global.apply(&key, &value)? {
                        return Err(ConfigError::UnknownKey(key).into());
                    }
                }
            }
        }
        // global keys apply to every cell wherever they appear
        for (line, value) in pending {
            suite.cells.push(parse_cell(line, &value, &global)?);
        }
        Ok(suite)
    }
}

/// Everything one row needs besides its identity.
struct Outcome {
    algorithm: String,
    m_opt: usize,
    machines: usize,
    peak: usize,
    missed: usize,
    violations: usize,
    failures: usize,
    detected: bool,
    pass: bool,
}

/// Laminar runs on non-laminar instances go to the general algorithm.
pub fn route(algo: Algo, inst: &Instance) -> Algo {
    match algo {
        Algo::Semi(Base::Laminar) if !inst.structure().laminar => Algo::Semi(Base::General),
        Algo::Double(Base::Laminar) if !inst.structure().laminar => Algo::Double(Base::General),
        a => a,
    }
}

type Produced = (String, Schedule, usize, usize, usize);

fn produce(cell: &Cell, inst: &Instance, m_opt: usize) -> Result<Produced, String> {
    match cell.algo {
        SuiteAlgo::Offline => {
            let sched = optimal_schedule(inst, m_opt).map_err(|e| e.to_string())?;
            Ok(("opt".into(), sched, m_opt, 0, 0))
        }
        SuiteAlgo::Online(algo) => {
            let algo = route(algo, inst);
            let mut policy = build_policy(algo, m_opt.max(1), &cell.config).map_err(|e| e.to_string())?;
            let run = run_semi_online(inst, &mut policy).map_err(|e| e.to_string())?;
            Ok((algo.to_string(), run.schedule, run.machines, run.missed.len(), run.failures.len()))
        }
    }
}

fn evaluate(cell: &Cell, seed: u64) -> Result<Outcome, String> {
    let spec = GenSpec { class: cell.class, n: cell.n, horizon: cell.horizon, alpha: cell.config.alpha, target: cell.target, seed };
    let inst = generate(&spec).map_err(|e| e.to_string())?;
    let m_opt = optimum_machines(&inst);
    let (algorithm, sched, machines, missed, failures) = produce(cell, &inst, m_opt)?;
    let report = verify_schedule(&inst, &sched, machines);
    let mut out = Outcome {
        algorithm,
        m_opt,
        machines,
        peak: sched.peak(),
        missed,
        violations: report.violations.len(),
        failures,
        detected: false,
        pass: report.feasible() && missed == 0 && failures == 0,
    };
    if let Some(kind) = cell.mutate {
        if !report.feasible() {
            return Err(format!("cannot mutate an infeasible schedule: {report}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d75_7461_7465);
        let (bad, m) = mutate(&inst, &sched, machines, kind, &mut rng).ok_or("no site to inject the defect")?;
        let bad_report = verify_schedule(&inst, &bad, m);
        out.detected = bad_report.has(kind);
        out.violations = bad_report.violations.len();
        out.pass = out.detected;
    }
    Ok(out)
}

pub fn run_cell_seed(index: usize, cell: &Cell, seed: u64, timing: bool) -> ExperimentRow {
    let start = Instant::now();
    let outcome = evaluate(cell, seed);
    let wall_ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    let mut row = ExperimentRow {
        cell: index,
        instance: format!("c{index}-s{seed}"),
        seed,
        class: cell.class.to_string(),
        n: cell.n,
        m_opt: 0,
        algorithm: cell.algo.to_string(),
        machines: 0,
        peak: 0,
        missed: 0,
        violations: 0,
        failures: 0,
        mutation: cell.mutate.map(|k| k.as_str().to_string()).unwrap_or_default(),
        detected: false,
        wall_ms,
        pass: false,
        error: String::new(),
    };
    match outcome {
        Ok(o) => {
            row.algorithm = o.algorithm;
            row.m_opt = o.m_opt;
            row.machines = o.machines;
            row.peak = o.peak;
            row.missed = o.missed;
            row.violations = o.violations;
            row.failures = o.failures;
            row.detected = o.detected;
            row.pass = o.pass;
        }
        Err(e) => row.error = e,
    }
    row
}

/// Rows for every (cell, seed), computed in parallel and returned in cell
/// then seed order.
pub fn run_suite(suite: &Suite) -> Vec<ExperimentRow> {
    let tasks: Vec<(usize, &Cell, u64)> =
        suite.cells.iter().enumerate().flat_map(|(i, c)| c.seeds.clone().map(move |s| (i, c, s))).collect();
    tasks.into_par_iter().map(|(i, c, s)| run_cell_seed(i, c, s, suite.timing)).collect()
}

pub fn all_pass(rows: &[ExperimentRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

pub fn write_csv<W: io::Write>(rows: &[ExperimentRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(rows: &[ExperimentRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<ExperimentRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn to_json(rows: &[ExperimentRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn from_json(src: &str) -> Result<Vec<ExperimentRow>, serde_json::Error> {
    serde_json::from_str(src)
}
