//! Success rate, runtime, speedup and optimality tables.
//!
//! CSV columns:
//!
//! * runs: `map,agents,goals,instance,algorithm,outcome,cost,runtime_s,verified`
//! * summary: `map,agents,goals,algorithm,attempted,solved,success_rate,mean_runtime_s,speedup`
//! * optimality: `map,algorithm,referee,solved,both_solved,differing,max_rel_error,avg_rel_error`
//!
//! `mean_runtime_s` counts every failure as the full budget. `speedup` is the
//! baseline's mean runtime divided by the algorithm's, left empty when no
//! baseline was given. Runtime columns are empty in logic-only mode.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Duration;

use crate::algorithm::Algorithm;
use crate::graph::{Graph, Instance};
use crate::harness::batch::run_batch;
use crate::harness::gen::{gen_instances, GenError};
use crate::harness::verify::verify_paths;
use crate::solution::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    /// Sequential runs with wall-clock measurement.
    Timing,
    /// Runtime is not reported; runs may be parallel.
    LogicOnly,
}

#[derive(Debug, Clone)]
pub struct BenchCase {
    pub map: String,
    pub graph: Graph,
    pub agents: usize,
    pub goals: usize,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub cases: Vec<BenchCase>,
    pub count: usize,
    pub seed: u64,
    pub budget: Duration,
    pub algorithms: Vec<Algorithm>,
    pub baseline: Option<Algorithm>,
    pub referee: Option<Algorithm>,
    pub mode: RunMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub map: String,
    pub agents: usize,
    pub goals: usize,
    pub instance: usize,
    pub algorithm: Algorithm,
    /// `solved`, `infeasible`, `timeout`, `error` or `invalid`.
    pub outcome: String,
    pub cost: Option<u64>,
    pub runtime: Duration,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.outcome == "solved"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub map: String,
    pub agents: usize,
    pub goals: usize,
    pub algorithm: Algorithm,
    pub attempted: usize,
    pub solved: usize,
    pub mean_runtime_s: f64,
    pub speedup: Option<f64>,
}

impl BenchRow {
    pub fn success_rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.solved as f64 / self.attempted as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptRow {
    pub map: String,
    pub algorithm: Algorithm,
    pub referee: Algorithm,
    pub solved: usize,
    pub both_solved: usize,
    pub differing: usize,
    pub max_rel_error: f64,
    pub avg_rel_error: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub mode: RunMode,
    pub runs: Vec<RunRecord>,
    pub rows: Vec<BenchRow>,
    pub optimality: Vec<OptRow>,
}

struct Job<'a> {
    case: &'a BenchCase,
    index: usize,
    instance: &'a Instance,
    algorithm: Algorithm,
}

fn run_job(job: &Job<'_>, budget: Duration) -> RunRecord {
    let (outcome, cost, runtime) = match job.algorithm.solve(&job.case.graph, job.instance, budget) {
        Ok(report) => match &report.outcome {
            Outcome::Solved(sol) => match verify_paths(&job.case.graph, job.instance, sol) {
                Ok(()) => ("solved", Some(sol.soc()), report.elapsed),
                Err(_) => ("invalid", None, budget),
            },
            Outcome::Infeasible => ("infeasible", None, budget),
            Outcome::Timeout => ("timeout", None, budget),
        },
        Err(_) => ("error", None, budget),
    };
    RunRecord {
        map: job.case.map.clone(),
        agents: job.case.agents,
        goals: job.case.goals,
        instance: job.index,
        algorithm: job.algorithm,
        outcome: outcome.to_string(),
        cost,
        runtime,
    }
}

/// Generates the instances of every case and runs every algorithm on them.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, GenError> {
    let mut instances = Vec::with_capacity(cfg.cases.len());
    for case in &cfg.cases {
        instances.push(gen_instances(&case.graph, &case.map, case.agents, case.goals, cfg.count, cfg.seed)?);
    }
    let mut algorithms = cfg.algorithms.clone();
    for extra in [cfg.baseline, cfg.referee].into_iter().flatten() {
        if !algorithms.contains(&extra) {
            algorithms.push(extra);
        }
    }
    let mut jobs = Vec::new();
    for (case, insts) in cfg.cases.iter().zip(&instances) {
        for (index, instance) in insts.iter().enumerate() {
            for &algorithm in &algorithms {
                jobs.push(Job {
                    case,
                    index,
                    instance,
                    algorithm,
                });
            }
        }
    }
    let runs = run_batch(&jobs, cfg.mode == RunMode::LogicOnly, |job| run_job(job, cfg.budget));
    let rows = summarize(&runs, &algorithms, cfg.baseline, cfg.budget);
    let optimality = match cfg.referee {
        Some(referee) => optimality(&runs, &algorithms, referee),
        None => Vec::new(),
    };
    Ok(BenchReport {
        mode: cfg.mode,
        runs,
        rows,
        optimality,
    })
}

type CaseKey = (String, usize, usize);

fn summarize(runs: &[RunRecord], algorithms: &[Algorithm], baseline: Option<Algorithm>, budget: Duration) -> Vec<BenchRow> {
    let mut groups: BTreeMap<(CaseKey, Algorithm), Vec<&RunRecord>> = BTreeMap::new();
    let mut cases: Vec<CaseKey> = Vec::new();
    for r in runs {
        let key = (r.map.clone(), r.agents, r.goals);
        if !cases.contains(&key) {
            cases.push(key.clone());
        }
        groups.entry((key, r.algorithm)).or_default().push(r);
    }
    let mean = |rs: &[&RunRecord]| {
        if rs.is_empty() {
            return 0.0;
        }
        rs.iter()
            .map(|r| if r.solved() { r.runtime } else { budget }.as_secs_f64())
            .sum::<f64>()
            / rs.len() as f64
    };
    let mut rows = Vec::new();
    for case in &cases {
        let base = baseline.and_then(|b| groups.get(&(case.clone(), b))).map(|rs| mean(rs));
        for &algorithm in algorithms {
            let Some(rs) = groups.get(&(case.clone(), algorithm)) else {
                continue;
            };
            let m = mean(rs);
            rows.push(BenchRow {
                map: case.0.clone(),
                agents: case.1,
                goals: case.2,
                algorithm,
                attempted: rs.len(),
                solved: rs.iter().filter(|r| r.solved()).count(),
                mean_runtime_s: m,
                speedup: base.map(|b| if m > 0.0 { b / m } else { f64::INFINITY }),
            });
        }
    }
    rows
}

fn optimality(runs: &[RunRecord], algorithms: &[Algorithm], referee: Algorithm) -> Vec<OptRow> {
    let mut reference: BTreeMap<(String, usize, usize, usize), u64> = BTreeMap::new();
    let mut maps: Vec<String> = Vec::new();
    for r in runs {
        if !maps.contains(&r.map) {
            maps.push(r.map.clone());
        }
        if r.algorithm == referee {
            if let Some(c) = r.cost {
                reference.insert((r.map.clone(), r.agents, r.goals, r.instance), c);
            }
        }
    }
    let mut out = Vec::new();
    for map in &maps {
        for &algorithm in algorithms.iter().filter(|&&a| a != referee) {
            let mut row = OptRow {
                map: map.clone(),
                algorithm,
                referee,
                solved: 0,
                both_solved: 0,
                differing: 0,
                max_rel_error: 0.0,
                avg_rel_error: 0.0,
            };
            let mut sum = 0.0;
            for r in runs.iter().filter(|r| &r.map == map && r.algorithm == algorithm) {
                let Some(cost) = r.cost else { continue };
                row.solved += 1;
                let Some(&best) = reference.get(&(r.map.clone(), r.agents, r.goals, r.instance)) else {
                    continue;
                };
                row.both_solved += 1;
                if cost != best {
                    row.differing += 1;
                }
                let err = if best == 0 {
                    0.0
                } else {
                    (cost as f64 - best as f64) / best as f64
                };
                sum += err;
                row.max_rel_error = row.max_rel_error.max(err);
            }
            if row.both_solved > 0 {
                row.avg_rel_error = sum / row.both_solved as f64;
            }
            out.push(row);
        }
    }
    out
}

impl BenchReport {
    pub fn runs_csv(&self) -> String {
        let mut s = String::from("map,agents,goals,instance,algorithm,outcome,cost,runtime_s,verified\n");
        for r in &self.runs {
            let cost = r.cost.map(|c| c.to_string()).unwrap_or_default();
            let rt = match self.mode {
                RunMode::Timing => format!("{:.6}", r.runtime.as_secs_f64()),
                RunMode::LogicOnly => String::new(),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.map,
                r.agents,
                r.goals,
                r.instance,
                r.algorithm,
                r.outcome,
                cost,
                rt,
                r.solved()
            );
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("map,agents,goals,algorithm,attempted,solved,success_rate,mean_runtime_s,speedup\n");
        for r in &self.rows {
            let (rt, sp) = match self.mode {
                RunMode::Timing => (
                    format!("{:.6}", r.mean_runtime_s),
                    r.speedup.map(|x| format!("{x:.3}")).unwrap_or_default(),
                ),
                RunMode::LogicOnly => (String::new(), String::new()),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{:.3},{},{}",
                r.map,
                r.agents,
                r.goals,
                r.algorithm,
                r.attempted,
                r.solved,
                r.success_rate(),
                rt,
                sp
            );
        }
        s
    }

    pub fn optimality_csv(&self) -> String {
        let mut s = String::from("map,algorithm,referee,solved,both_solved,differing,max_rel_error,avg_rel_error\n");
        for r in &self.optimality {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{:.6},{:.6}",
                r.map, r.algorithm, r.referee, r.solved, r.both_solved, r.differing, r.max_rel_error, r.avg_rel_error
            );
        }
        s
    }
}
