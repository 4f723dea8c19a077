use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::baselines::{cbs_coupled_solve, hcbs_solve, mgcbs_noforest_solve};
use crate::cbs::mgcbs_solve;
use crate::error::SearchError;
use crate::graph::{Graph, Instance};
use crate::solution::{Outcome, SearchStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    /// Goal-vertex order search with earliest-arrival legs.
    Hcbs,
    /// MGCBS answering leg queries with space-time A*.
    MgcbsNoForest,
    /// MGCBS with TIS forests.
    Mgcbs,
    /// CBS over a coupled (vertex, time, visited) A*.
    CbsAstar,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Hcbs,
        Algorithm::MgcbsNoForest,
        Algorithm::Mgcbs,
        Algorithm::CbsAstar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Hcbs => "hcbs",
            Algorithm::MgcbsNoForest => "mgcbs-noforest",
            Algorithm::Mgcbs => "mgcbs",
            Algorithm::CbsAstar => "cbs-astar",
        }
    }

    pub fn solve(self, graph: &Graph, instance: &Instance, budget: Duration) -> Result<RunReport, SearchError> {
        let started = Instant::now();
        let (outcome, stats) = match self {
            Algorithm::Hcbs => hcbs_solve(graph, instance, budget),
            Algorithm::MgcbsNoForest => mgcbs_noforest_solve(graph, instance, budget),
            Algorithm::Mgcbs => mgcbs_solve(graph, instance, budget),
            Algorithm::CbsAstar => cbs_coupled_solve(graph, instance, budget),
        }?;
        let mut elapsed = started.elapsed();
        let outcome = if elapsed > budget && outcome != Outcome::Infeasible {
            Outcome::Timeout
        } else {
            outcome
        };
        if outcome == Outcome::Timeout {
            elapsed = budget;
        }
        Ok(RunReport {
            algorithm: self,
            outcome,
            stats,
            elapsed,
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}` (expected one of hcbs, mgcbs-noforest, mgcbs, cbs-astar)"))
    }
}

/// One solver run; `elapsed` is clamped to the budget on timeout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub outcome: Outcome,
    pub stats: SearchStats,
    pub elapsed: Duration,
}
