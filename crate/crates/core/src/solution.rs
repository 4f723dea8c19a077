//! Paths, solutions and the solution file format.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::constraints::Time;
use crate::graph::{Graph, VertexId};

/// One agent's timed path: `steps[t]` is the vertex occupied at time `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AgentPath {
    pub steps: Vec<VertexId>,
}

impl AgentPath {
    pub fn new(steps: Vec<VertexId>) -> Self {
        debug_assert!(!steps.is_empty());
        AgentPath { steps }
    }

    /// Completion time `T`.
    pub fn cost(&self) -> Time {
        (self.steps.len() - 1) as Time
    }

    pub fn start(&self) -> VertexId {
        self.steps[0]
    }

    pub fn last(&self) -> VertexId {
        *self.steps.last().expect("paths are never empty")
    }

    /// Position at `t`, staying at the final vertex after completion.
    pub fn position_at(&self, t: Time) -> VertexId {
        self.steps.get(t as usize).copied().unwrap_or_else(|| self.last())
    }
}

pub fn position_at(path: &AgentPath, t: Time) -> VertexId {
    path.position_at(t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub paths: Vec<AgentPath>,
}

impl Solution {
    /// Sum of completion times.
    pub fn soc(&self) -> u64 {
        self.paths.iter().map(|p| u64::from(p.cost())).sum()
    }
}

/// Counters reported by the constraint-tree searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub low_level_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Solved(Solution),
    Infeasible,
    Timeout,
}

impl Outcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Outcome::Solved(s) => Some(s),
            _ => None,
        }
    }

    pub fn soc(&self) -> Option<u64> {
        self.solution().map(Solution::soc)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Solved(_) => "solved",
            Outcome::Infeasible => "infeasible",
            Outcome::Timeout => "timeout",
        }
    }
}

/// Wall-clock limit shared by every level of a search.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    end: Option<Instant>,
}

impl Deadline {
    pub fn after(budget: Duration) -> Self {
        Deadline {
            end: Instant::now().checked_add(budget),
        }
    }

    pub fn never() -> Self {
        Deadline { end: None }
    }

    pub fn expired(&self) -> bool {
        self.end.is_some_and(|end| Instant::now() >= end)
    }
}

/// Solution file: paths as `[row, col]` per time step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub cost: u64,
    pub paths: Vec<Vec<[usize; 2]>>,
    pub algo: String,
    pub elapsed_ms: u64,
}

impl SolutionFile {
    pub fn new(solution: &Solution, graph: &Graph, algo: &str, elapsed: Duration) -> Self {
        SolutionFile {
            cost: solution.soc(),
            paths: solution
                .paths
                .iter()
                .map(|p| {
                    p.steps
                        .iter()
                        .map(|&v| {
                            let (r, c) = graph.coord(v);
                            [r, c]
                        })
                        .collect()
                })
                .collect(),
            algo: algo.to_string(),
            elapsed_ms: elapsed.as_millis() as u64,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solution serialization") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stay_semantics() {
        let p = AgentPath::new(vec![4, 5, 6]);
        assert_eq!(p.position_at(0), 4);
        assert_eq!(p.position_at(1), 5);
        assert_eq!(p.position_at(2 + 100), 6);
        assert_eq!(p.cost(), 2);
    }

    #[test]
    fn soc_sums_costs() {
        let s = Solution {
            paths: vec![AgentPath::new(vec![0, 1]), AgentPath::new(vec![3, 3, 2, 1])],
        };
        assert_eq!(s.soc(), 4);
    }
}
