//! Independent solution checker.

use std::fmt;

use crate::graph::{AgentId, Graph, Instance, VertexId};
use crate::solution::{Solution, SolutionFile};

type Cell = [usize; 2];

/// First problem found in a solution, with agent/time coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    AgentCount { expected: usize, found: usize },
    EmptyPath { agent: AgentId },
    Impassable { agent: AgentId, t: usize, cell: Cell },
    WrongStart { agent: AgentId },
    Continuity { agent: AgentId, t: usize },
    GoalNotVisited { agent: AgentId, goal: Cell },
    TerminalNotGoal { agent: AgentId },
    VertexConflict { agents: (AgentId, AgentId), t: usize, cell: Cell },
    EdgeConflict { agents: (AgentId, AgentId), t: usize },
    CostMismatch { declared: u64, actual: u64 },
}

impl Violation {
    /// Stable class name, used in reports and tests.
    pub fn class(&self) -> &'static str {
        match self {
            Violation::AgentCount { .. } => "agent-count",
            Violation::EmptyPath { .. } => "empty-path",
            Violation::Impassable { .. } => "impassable",
            Violation::WrongStart { .. } => "wrong-start",
            Violation::Continuity { .. } => "continuity",
            Violation::GoalNotVisited { .. } => "goal-not-visited",
            Violation::TerminalNotGoal { .. } => "terminal-not-goal",
            Violation::VertexConflict { .. } => "vertex-conflict",
            Violation::EdgeConflict { .. } => "edge-conflict",
            Violation::CostMismatch { .. } => "cost-mismatch",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AgentCount { expected, found } => {
                write!(f, "agent count: instance has {expected}, solution has {found}")
            }
            Violation::EmptyPath { agent } => write!(f, "empty path for agent {agent}"),
            Violation::Impassable { agent, t, cell } => {
                write!(f, "impassable cell {cell:?} at (agent {agent}, t {t})")
            }
            Violation::WrongStart { agent } => write!(f, "agent {agent} does not begin at its start"),
            Violation::Continuity { agent, t } => write!(f, "continuity violation at (agent {agent}, t {t})"),
            Violation::GoalNotVisited { agent, goal } => write!(f, "agent {agent} never visits goal {goal:?}"),
            Violation::TerminalNotGoal { agent } => write!(f, "agent {agent} does not end on a goal"),
            Violation::VertexConflict { agents, t, cell } => write!(
                f,
                "vertex conflict between agents {} and {} at {cell:?}, t {t}",
                agents.0, agents.1
            ),
            Violation::EdgeConflict { agents, t } => write!(
                f,
                "edge conflict between agents {} and {} during step {t}",
                agents.0, agents.1
            ),
            Violation::CostMismatch { declared, actual } => {
                write!(f, "declared cost {declared} but paths sum to {actual}")
            }
        }
    }
}

impl std::error::Error for Violation {}

/// Checks a solution file against its map and instance.
pub fn verify_solution(graph: &Graph, instance: &Instance, solution: &SolutionFile) -> Result<(), Violation> {
    if solution.paths.len() != instance.agent_count() {
        return Err(Violation::AgentCount {
            expected: instance.agent_count(),
            found: solution.paths.len(),
        });
    }
    let mut vpaths: Vec<Vec<VertexId>> = Vec::with_capacity(solution.paths.len());
    for (agent, (path, task)) in solution.paths.iter().zip(&instance.agents).enumerate() {
        if path.is_empty() {
            return Err(Violation::EmptyPath { agent });
        }
        let mut vs = Vec::with_capacity(path.len());
        for (t, &cell) in path.iter().enumerate() {
            let v = graph
                .vertex_at(cell[0], cell[1])
                .ok_or(Violation::Impassable { agent, t, cell })?;
            vs.push(v);
        }
        if vs[0] != task.start {
            return Err(Violation::WrongStart { agent });
        }
        for t in 1..vs.len() {
            let (a, b) = (graph.coord(vs[t - 1]), graph.coord(vs[t]));
            if a.0.abs_diff(b.0) + a.1.abs_diff(b.1) > 1 {
                return Err(Violation::Continuity { agent, t });
            }
        }
        for &g in &task.goals {
            if !vs.contains(&g) {
                let (r, c) = graph.coord(g);
                return Err(Violation::GoalNotVisited { agent, goal: [r, c] });
            }
        }
        if !task.goals.contains(vs.last().expect("non-empty")) {
            return Err(Violation::TerminalNotGoal { agent });
        }
        vpaths.push(vs);
    }

    let at = |p: &[VertexId], t: usize| p[t.min(p.len() - 1)];
    let horizon = vpaths.iter().map(Vec::len).max().unwrap_or(1);
    for t in 0..horizon {
        for i in 0..vpaths.len() {
            for j in i + 1..vpaths.len() {
                let (pi, pj) = (&vpaths[i], &vpaths[j]);
                if at(pi, t) == at(pj, t) {
                    let (r, c) = graph.coord(at(pi, t));
                    return Err(Violation::VertexConflict {
                        agents: (i, j),
                        t,
                        cell: [r, c],
                    });
                }
                if t + 1 < horizon
                    && at(pi, t) == at(pj, t + 1)
                    && at(pj, t) == at(pi, t + 1)
                    && at(pi, t) != at(pi, t + 1)
                {
                    return Err(Violation::EdgeConflict { agents: (i, j), t });
                }
            }
        }
    }

    let actual: u64 = vpaths.iter().map(|p| p.len() as u64 - 1).sum();
    if actual != solution.cost {
        return Err(Violation::CostMismatch {
            declared: solution.cost,
            actual,
        });
    }
    Ok(())
}

/// [`verify_solution`] for an in-memory solution.
pub fn verify_paths(graph: &Graph, instance: &Instance, solution: &Solution) -> Result<(), Violation> {
    let file = SolutionFile::new(solution, graph, "", std::time::Duration::ZERO);
    verify_solution(graph, instance, &file)
}
