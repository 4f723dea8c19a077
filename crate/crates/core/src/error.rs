use thiserror::Error;

use crate::graph::{AgentId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: row has {found} cells, expected {expected}")]
    RowLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: expected {expected} map rows")]
    RowCount { line: usize, expected: usize },
    #[error("line {line}, column {col}: unknown cell character {ch:?}")]
    UnknownCell { line: usize, col: usize, ch: char },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance has no agents")]
    NoAgents,
    #[error("agent {agent}: duplicate start")]
    DuplicateStart { agent: AgentId },
    #[error("agent {agent}: start not passable")]
    StartNotPassable { agent: AgentId },
    #[error("agent {agent}: goal not passable")]
    GoalNotPassable { agent: AgentId },
    #[error("agent {agent}: empty goal list")]
    EmptyGoals { agent: AgentId },
    #[error("agent {agent}: duplicate goal")]
    DuplicateGoal { agent: AgentId },
    #[error("agent {agent}: more goals than the 64 supported")]
    TooManyGoals { agent: AgentId },
    #[error("invalid instance file: {0}")]
    Json(String),
}

/// Failures raised by the single-agent and constraint-tree searches.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no start interval: vertex {vertex} is constrained at time 0")]
    NoStartInterval { vertex: VertexId },
    #[error("agent {agent}: infeasible task, goal {goal} unreachable from start")]
    InfeasibleTask { agent: AgentId, goal: VertexId },
    #[error("time budget exhausted")]
    Timeout,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Precondition violations on tree and constraint queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("move {from} -> {to} is not a wait or a graph edge")]
    NotAdjacent { from: VertexId, to: VertexId },
    #[error("state (t={time}, v={vertex}) is not safe for the agent")]
    UnsafeState { vertex: VertexId, time: u32 },
    #[error("no path from (t={time}, v={vertex}) to the seed interval")]
    Unreachable { vertex: VertexId, time: u32 },
}
