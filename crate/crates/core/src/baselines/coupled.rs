//! CBS with a coupled single-agent A* over `(vertex, time, visited goals)`.
//!
//! Exact and slow; used as the optimality referee.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::Duration;

use crate::cbs::{cbs_search, LowLevel};
use crate::constraints::{AgentConstraints, Time};
use crate::error::SearchError;
use crate::graph::{AgentId, AgentTask, Graph, Instance, VertexId};
use crate::low::{DistanceTable, MstHeuristic};
use crate::solution::{AgentPath, Deadline, Outcome, SearchStats};

/// A time-expanded search state with the goals visited so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceTimeState {
    pub vertex: VertexId,
    pub t: Time,
    pub visited: u64,
}

fn goal_bit(task: &AgentTask, v: VertexId) -> u64 {
    task.goal_index(v).map_or(0, |i| 1 << i)
}

/// Optimal single-agent multi-goal path under `cons`, planned from scratch.
pub fn coupled_plan(
    graph: &Graph,
    task: &AgentTask,
    table: &DistanceTable,
    cons: &AgentConstraints,
    deadline: &Deadline,
) -> Result<Option<AgentPath>, SearchError> {
    if cons.vertex_blocked(task.start, 0) {
        return Err(SearchError::NoStartInterval { vertex: task.start });
    }
    let full = task.full_mask();
    let free_from = cons.max_time().map_or(0, |m| m + 1);
    let horizon = free_from + (graph.vertex_count() as Time) * (task.goals.len() as Time + 1);
    let mut heuristic = MstHeuristic::new(table);

    let start = SpaceTimeState {
        vertex: task.start,
        t: 0,
        visited: goal_bit(task, task.start),
    };
    let mut parent: HashMap<SpaceTimeState, Option<SpaceTimeState>> = HashMap::new();
    let mut open = BinaryHeap::new();
    let Some(h0) = heuristic.get(start.visited, start.vertex) else {
        return Ok(None);
    };
    parent.insert(start, None);
    open.push(Reverse((h0, Reverse(0), start)));
    let mut pops = 0u64;
    while let Some(Reverse((_, _, s))) = open.pop() {
        pops += 1;
        if pops.is_multiple_of(1024) && deadline.expired() {
            return Err(SearchError::Timeout);
        }
        if s.visited == full && task.goal_index(s.vertex).is_some() && cons.stay_safe_from(s.vertex, s.t) {
            let mut steps = vec![s.vertex];
            let mut cur = s;
            while let Some(Some(prev)) = parent.get(&cur) {
                cur = *prev;
                steps.push(cur.vertex);
            }
            steps.reverse();
            return Ok(Some(AgentPath::new(steps)));
        }
        if s.t >= horizon {
            continue;
        }
        for &w in graph.neighbors(s.vertex).iter().chain(std::iter::once(&s.vertex)) {
            if !cons.move_allowed(s.t, s.vertex, w) {
                continue;
            }
            let next = SpaceTimeState {
                vertex: w,
                t: s.t + 1,
                visited: s.visited | goal_bit(task, w),
            };
            if let Entry::Vacant(slot) = parent.entry(next) {
                let Some(h) = heuristic.get(next.visited, w) else { continue };
                slot.insert(Some(s));
                open.push(Reverse((next.t + h, Reverse(next.t), next)));
            }
        }
    }
    Ok(None)
}

pub struct CoupledLow<'a> {
    graph: &'a Graph,
    instance: &'a Instance,
    tables: Vec<DistanceTable>,
}

impl<'a> CoupledLow<'a> {
    pub fn new(graph: &'a Graph, instance: &'a Instance) -> Result<Self, SearchError> {
        let tables = instance
            .agents
            .iter()
            .enumerate()
            .map(|(a, task)| DistanceTable::build(graph, a, task))
            .collect::<Result<_, _>>()?;
        Ok(CoupledLow { graph, instance, tables })
    }
}

impl LowLevel for CoupledLow<'_> {
    type AgentData = ();

    fn prepare(&self, _agent: AgentId, _cons: &AgentConstraints) {}

    fn plan(
        &self,
        agent: AgentId,
        _data: &(),
        cons: &AgentConstraints,
        deadline: &Deadline,
    ) -> Result<Option<AgentPath>, SearchError> {
        coupled_plan(self.graph, &self.instance.agents[agent], &self.tables[agent], cons, deadline)
    }
}

pub fn cbs_coupled_solve(
    graph: &Graph,
    instance: &Instance,
    budget: Duration,
) -> Result<(Outcome, SearchStats), SearchError> {
    let deadline = Deadline::after(budget);
    let low = match CoupledLow::new(graph, instance) {
        Ok(low) => low,
        Err(SearchError::InfeasibleTask { .. }) => return Ok((Outcome::Infeasible, SearchStats::default())),
        Err(e) => return Err(e),
    };
    cbs_search(&low, instance.agent_count(), &deadline)
}
