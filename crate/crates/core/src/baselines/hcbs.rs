//! HCBS-style solver: the single-agent level searches goal *vertex* orders and
//! joins earliest-arrival legs between consecutive goals.
//!
//! States are `(visited goals, current goal vertex)` and keep only the earliest
//! arrival time, so a later arrival at a goal is never considered even when it
//! would enable a cheaper continuation. The solver is therefore suboptimal on
//! some instances.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::time::Duration;

use crate::baselines::spacetime::spacetime_search;
use crate::cbs::{cbs_search, LowLevel};
use crate::constraints::{AgentConstraints, Time, TimeInterval};
use crate::error::SearchError;
use crate::graph::{AgentId, AgentTask, Graph, Instance, VertexId};
use crate::low::{DistanceTable, MstHeuristic};
use crate::solution::{AgentPath, Deadline, Outcome, SearchStats};

struct OrderNode {
    visited: u64,
    goal: Option<usize>,
    vertex: VertexId,
    g: Time,
    back: Option<usize>,
    leg: Vec<VertexId>,
    closed: bool,
}

/// Goal-vertex order search with earliest-arrival legs.
pub fn hcbs_plan(
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
    let mut heuristic = MstHeuristic::new(table);
    let mut arena = vec![OrderNode {
        visited: 0,
        goal: None,
        vertex: task.start,
        g: 0,
        back: None,
        leg: vec![task.start],
        closed: false,
    }];
    let mut index: HashMap<(u64, usize), usize> = HashMap::new();
    let mut open = BinaryHeap::new();
    let h0 = heuristic.get(0, task.start).unwrap_or(0);
    open.push(Reverse((h0, Reverse(0), 0u64, usize::MAX, 0usize)));

    while let Some(Reverse((_, Reverse(g), _, _, idx))) = open.pop() {
        if arena[idx].closed || arena[idx].g != g {
            continue;
        }
        arena[idx].closed = true;
        if deadline.expired() {
            return Err(SearchError::Timeout);
        }
        let (visited, vertex) = (arena[idx].visited, arena[idx].vertex);
        if visited == full {
            let mut legs = Vec::new();
            let mut cur = Some(idx);
            while let Some(i) = cur {
                legs.push(i);
                cur = arena[i].back;
            }
            let mut steps = vec![task.start];
            for &i in legs.iter().rev().skip(1) {
                steps.extend_from_slice(&arena[i].leg[1..]);
            }
            return Ok(Some(AgentPath::new(steps)));
        }
        let unvisited: Vec<usize> = (0..task.goals.len()).filter(|&j| visited & (1 << j) == 0).collect();
        let last = unvisited.len() == 1;
        for &j in &unvisited {
            let key = (visited | (1 << j), j);
            let existing = index.get(&key).copied();
            if existing.is_some_and(|m| arena[m].closed) {
                continue;
            }
            let goal = task.goals[j];
            // The final goal must be reached in a stay-safe interval.
            let window = if last {
                TimeInterval::from(cons.vertex_times(goal).last().map_or(0, |&t| t + 1))
            } else {
                TimeInterval::from(0)
            };
            let Some(leg) = spacetime_search(graph, cons, vertex, g, goal, window, table.to_goal(j), deadline)? else {
                continue;
            };
            let g2 = g + (leg.len() - 1) as Time;
            match existing {
                Some(m) => {
                    if g2 < arena[m].g {
                        let node = &mut arena[m];
                        node.g = g2;
                        node.back = Some(idx);
                        node.leg = leg;
                        let h = heuristic.get(key.0, goal).unwrap_or(0);
                        open.push(Reverse((g2 + h, Reverse(g2), key.0, j, m)));
                    }
                }
                None => {
                    let Some(h) = heuristic.get(key.0, goal) else { continue };
                    let m = arena.len();
                    arena.push(OrderNode {
                        visited: key.0,
                        goal: Some(j),
                        vertex: goal,
                        g: g2,
                        back: Some(idx),
                        leg,
                        closed: false,
                    });
                    index.insert(key, m);
                    open.push(Reverse((g2 + h, Reverse(g2), key.0, j, m)));
                }
            }
        }
        debug_assert!(arena[idx].goal.is_some() || arena[idx].back.is_none());
    }
    Ok(None)
}

pub struct HcbsLow<'a> {
    graph: &'a Graph,
    instance: &'a Instance,
    tables: Vec<DistanceTable>,
}

impl<'a> HcbsLow<'a> {
    pub fn new(graph: &'a Graph, instance: &'a Instance) -> Result<Self, SearchError> {
        let tables = instance
            .agents
            .iter()
            .enumerate()
            .map(|(a, task)| DistanceTable::build(graph, a, task))
            .collect::<Result<_, _>>()?;
        Ok(HcbsLow { graph, instance, tables })
    }
}

impl LowLevel for HcbsLow<'_> {
    type AgentData = ();

    const OPTIMAL: bool = false;

    fn prepare(&self, _agent: AgentId, _cons: &AgentConstraints) {}

    fn plan(
        &self,
        agent: AgentId,
        _data: &(),
        cons: &AgentConstraints,
        deadline: &Deadline,
    ) -> Result<Option<AgentPath>, SearchError> {
        hcbs_plan(self.graph, &self.instance.agents[agent], &self.tables[agent], cons, deadline)
    }
}

pub fn hcbs_solve(graph: &Graph, instance: &Instance, budget: Duration) -> Result<(Outcome, SearchStats), SearchError> {
    let deadline = Deadline::after(budget);
    let low = match HcbsLow::new(graph, instance) {
        Ok(low) => low,
        Err(SearchError::InfeasibleTask { .. }) => return Ok((Outcome::Infeasible, SearchStats::default())),
        Err(e) => return Err(e),
    };
    cbs_search(&low, instance.agent_count(), &deadline)
}
