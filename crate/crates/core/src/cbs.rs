//! Constraint-tree search shared by every solver in the crate, and MGCBS itself.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Duration;

use crate::constraints::{AgentConstraints, Constraint, ConstraintSet, Time};
use crate::error::SearchError;
use crate::graph::{AgentId, Graph, Instance, VertexId};
use crate::low::{plan_with_forest, DistanceTable};
use crate::solution::{AgentPath, Deadline, Outcome, SearchStats, Solution};
use crate::tis::TisForest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConflictKind {
    Vertex { at: VertexId },
    /// `from -> to` as traversed by the first agent of the pair.
    Edge { from: VertexId, to: VertexId },
}

/// Two agents colliding at `time` (vertex) or during the step `time -> time + 1` (edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Conflict {
    pub agents: (AgentId, AgentId),
    pub time: Time,
    pub kind: ConflictKind,
}

fn pair_conflicts<'a>(a: &'a AgentPath, b: &'a AgentPath, limit: Time) -> impl Iterator<Item = (Time, ConflictKind)> + 'a {
    let horizon = a.cost().max(b.cost()).min(limit);
    (0..=horizon).flat_map(move |t| {
        let (a0, b0) = (a.position_at(t), b.position_at(t));
        let vertex = (a0 == b0).then_some((t, ConflictKind::Vertex { at: a0 }));
        let edge = (t < horizon)
            .then(|| (a.position_at(t + 1), b.position_at(t + 1)))
            .filter(|&(a1, b1)| a0 != a1 && a0 == b1 && a1 == b0)
            .map(|(a1, _)| (t, ConflictKind::Edge { from: a0, to: a1 }));
        vertex.into_iter().chain(edge)
    })
}

/// Earliest conflict under post-completion stay semantics.
///
/// Ties on time go to the smaller agent pair, then vertex before edge.
pub fn find_earliest_conflict(paths: &[AgentPath]) -> Option<Conflict> {
    let mut best: Option<Conflict> = None;
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            let limit = best.map_or(Time::MAX, |b| b.time);
            if let Some((time, kind)) = pair_conflicts(&paths[i], &paths[j], limit).next() {
                if best.is_none_or(|b| time < b.time) {
                    best = Some(Conflict {
                        agents: (i, j),
                        time,
                        kind,
                    });
                }
            }
        }
    }
    best
}

/// Total number of pairwise conflict events.
pub fn count_conflicts(paths: &[AgentPath]) -> usize {
    let mut n = 0;
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            n += pair_conflicts(&paths[i], &paths[j], Time::MAX).count();
        }
    }
    n
}

/// One constraint per child: each agent is forbidden its own part of the conflict.
pub fn split_constraints(conflict: &Conflict) -> [Constraint; 2] {
    let (i, j) = conflict.agents;
    let time = conflict.time;
    match conflict.kind {
        ConflictKind::Vertex { at } => [
            Constraint::Vertex { agent: i, time, at },
            Constraint::Vertex { agent: j, time, at },
        ],
        ConflictKind::Edge { from, to } => [
            Constraint::Edge {
                agent: i,
                time,
                from,
                to,
            },
            Constraint::Edge {
                agent: j,
                time,
                from: to,
                to: from,
            },
        ],
    }
}

/// A single-agent planner plugged under the constraint tree.
pub trait LowLevel {
    /// Per-agent structure kept in constraint-tree nodes and shared with children.
    type AgentData;

    /// Whether `plan` returns cost-optimal paths, so child costs never drop.
    const OPTIMAL: bool = true;

    fn prepare(&self, agent: AgentId, cons: &AgentConstraints) -> Self::AgentData;

    fn plan(
        &self,
        agent: AgentId,
        data: &Self::AgentData,
        cons: &AgentConstraints,
        deadline: &Deadline,
    ) -> Result<Option<AgentPath>, SearchError>;
}

pub struct CtNode<D> {
    pub cons: ConstraintSet,
    pub paths: Vec<Arc<AgentPath>>,
    pub data: Vec<Arc<D>>,
    pub cost: u64,
    pub conflicts: usize,
}

impl<D> CtNode<D> {
    fn owned_paths(&self) -> Vec<AgentPath> {
        self.paths.iter().map(|p| p.as_ref().clone()).collect()
    }
}

fn soc(paths: &[Arc<AgentPath>]) -> u64 {
    paths.iter().map(|p| u64::from(p.cost())).sum()
}

fn plan_agent<L: LowLevel>(
    low: &L,
    agent: AgentId,
    data: &L::AgentData,
    cons: &AgentConstraints,
    deadline: &Deadline,
    stats: &mut SearchStats,
) -> Result<Option<AgentPath>, SearchError> {
    stats.low_level_calls += 1;
    match low.plan(agent, data, cons, deadline) {
        Err(SearchError::NoStartInterval { .. }) => Ok(None),
        other => other,
    }
}

/// Best-first constraint-tree search. Only `Invariant` errors escape; timeouts
/// and exhausted trees are reported through [`Outcome`].
pub fn cbs_search<L: LowLevel>(
    low: &L,
    agent_count: usize,
    deadline: &Deadline,
) -> Result<(Outcome, SearchStats), SearchError> {
    let mut stats = SearchStats::default();
    match cbs_inner(low, agent_count, deadline, &mut stats) {
        Ok(outcome) => Ok((outcome, stats)),
        Err(SearchError::Timeout) => Ok((Outcome::Timeout, stats)),
        Err(SearchError::InfeasibleTask { .. }) => Ok((Outcome::Infeasible, stats)),
        Err(e) => Err(e),
    }
}

fn cbs_inner<L: LowLevel>(
    low: &L,
    agent_count: usize,
    deadline: &Deadline,
    stats: &mut SearchStats,
) -> Result<Outcome, SearchError> {
    let root_cons = ConstraintSet::new();
    let mut paths = Vec::with_capacity(agent_count);
    let mut data = Vec::with_capacity(agent_count);
    for agent in 0..agent_count {
        let d = low.prepare(agent, root_cons.for_agent(agent));
        match plan_agent(low, agent, &d, root_cons.for_agent(agent), deadline, stats)? {
            Some(p) => paths.push(Arc::new(p)),
            None => return Ok(Outcome::Infeasible),
        }
        data.push(Arc::new(d));
    }
    let root = CtNode {
        cons: root_cons,
        cost: soc(&paths),
        conflicts: count_conflicts(&paths.iter().map(|p| p.as_ref().clone()).collect::<Vec<_>>()),
        paths,
        data,
    };

    let mut nodes: Vec<Option<CtNode<L::AgentData>>> = vec![Some(root)];
    let mut open: BinaryHeap<Reverse<(u64, usize, usize)>> = BinaryHeap::new();
    open.push(Reverse((nodes[0].as_ref().map_or(0, |n| n.cost), 0, 0)));
    stats.generated = 1;

    while let Some(Reverse((_, _, id))) = open.pop() {
        if deadline.expired() {
            return Err(SearchError::Timeout);
        }
        let node = nodes[id].take().expect("each node is popped once");
        stats.expanded += 1;
        let current = node.owned_paths();
        let Some(conflict) = find_earliest_conflict(&current) else {
            return Ok(Outcome::Solved(Solution { paths: current }));
        };
        for c in split_constraints(&conflict) {
            if node.cons.contains(&c) {
                continue;
            }
            let agent = c.agent();
            let cons = node.cons.with(c);
            let agent_cons = cons.for_agent(agent);
            let d = low.prepare(agent, agent_cons);
            let Some(path) = plan_agent(low, agent, &d, agent_cons, deadline, stats)? else {
                continue;
            };
            let mut paths = node.paths.clone();
            paths[agent] = Arc::new(path);
            let mut data = node.data.clone();
            data[agent] = Arc::new(d);
            let owned: Vec<AgentPath> = paths.iter().map(|p| p.as_ref().clone()).collect();
            let child = CtNode {
                cost: soc(&paths),
                conflicts: count_conflicts(&owned),
                cons,
                paths,
                data,
            };
            debug_assert!(!L::OPTIMAL || child.cost >= node.cost, "child cost below parent");
            let cid = nodes.len();
            open.push(Reverse((child.cost, child.conflicts, cid)));
            nodes.push(Some(child));
            stats.generated += 1;
        }
    }
    Ok(Outcome::Infeasible)
}

/// MGCBS low level: per-agent TIS forests, distance tables built once at the root.
pub struct MgcbsLow<'a> {
    graph: &'a Graph,
    instance: &'a Instance,
    tables: Vec<DistanceTable>,
}

impl<'a> MgcbsLow<'a> {
    pub fn new(graph: &'a Graph, instance: &'a Instance) -> Result<Self, SearchError> {
        let tables = instance
            .agents
            .iter()
            .enumerate()
            .map(|(a, task)| DistanceTable::build(graph, a, task))
            .collect::<Result<_, _>>()?;
        Ok(MgcbsLow { graph, instance, tables })
    }
}

impl LowLevel for MgcbsLow<'_> {
    type AgentData = TisForest;

    fn prepare(&self, agent: AgentId, cons: &AgentConstraints) -> TisForest {
        TisForest::build(self.graph, agent, &self.instance.agents[agent], cons)
    }

    fn plan(
        &self,
        agent: AgentId,
        forest: &TisForest,
        cons: &AgentConstraints,
        deadline: &Deadline,
    ) -> Result<Option<AgentPath>, SearchError> {
        plan_with_forest(forest, &self.tables[agent], &self.instance.agents[agent], cons, deadline)
    }
}

/// Optimal MG-MAPF solve with MGCBS.
pub fn mgcbs_solve(graph: &Graph, instance: &Instance, budget: Duration) -> Result<(Outcome, SearchStats), SearchError> {
    let deadline = Deadline::after(budget);
    let low = match MgcbsLow::new(graph, instance) {
        Ok(low) => low,
        Err(SearchError::InfeasibleTask { .. }) => return Ok((Outcome::Infeasible, SearchStats::default())),
        Err(e) => return Err(e),
    };
    cbs_search(&low, instance.agent_count(), &deadline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_map, AgentTask};

    fn p(steps: &[VertexId]) -> AgentPath {
        AgentPath::new(steps.to_vec())
    }

    fn grid(rows: &[&str]) -> Graph {
        parse_map(&format!(
            "type octile\nheight {}\nwidth {}\nmap\n{}\n",
            rows.len(),
            rows[0].len(),
            rows.join("\n")
        ))
        .unwrap()
    }

    #[test]
    fn swap_is_an_edge_conflict_at_zero() {
        let c = find_earliest_conflict(&[p(&[0, 1]), p(&[1, 0])]).unwrap();
        assert_eq!(c.time, 0);
        assert_eq!(c.agents, (0, 1));
        assert_eq!(c.kind, ConflictKind::Edge { from: 0, to: 1 });
    }

    #[test]
    fn stay_conflict_at_later_completion() {
        let c = find_earliest_conflict(&[p(&[0, 1, 2]), p(&[5, 4, 3, 6, 2])]).unwrap();
        assert_eq!(c.time, 4);
        assert_eq!(c.kind, ConflictKind::Vertex { at: 2 });
        // an agent walking through a finished agent
        let c = find_earliest_conflict(&[p(&[2]), p(&[0, 1, 2, 3])]).unwrap();
        assert_eq!((c.time, c.kind), (2, ConflictKind::Vertex { at: 2 }));
    }

    #[test]
    fn disjoint_paths_have_no_conflict() {
        assert!(find_earliest_conflict(&[p(&[0, 1, 2]), p(&[5, 6, 7])]).is_none());
        assert_eq!(count_conflicts(&[p(&[0, 1, 2]), p(&[5, 6, 7])]), 0);
    }

    #[test]
    fn tie_breaks_on_pair_then_kind() {
        // agents 1,2 collide at t=1 on a vertex; 0,3 swap during step 1
        let paths = [p(&[10, 11, 12]), p(&[20, 30]), p(&[31, 30]), p(&[13, 12, 11])];
        let c = find_earliest_conflict(&paths).unwrap();
        assert_eq!(c.agents, (0, 3));
        assert_eq!(c.time, 1);
        let paths = [p(&[10, 11, 12]), p(&[20, 30]), p(&[31, 30])];
        assert_eq!(find_earliest_conflict(&paths).unwrap().agents, (1, 2));
    }

    #[test]
    fn split_examples() {
        let v = Conflict {
            agents: (0, 2),
            time: 3,
            kind: ConflictKind::Vertex { at: 7 },
        };
        assert_eq!(
            split_constraints(&v),
            [
                Constraint::Vertex { agent: 0, time: 3, at: 7 },
                Constraint::Vertex { agent: 2, time: 3, at: 7 }
            ]
        );
        let e = Conflict {
            agents: (1, 2),
            time: 4,
            kind: ConflictKind::Edge { from: 5, to: 6 },
        };
        assert_eq!(
            split_constraints(&e),
            [
                Constraint::Edge { agent: 1, time: 4, from: 5, to: 6 },
                Constraint::Edge { agent: 2, time: 4, from: 6, to: 5 }
            ]
        );
        let parent = ConstraintSet::new();
        for c in split_constraints(&e) {
            assert_eq!(parent.with(c).len(), parent.len() + 1);
        }
    }

    #[test]
    fn disjoint_agents_sum_of_optima() {
        let g = grid(&["....", "@@@@", "...."]);
        let inst = Instance::new(
            "m",
            vec![
                AgentTask { start: 0, goals: vec![3, 1] },
                AgentTask { start: 4, goals: vec![6] },
            ],
            &g,
        )
        .unwrap();
        let (out, _) = mgcbs_solve(&g, &inst, Duration::from_secs(5)).unwrap();
        assert_eq!(out.soc(), Some(3 + 2));
    }

    #[test]
    fn open_square_swap() {
        // 0 1
        // 2 3   agents exchange diagonal corners
        let g = grid(&["..", ".."]);
        let inst = Instance::new(
            "m",
            vec![
                AgentTask { start: 0, goals: vec![3] },
                AgentTask { start: 3, goals: vec![0] },
            ],
            &g,
        )
        .unwrap();
        let (out, stats) = mgcbs_solve(&g, &inst, Duration::from_secs(5)).unwrap();
        assert_eq!(out.soc(), Some(4));
        assert!(stats.expanded >= 1);
    }

    #[test]
    fn corridor_swap_is_infeasible_but_times_out() {
        // two agents exchanging ends of a corridor
        let g = grid(&["..."]);
        let inst = Instance::new(
            "m",
            vec![
                AgentTask { start: 0, goals: vec![2] },
                AgentTask { start: 2, goals: vec![0] },
            ],
            &g,
        )
        .unwrap();
        let (out, _) = mgcbs_solve(&g, &inst, Duration::from_millis(200)).unwrap();
        assert_eq!(out, Outcome::Timeout);
    }
}
