//! Time-interval-space trees and forests.
//!
//! A tree is seeded at one goal safe interval (GSI) and stores, for every safe
//! `(vertex, time)` of the agent, the length of the shortest path that first
//! enters the seed interval at the seed vertex. Safe times at a vertex are
//! grouped into nodes: all times of a node share one cost and one parent, so a
//! single backward Dijkstra pass over nodes answers every start time at once.
//! A node is split when only part of its interval can be improved through a
//! reverse edge.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::constraints::{
    dec_bound, merge_sorted, subtract_times, AgentConstraints, ConstraintSet, SafeInterval, Time, TimeInterval,
    TisState,
};
use crate::error::ContractError;
use crate::graph::{AgentId, AgentTask, Graph, VertexId};

pub type NodeId = usize;

/// `v`'s neighbors followed by `v` itself (the wait action).
pub fn neighbors_with_wait(v: VertexId, graph: &Graph) -> Vec<VertexId> {
    let mut out = graph.neighbors(v).to_vec();
    out.push(v);
    out
}

/// Times `t` at `from_vertex` from which one action reaches `parent_interval` at
/// `parent_vertex`: `(t, from_vertex)` is safe, the traversal departing at `t` is
/// not edge-constrained, and `t + 1` lies in `parent_interval`.
///
/// The parent interval is assumed safe, so arrival vertex constraints are not rechecked.
pub fn backward_set(
    parent_interval: TimeInterval,
    parent_vertex: VertexId,
    from_vertex: VertexId,
    cons: &AgentConstraints,
) -> Vec<TimeInterval> {
    let mut out = Vec::new();
    backward_set_into(&mut out, parent_interval, parent_vertex, from_vertex, cons);
    out
}

fn backward_set_into(
    out: &mut Vec<TimeInterval>,
    parent_interval: TimeInterval,
    parent_vertex: VertexId,
    from_vertex: VertexId,
    cons: &AgentConstraints,
) {
    out.clear();
    if parent_interval.hi == 0 {
        return;
    }
    let range = TimeInterval {
        lo: parent_interval.lo.saturating_sub(1),
        hi: dec_bound(parent_interval.hi),
    };
    let vertex_times = cons.vertex_times(from_vertex);
    let edge_times = if from_vertex == parent_vertex {
        &[][..]
    } else {
        cons.edge_times(from_vertex, parent_vertex)
    };
    match (vertex_times.is_empty(), edge_times.is_empty()) {
        (true, true) => out.push(range),
        (false, true) => out.extend(subtract_times(range, vertex_times.iter().copied())),
        (true, false) => out.extend(subtract_times(range, edge_times.iter().copied())),
        (false, false) => out.extend(subtract_times(range, merge_sorted(vertex_times, edge_times))),
    }
}

pub fn compute_backward_set(
    parent_interval: TimeInterval,
    parent_vertex: VertexId,
    from_vertex: VertexId,
    agent: AgentId,
    cons: &ConstraintSet,
) -> Vec<TimeInterval> {
    backward_set(parent_interval, parent_vertex, from_vertex, cons.for_agent(agent))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TisNode {
    pub state: TisState,
    /// Steps to the seed interval; `None` when the seed cannot be reached.
    pub cost: Option<u32>,
    pub parent: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentAction {
    Move(VertexId),
    Wait,
}

#[derive(Debug, Clone)]
pub struct TisTree {
    seed: SafeInterval,
    seed_node: NodeId,
    nodes: Vec<TisNode>,
    by_vertex: Vec<Vec<NodeId>>,
}

type QueueEntry = Reverse<(u32, VertexId, Time, NodeId)>;

struct Builder<'a> {
    graph: &'a Graph,
    cons: &'a AgentConstraints,
    nodes: Vec<TisNode>,
    dead: Vec<bool>,
    done: Vec<bool>,
    by_vertex: Vec<Vec<NodeId>>,
    queue: BinaryHeap<QueueEntry>,
}

impl Builder<'_> {
    fn add(&mut self, node: TisNode) -> NodeId {
        let id = self.nodes.len();
        if let Some(cost) = node.cost {
            self.queue
                .push(Reverse((cost, node.state.vertex, node.state.interval.lo, id)));
        }
        self.nodes.push(node);
        self.dead.push(false);
        self.done.push(false);
        id
    }

    fn improve(&mut self, id: NodeId, cost: u32, parent: NodeId) {
        let node = &mut self.nodes[id];
        node.cost = Some(cost);
        node.parent = Some(parent);
        self.queue
            .push(Reverse((cost, node.state.vertex, node.state.interval.lo, id)));
    }

    fn run(&mut self) {
        while let Some(Reverse((cost, vertex, _, id))) = self.queue.pop() {
            if self.dead[id] || self.done[id] || self.nodes[id].cost != Some(cost) {
                continue;
            }
            self.done[id] = true;
            let interval = self.nodes[id].state.interval;
            let relaxed = cost + 1;
            let mut b = Vec::new();
            for &w in self.graph.neighbors(vertex).iter().chain(std::iter::once(&vertex)) {
                backward_set_into(&mut b, interval, vertex, w, self.cons);
                if !b.is_empty() && self.improvable(w, &b, relaxed) {
                    self.relax_vertex(w, &b, relaxed, id);
                }
            }
        }
    }

    fn improvable(&self, w: VertexId, b: &[TimeInterval], cost: u32) -> bool {
        self.by_vertex[w].iter().any(|&id| {
            let node = &self.nodes[id];
            !self.done[id]
                && node.cost.is_none_or(|c| c > cost)
                && b.iter().any(|bi| bi.intersect(&node.state.interval).is_some())
        })
    }

    /// Improves every node at `w` whose times are (partly) covered by `b`.
    fn relax_vertex(&mut self, w: VertexId, b: &[TimeInterval], cost: u32, parent: NodeId) {
        let old = std::mem::take(&mut self.by_vertex[w]);
        let mut next = Vec::with_capacity(old.len() + 2);
        for id in old {
            let node = self.nodes[id];
            if self.done[id] || node.cost.is_some_and(|c| c <= cost) {
                next.push(id);
                continue;
            }
            let interval = node.state.interval;
            let mut covered = b.iter().filter_map(|bi| bi.intersect(&interval)).peekable();
            let Some(first) = covered.peek().copied() else {
                next.push(id);
                continue;
            };
            if first == interval {
                self.improve(id, cost, parent);
                next.push(id);
                continue;
            }
            // Partial coverage: replace the node by covered and uncovered fragments.
            self.dead[id] = true;
            let fragment = |interval, cost, parent| TisNode {
                state: TisState { interval, vertex: w },
                cost,
                parent,
            };
            let mut cursor = Some(interval.lo);
            for piece in covered.collect::<Vec<_>>() {
                let lo = cursor.expect("covered pieces are disjoint and ascending");
                if piece.lo > lo {
                    let gap = TimeInterval { lo, hi: piece.lo - 1 };
                    next.push(self.add(fragment(gap, node.cost, node.parent)));
                }
                next.push(self.add(fragment(piece, Some(cost), Some(parent))));
                cursor = (piece.hi < interval.hi).then(|| piece.hi + 1);
            }
            if let Some(lo) = cursor {
                let rest = TimeInterval { lo, hi: interval.hi };
                next.push(self.add(fragment(rest, node.cost, node.parent)));
            }
        }
        self.by_vertex[w] = next;
    }

    fn finish(self, seed: SafeInterval, seed_node: NodeId) -> TisTree {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut by_vertex = Vec::with_capacity(self.by_vertex.len());
        for ids in &self.by_vertex {
            let mut list = Vec::with_capacity(ids.len());
            for &id in ids {
                remap[id] = nodes.len();
                list.push(nodes.len());
                nodes.push(self.nodes[id]);
            }
            by_vertex.push(list);
        }
        for node in &mut nodes {
            node.parent = node.parent.map(|p| remap[p]);
            debug_assert!(node.parent.is_none_or(|p| p != usize::MAX));
        }
        TisTree {
            seed,
            seed_node: remap[seed_node],
            nodes,
            by_vertex,
        }
    }
}

impl TisTree {
    /// Backward Dijkstra from `seed` over the agent's safe interval nodes.
    ///
    /// # Panics
    /// If `seed` is not a maximal safe interval of its vertex under `cons`.
    pub fn build(graph: &Graph, cons: &AgentConstraints, seed: SafeInterval) -> TisTree {
        let mut builder = Builder {
            graph,
            cons,
            nodes: Vec::with_capacity(graph.vertex_count() + cons.len() * 2),
            dead: Vec::new(),
            done: Vec::new(),
            by_vertex: vec![Vec::new(); graph.vertex_count()],
            queue: BinaryHeap::new(),
        };
        let mut seed_node = None;
        for v in 0..graph.vertex_count() {
            for interval in cons.safe_intervals(v) {
                let is_seed = v == seed.vertex && interval == seed.interval;
                let id = builder.add(TisNode {
                    state: TisState { interval, vertex: v },
                    cost: is_seed.then_some(0),
                    parent: None,
                });
                if is_seed {
                    seed_node = Some(id);
                }
                builder.by_vertex[v].push(id);
            }
        }
        let seed_node = seed_node.expect("seed must be a safe interval of its vertex");
        builder.run();
        builder.finish(seed, seed_node)
    }

    pub fn seed(&self) -> SafeInterval {
        self.seed
    }

    pub fn seed_node(&self) -> NodeId {
        self.seed_node
    }

    pub fn nodes(&self) -> &[TisNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &TisNode {
        &self.nodes[id]
    }

    /// Node ids at `v`, ascending by interval start.
    pub fn nodes_at(&self, v: VertexId) -> &[NodeId] {
        &self.by_vertex[v]
    }

    pub fn parent_action(&self, id: NodeId) -> Option<ParentAction> {
        let node = &self.nodes[id];
        node.parent.map(|p| {
            let pv = self.nodes[p].state.vertex;
            if pv == node.state.vertex {
                ParentAction::Wait
            } else {
                ParentAction::Move(pv)
            }
        })
    }

    /// The node whose interval at `v` contains `t`; `None` iff `(t, v)` is unsafe.
    pub fn locate(&self, v: VertexId, t: Time) -> Option<NodeId> {
        let ids = &self.by_vertex[v];
        let pos = ids.partition_point(|&id| self.nodes[id].state.interval.lo <= t);
        let id = *ids.get(pos.checked_sub(1)?)?;
        self.nodes[id].state.interval.contains(t).then_some(id)
    }

    /// Shortest number of steps from `(t, v)` to first arrival in the seed interval.
    pub fn query_length(&self, v: VertexId, t: Time) -> Result<Option<u32>, ContractError> {
        self.locate(v, t)
            .map(|id| self.nodes[id].cost)
            .ok_or(ContractError::UnsafeState { vertex: v, time: t })
    }

    /// Vertex sequence for times `t ..= t + length`, ending at the seed vertex.
    pub fn extract_path(&self, v: VertexId, t: Time) -> Result<Vec<VertexId>, ContractError> {
        let mut id = self.locate(v, t).ok_or(ContractError::UnsafeState { vertex: v, time: t })?;
        let len = self.nodes[id].cost.ok_or(ContractError::Unreachable { vertex: v, time: t })?;
        let mut path = Vec::with_capacity(len as usize + 1);
        path.push(v);
        while let Some(parent) = self.nodes[id].parent {
            id = parent;
            path.push(self.nodes[id].state.vertex);
        }
        debug_assert_eq!(path.len(), len as usize + 1);
        Ok(path)
    }

    pub fn to_dump(&self) -> TreeDump {
        TreeDump {
            seed_vertex: self.seed.vertex,
            seed_lo: self.seed.interval.lo,
            seed_hi: bound_json(self.seed.interval.hi),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDump {
                    vertex: n.state.vertex,
                    lo: n.state.interval.lo,
                    hi: bound_json(n.state.interval.hi),
                    cost: n.cost,
                    parent: n.parent,
                })
                .collect(),
        }
    }
}

fn bound_json(hi: Time) -> Option<Time> {
    (hi != crate::constraints::UNBOUNDED).then_some(hi)
}

/// JSON debug form of a tree; `hi: null` encodes an unbounded interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeDump {
    pub seed_vertex: VertexId,
    pub seed_lo: Time,
    pub seed_hi: Option<Time>,
    pub nodes: Vec<NodeDump>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeDump {
    pub vertex: VertexId,
    pub lo: Time,
    pub hi: Option<Time>,
    pub cost: Option<u32>,
    pub parent: Option<NodeId>,
}

pub fn build_tis_tree(graph: &Graph, agent: AgentId, cons: &ConstraintSet, seed: SafeInterval) -> TisTree {
    TisTree::build(graph, cons.for_agent(agent), seed)
}

/// A goal safe interval, identified by the goal's canonical index and the
/// interval's position among that goal's safe intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GsiId {
    pub goal: usize,
    pub slot: usize,
}

/// Safe intervals of every goal of one task, indexed by goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalIntervals {
    pub goals: Vec<VertexId>,
    pub intervals: Vec<Vec<TimeInterval>>,
}

impl GoalIntervals {
    pub fn new(task: &AgentTask, cons: &AgentConstraints) -> Self {
        GoalIntervals {
            goals: task.goals.clone(),
            intervals: task.goals.iter().map(|&g| cons.safe_intervals(g)).collect(),
        }
    }

    pub fn gsi(&self, id: GsiId) -> SafeInterval {
        SafeInterval {
            interval: self.intervals[id.goal][id.slot],
            vertex: self.goals[id.goal],
        }
    }

    /// The unbounded last interval of a goal.
    pub fn latest(&self, goal: usize) -> GsiId {
        GsiId {
            goal,
            slot: self.intervals[goal].len() - 1,
        }
    }

    pub fn all(&self) -> impl Iterator<Item = GsiId> + '_ {
        self.intervals
            .iter()
            .enumerate()
            .flat_map(|(goal, ivs)| (0..ivs.len()).map(move |slot| GsiId { goal, slot }))
    }

    pub fn count(&self) -> usize {
        self.intervals.iter().map(Vec::len).sum()
    }
}

/// One tree per goal safe interval of one agent.
#[derive(Debug, Clone)]
pub struct TisForest {
    agent: AgentId,
    gsis: GoalIntervals,
    trees: Vec<Vec<TisTree>>,
}

impl TisForest {
    pub fn build(graph: &Graph, agent: AgentId, task: &AgentTask, cons: &AgentConstraints) -> TisForest {
        let gsis = GoalIntervals::new(task, cons);
        let trees = gsis
            .intervals
            .iter()
            .zip(&gsis.goals)
            .map(|(ivs, &vertex)| {
                ivs.iter()
                    .map(|&interval| TisTree::build(graph, cons, SafeInterval { interval, vertex }))
                    .collect()
            })
            .collect();
        TisForest { agent, gsis, trees }
    }

    pub fn agent(&self) -> AgentId {
        self.agent
    }

    pub fn goal_intervals(&self) -> &GoalIntervals {
        &self.gsis
    }

    pub fn tree(&self, gsi: GsiId) -> &TisTree {
        &self.trees[gsi.goal][gsi.slot]
    }

    pub fn tree_count(&self) -> usize {
        self.trees.iter().map(Vec::len).sum()
    }

    pub fn trees(&self) -> impl Iterator<Item = (GsiId, &TisTree)> {
        self.gsis.all().map(move |id| (id, self.tree(id)))
    }
}

pub fn build_tis_forest(graph: &Graph, agent: AgentId, task: &AgentTask, cons: &ConstraintSet) -> TisForest {
    TisForest::build(graph, agent, task, cons.for_agent(agent))
}

pub fn query_length(tree: &TisTree, v: VertexId, t: Time) -> Result<Option<u32>, ContractError> {
    tree.query_length(v, t)
}

pub fn extract_path(tree: &TisTree, v: VertexId, t: Time) -> Result<Vec<VertexId>, ContractError> {
    tree.extract_path(v, t)
}
