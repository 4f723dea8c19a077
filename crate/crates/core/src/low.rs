//! Single-agent search over goal safe interval visiting orders.
//!
//! States are `(visited goals, current GSI)`. A transition picks an unvisited
//! goal's safe interval and pays the shortest time to first enter it from the
//! current vertex at the current time. Lengths come from a [`LegPlanner`]: the
//! TIS forest in the main solver, repeated space-time A* in the forest-free
//! variant. The heuristic is the MST over the current vertex and the
//! unvisited goals, using unconstrained distances.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::constraints::{AgentConstraints, Time};
use crate::error::SearchError;
use crate::graph::{AgentId, AgentTask, Graph, VertexId};
use crate::solution::{AgentPath, Deadline};
use crate::tis::{GoalIntervals, GsiId, TisForest};

/// Unconstrained distances from every vertex to every goal of one agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    goals: Vec<VertexId>,
    dist: Vec<Vec<Option<u32>>>,
}

impl DistanceTable {
    /// Per-goal breadth-first search. Fails if a goal is unreachable from the start.
    pub fn build(graph: &Graph, agent: AgentId, task: &AgentTask) -> Result<Self, SearchError> {
        let dist: Vec<_> = task.goals.iter().map(|&g| graph.bfs_distances(g)).collect();
        for (i, d) in dist.iter().enumerate() {
            if d[task.start].is_none() {
                return Err(SearchError::InfeasibleTask {
                    agent,
                    goal: task.goals[i],
                });
            }
        }
        Ok(DistanceTable {
            goals: task.goals.clone(),
            dist,
        })
    }

    pub fn goals(&self) -> &[VertexId] {
        &self.goals
    }

    /// Distance between `v` and goal number `goal`.
    pub fn get(&self, goal: usize, v: VertexId) -> Option<u32> {
        self.dist[goal][v]
    }

    pub fn to_goal(&self, goal: usize) -> &[Option<u32>] {
        &self.dist[goal]
    }
}

pub fn build_distance_table(graph: &Graph, agent: AgentId, task: &AgentTask) -> Result<DistanceTable, SearchError> {
    DistanceTable::build(graph, agent, task)
}

/// Weight of the minimum spanning tree over `current` and every goal not in `visited`.
///
/// `None` if some pair is disconnected.
pub fn mst_cost(table: &DistanceTable, visited: u64, current: VertexId) -> Option<u32> {
    let unvisited: Vec<usize> = (0..table.goals.len()).filter(|&i| visited & (1 << i) == 0).collect();
    if unvisited.is_empty() {
        return Some(0);
    }
    // Prim, dense: node 0 is `current`, node k + 1 is unvisited[k].
    let mut best: Vec<Option<u32>> = unvisited.iter().map(|&g| table.get(g, current)).collect();
    let mut in_tree = vec![false; unvisited.len()];
    let mut total = 0u32;
    for _ in 0..unvisited.len() {
        let (k, w) = best
            .iter()
            .enumerate()
            .filter(|&(k, _)| !in_tree[k])
            .filter_map(|(k, w)| w.map(|w| (k, w)))
            .min_by_key(|&(k, w)| (w, k))?;
        in_tree[k] = true;
        total += w;
        let gk = table.goals[unvisited[k]];
        for (j, &goal) in unvisited.iter().enumerate() {
            if in_tree[j] {
                continue;
            }
            if let Some(d) = table.get(goal, gk) {
                if best[j].is_none_or(|b| d < b) {
                    best[j] = Some(d);
                }
            }
        }
    }
    Some(total)
}

/// Memoized MST heuristic keyed by `(visited, vertex)`.
pub struct MstHeuristic<'a> {
    table: &'a DistanceTable,
    cache: HashMap<(u64, VertexId), Option<u32>>,
}

impl<'a> MstHeuristic<'a> {
    pub fn new(table: &'a DistanceTable) -> Self {
        MstHeuristic {
            table,
            cache: HashMap::new(),
        }
    }

    pub fn get(&mut self, visited: u64, v: VertexId) -> Option<u32> {
        *self
            .cache
            .entry((visited, v))
            .or_insert_with(|| mst_cost(self.table, visited, v))
    }
}

/// Source of shortest leg lengths and paths to a goal safe interval.
pub trait LegPlanner {
    /// Whether length queries are cheap enough to re-run for consistency checks.
    const CHEAP_QUERIES: bool = false;

    fn goal_intervals(&self) -> &GoalIntervals;

    /// Steps from `(t, from)` to first arrival inside `to`; `None` if unreachable.
    fn leg_length(&self, to: GsiId, from: VertexId, t: Time) -> Result<Option<u32>, SearchError>;

    /// Vertices for times `t ..= t + length`, starting at `from`.
    fn leg_path(&self, to: GsiId, from: VertexId, t: Time) -> Result<Vec<VertexId>, SearchError>;
}

impl LegPlanner for TisForest {
    const CHEAP_QUERIES: bool = true;

    fn goal_intervals(&self) -> &GoalIntervals {
        TisForest::goal_intervals(self)
    }

    fn leg_length(&self, to: GsiId, from: VertexId, t: Time) -> Result<Option<u32>, SearchError> {
        self.tree(to)
            .query_length(from, t)
            .map_err(|e| SearchError::Invariant(format!("leg query: {e}")))
    }

    fn leg_path(&self, to: GsiId, from: VertexId, t: Time) -> Result<Vec<VertexId>, SearchError> {
        self.tree(to)
            .extract_path(from, t)
            .map_err(|e| SearchError::Invariant(format!("leg path: {e}")))
    }
}

/// GSIs reachable as the next visit: every interval of every unvisited goal,
/// except that the final unvisited goal only offers its latest (unbounded) interval.
pub fn get_all_potential_gsi(gsis: &GoalIntervals, visited: u64) -> Vec<GsiId> {
    let unvisited: Vec<usize> = (0..gsis.goals.len()).filter(|&i| visited & (1 << i) == 0).collect();
    match unvisited.as_slice() {
        [] => Vec::new(),
        [only] => vec![gsis.latest(*only)],
        _ => unvisited
            .iter()
            .flat_map(|&goal| (0..gsis.intervals[goal].len()).map(move |slot| GsiId { goal, slot }))
            .collect(),
    }
}

#[derive(Debug, Clone)]
struct LowNode {
    visited: u64,
    vertex: VertexId,
    gsi: Option<GsiId>,
    g: Time,
    h: u32,
    back: Option<usize>,
    closed: bool,
}

/// Result of a successful single-agent search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowSolution {
    pub path: AgentPath,
    pub order: Vec<GsiId>,
    pub expanded: u64,
}

// (f, -g, state key, arena index) in a min-heap
type OpenEntry = Reverse<(u32, Reverse<Time>, u64, usize, usize, usize)>;

/// Minimum-cost path visiting every goal under `cons`, ending inside an
/// unbounded safe interval of its last goal. `Ok(None)` when infeasible.
pub fn low_level_search<P: LegPlanner>(
    planner: &P,
    table: &DistanceTable,
    task: &AgentTask,
    cons: &AgentConstraints,
    deadline: &Deadline,
) -> Result<Option<LowSolution>, SearchError> {
    let start_si = cons
        .safe_interval_containing(task.start, 0)
        .ok_or(SearchError::NoStartInterval { vertex: task.start })?;
    debug_assert!(start_si.contains(0));
    let gsis = planner.goal_intervals();
    let full = task.full_mask();
    let mut heuristic = MstHeuristic::new(table);

    let mut arena = vec![LowNode {
        visited: 0,
        vertex: task.start,
        gsi: None,
        g: 0,
        h: heuristic.get(0, task.start).unwrap_or(0),
        back: None,
        closed: false,
    }];
    let mut index: HashMap<(u64, GsiId), usize> = HashMap::new();
    let mut open: BinaryHeap<OpenEntry> = BinaryHeap::new();
    let push = |open: &mut BinaryHeap<OpenEntry>, node: &LowNode, idx: usize| {
        let gsi = node.gsi.unwrap_or(GsiId { goal: usize::MAX, slot: 0 });
        open.push(Reverse((node.g + node.h, Reverse(node.g), node.visited, gsi.goal, gsi.slot, idx)));
    };
    push(&mut open, &arena[0], 0);

    let mut expanded = 0u64;
    while let Some(Reverse((_, Reverse(g), _, _, _, idx))) = open.pop() {
        if arena[idx].closed || arena[idx].g != g {
            continue;
        }
        arena[idx].closed = true;
        expanded += 1;
        if expanded.is_multiple_of(256) && deadline.expired() {
            return Err(SearchError::Timeout);
        }
        let (visited, vertex) = (arena[idx].visited, arena[idx].vertex);
        if visited == full {
            let order = goal_visited_order(&arena, idx)?;
            let path = generate_path(planner, task.start, &order)?;
            if path.cost() != g {
                return Err(SearchError::Invariant(format!(
                    "generated path cost {} differs from search cost {g}",
                    path.cost()
                )));
            }
            return Ok(Some(LowSolution { path, order, expanded }));
        }
        for q in get_all_potential_gsi(gsis, visited) {
            let key = (visited | (1 << q.goal), q);
            let existing = index.get(&key).copied();
            if let Some(m) = existing {
                if arena[m].closed {
                    if P::CHEAP_QUERIES {
                        if let Some(len) = planner.leg_length(q, vertex, g)? {
                            if g + len < arena[m].g {
                                return Err(SearchError::Invariant(format!(
                                    "closed state (mask {:#b}, goal {}, slot {}) reached again with smaller g",
                                    key.0, q.goal, q.slot
                                )));
                            }
                        }
                    }
                    continue;
                }
            }
            let Some(len) = planner.leg_length(q, vertex, g)? else {
                continue;
            };
            let g2 = g + len;
            match existing {
                Some(m) => {
                    if g2 < arena[m].g {
                        arena[m].g = g2;
                        arena[m].back = Some(idx);
                        push(&mut open, &arena[m], m);
                    }
                }
                None => {
                    let qv = gsis.goals[q.goal];
                    let Some(h) = heuristic.get(key.0, qv) else {
                        continue;
                    };
                    let node = LowNode {
                        visited: key.0,
                        vertex: qv,
                        gsi: Some(q),
                        g: g2,
                        h,
                        back: Some(idx),
                        closed: false,
                    };
                    let m = arena.len();
                    push(&mut open, &node, m);
                    arena.push(node);
                    index.insert(key, m);
                }
            }
        }
    }
    Ok(None)
}

fn goal_visited_order(arena: &[LowNode], last: usize) -> Result<Vec<GsiId>, SearchError> {
    let mut order = Vec::new();
    let mut cur = last;
    loop {
        match (arena[cur].gsi, arena[cur].back) {
            (Some(gsi), Some(back)) => {
                order.push(gsi);
                cur = back;
            }
            (None, None) => break,
            _ => return Err(SearchError::Invariant("broken back-pointer chain".into())),
        }
        if order.len() > arena.len() {
            return Err(SearchError::Invariant("cyclic back-pointer chain".into()));
        }
    }
    order.reverse();
    Ok(order)
}

/// Concatenates the shortest legs along `order`, starting at `start` at time 0.
pub fn generate_path<P: LegPlanner>(planner: &P, start: VertexId, order: &[GsiId]) -> Result<AgentPath, SearchError> {
    let mut steps = vec![start];
    for &gsi in order {
        let (v, t) = (*steps.last().expect("non-empty"), (steps.len() - 1) as Time);
        let leg = planner.leg_path(gsi, v, t)?;
        if leg.first() != Some(&v) {
            return Err(SearchError::Invariant("leg does not start at the junction".into()));
        }
        steps.extend_from_slice(&leg[1..]);
    }
    Ok(AgentPath::new(steps))
}

/// Plans one agent with its TIS forest.
pub fn plan_with_forest(
    forest: &TisForest,
    table: &DistanceTable,
    task: &AgentTask,
    cons: &AgentConstraints,
    deadline: &Deadline,
) -> Result<Option<AgentPath>, SearchError> {
    Ok(low_level_search(forest, table, task, cons, deadline)?.map(|s| s.path))
}
