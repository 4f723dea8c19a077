//! Space-time A* over `(vertex, time)` under one agent's constraints.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use crate::constraints::{AgentConstraints, ConstraintSet, Time, TimeInterval};
use crate::error::SearchError;
use crate::graph::{AgentId, Graph, VertexId};
use crate::solution::Deadline;

/// Latest time worth searching for a leg that starts at `t0` and must land in
/// `window`: past the last constraint nothing binds, so any remaining leg is a
/// plain shortest path of fewer than `|V|` steps.
pub fn leg_horizon(graph: &Graph, cons: &AgentConstraints, t0: Time, window: TimeInterval) -> Time {
    let free_from = cons.max_time().map_or(0, |m| m + 1);
    let horizon = free_from
        .max(t0)
        .max(window.lo)
        .saturating_add(graph.vertex_count() as Time);
    horizon.min(window.hi)
}

/// Earliest first arrival at `target` within `window`, departing `from` at `t0`.
///
/// `dist_to_target` holds unconstrained distances to `target` and drives the
/// heuristic. Returns the vertex sequence for times `t0 ..= arrival`.
#[allow(clippy::too_many_arguments)]
pub fn spacetime_search(
    graph: &Graph,
    cons: &AgentConstraints,
    from: VertexId,
    t0: Time,
    target: VertexId,
    window: TimeInterval,
    dist_to_target: &[Option<u32>],
    deadline: &Deadline,
) -> Result<Option<Vec<VertexId>>, SearchError> {
    if cons.vertex_blocked(from, t0) {
        return Ok(None);
    }
    let horizon = leg_horizon(graph, cons, t0, window);
    let h = |v: VertexId, t: Time| -> Option<Time> {
        let d = dist_to_target[v]?;
        Some(d.max(window.lo.saturating_sub(t)))
    };
    let Some(h0) = h(from, t0) else {
        return Ok(None);
    };
    let mut parent: HashMap<(VertexId, Time), Option<VertexId>> = HashMap::new();
    let mut open = BinaryHeap::new();
    parent.insert((from, t0), None);
    open.push(Reverse((t0 + h0, Reverse(t0), from)));
    let mut pops = 0u32;
    while let Some(Reverse((_, Reverse(t), v))) = open.pop() {
        pops = pops.wrapping_add(1);
        if pops.is_multiple_of(1024) && deadline.expired() {
            return Err(SearchError::Timeout);
        }
        if v == target && window.contains(t) {
            let mut steps = vec![v];
            let (mut cur, mut ct) = (v, t);
            while let Some(Some(prev)) = parent.get(&(cur, ct)) {
                cur = *prev;
                ct -= 1;
                steps.push(cur);
            }
            steps.reverse();
            return Ok(Some(steps));
        }
        if t >= horizon {
            continue;
        }
        for &w in graph.neighbors(v).iter().chain(std::iter::once(&v)) {
            if !cons.move_allowed(t, v, w) {
                continue;
            }
            if let Entry::Vacant(slot) = parent.entry((w, t + 1)) {
                let Some(hw) = h(w, t + 1) else { continue };
                slot.insert(Some(v));
                open.push(Reverse((t + 1 + hw, Reverse(t + 1), w)));
            }
        }
    }
    Ok(None)
}

/// Minimum-arrival path from `(t0, from)` to the first arrival at `to`.
pub fn spacetime_astar(
    graph: &Graph,
    agent: AgentId,
    cons: &ConstraintSet,
    from: VertexId,
    t0: Time,
    to: VertexId,
) -> Option<Vec<VertexId>> {
    let dist = graph.bfs_distances(to);
    spacetime_search(
        graph,
        cons.for_agent(agent),
        from,
        t0,
        to,
        TimeInterval::from(0),
        &dist,
        &Deadline::never(),
    )
    .expect("no deadline")
}
