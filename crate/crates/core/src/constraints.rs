//! Vertex/edge constraints, time intervals and safe intervals.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{ContractError, SearchError};
use crate::graph::{AgentId, Graph, VertexId};

pub type Time = u32;

/// Upper bound of an interval that never ends. Compares greater than every finite step.
pub const UNBOUNDED: Time = Time::MAX;

/// Inclusive time interval `[lo, hi]`; `hi == UNBOUNDED` means `[lo, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TimeInterval {
    pub lo: Time,
    pub hi: Time,
}

impl TimeInterval {
    pub fn new(lo: Time, hi: Time) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        TimeInterval { lo, hi }
    }

    pub fn from(lo: Time) -> Self {
        TimeInterval { lo, hi: UNBOUNDED }
    }

    pub fn is_unbounded(&self) -> bool {
        self.hi == UNBOUNDED
    }

    pub fn contains(&self, t: Time) -> bool {
        self.lo <= t && t <= self.hi
    }

    /// True when `other` lies entirely inside `self`.
    pub fn covers(&self, other: &TimeInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &TimeInterval) -> Option<TimeInterval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(TimeInterval { lo, hi })
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unbounded() {
            write!(f, "[{},inf)", self.lo)
        } else {
            write!(f, "[{},{}]", self.lo, self.hi)
        }
    }
}

/// Decrements an upper bound, keeping `UNBOUNDED` fixed.
pub(crate) fn dec_bound(hi: Time) -> Time {
    if hi == UNBOUNDED {
        UNBOUNDED
    } else {
        hi - 1
    }
}

/// A time interval at a vertex. Maximal safe instances are safe intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TisState {
    pub interval: TimeInterval,
    pub vertex: VertexId,
}

pub type SafeInterval = TisState;

/// Splits `range` into the maximal sub-intervals avoiding every time in `forbidden`.
///
/// `forbidden` must be sorted ascending; duplicates are tolerated.
pub(crate) fn subtract_times(range: TimeInterval, forbidden: impl IntoIterator<Item = Time>) -> Vec<TimeInterval> {
    let mut out = Vec::new();
    let mut lo = range.lo;
    for t in forbidden {
        if t < lo {
            continue;
        }
        if t > range.hi {
            break;
        }
        if t > lo {
            out.push(TimeInterval { lo, hi: t - 1 });
        }
        if t == UNBOUNDED {
            return out;
        }
        lo = t + 1;
    }
    if lo <= range.hi {
        out.push(TimeInterval { lo, hi: range.hi });
    }
    out
}

/// Merges two ascending time lists.
pub(crate) fn merge_sorted<'a>(a: &'a [Time], b: &'a [Time]) -> impl Iterator<Item = Time> + 'a {
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || match (a.get(i), b.get(j)) {
        (Some(&x), Some(&y)) if x <= y => {
            i += 1;
            Some(x)
        }
        (_, Some(&y)) => {
            j += 1;
            Some(y)
        }
        (Some(&x), None) => {
            i += 1;
            Some(x)
        }
        (None, None) => None,
    })
}

/// A single forbiddance for one agent.
///
/// Edge constraints are directed: `Edge { from, to, time }` forbids departing `from`
/// at `time` and arriving at `to` at `time + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Constraint {
    Vertex {
        agent: AgentId,
        time: Time,
        at: VertexId,
    },
    Edge {
        agent: AgentId,
        time: Time,
        from: VertexId,
        to: VertexId,
    },
}

impl Constraint {
    pub fn agent(&self) -> AgentId {
        match *self {
            Constraint::Vertex { agent, .. } | Constraint::Edge { agent, .. } => agent,
        }
    }

    pub fn time(&self) -> Time {
        match *self {
            Constraint::Vertex { time, .. } | Constraint::Edge { time, .. } => time,
        }
    }

    /// Checks the edge-kind invariants against a graph.
    pub fn is_well_formed(&self, graph: &Graph) -> bool {
        match *self {
            Constraint::Vertex { at, .. } => at < graph.vertex_count(),
            Constraint::Edge { from, to, .. } => {
                from != to && from < graph.vertex_count() && graph.are_adjacent(from, to)
            }
        }
    }
}

/// Constraints of one agent, indexed for the queries the searches issue.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgentConstraints {
    vertex: HashMap<VertexId, Vec<Time>>,
    edge: HashMap<(VertexId, VertexId), Vec<Time>>,
    max_time: Option<Time>,
    len: usize,
}

fn insert_sorted(times: &mut Vec<Time>, t: Time) -> bool {
    match times.binary_search(&t) {
        Ok(_) => false,
        Err(pos) => {
            times.insert(pos, t);
            true
        }
    }
}

impl AgentConstraints {
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Largest constrained time step, if any. Beyond it nothing binds.
    pub fn max_time(&self) -> Option<Time> {
        self.max_time
    }

    /// Sorted times at which `v` may not be occupied.
    pub fn vertex_times(&self, v: VertexId) -> &[Time] {
        self.vertex.get(&v).map_or(&[], Vec::as_slice)
    }

    /// Sorted departure times at which `from -> to` may not be traversed.
    pub fn edge_times(&self, from: VertexId, to: VertexId) -> &[Time] {
        self.edge.get(&(from, to)).map_or(&[], Vec::as_slice)
    }

    pub fn vertex_blocked(&self, v: VertexId, t: Time) -> bool {
        self.vertex_times(v).binary_search(&t).is_ok()
    }

    pub fn edge_blocked(&self, from: VertexId, to: VertexId, t: Time) -> bool {
        self.edge_times(from, to).binary_search(&t).is_ok()
    }

    /// True when `v` carries no vertex constraint at any time `>= t`.
    pub fn stay_safe_from(&self, v: VertexId, t: Time) -> bool {
        self.vertex_times(v).last().is_none_or(|&last| last < t)
    }

    /// Move (or wait, when `from == to`) departing at `t`; adjacency is not checked.
    pub fn move_allowed(&self, t: Time, from: VertexId, to: VertexId) -> bool {
        if t == UNBOUNDED || self.vertex_blocked(to, t + 1) {
            return false;
        }
        from == to || !self.edge_blocked(from, to, t)
    }

    fn insert(&mut self, c: &Constraint) -> bool {
        let added = match *c {
            Constraint::Vertex { time, at, .. } => insert_sorted(self.vertex.entry(at).or_default(), time),
            Constraint::Edge { time, from, to, .. } => {
                insert_sorted(self.edge.entry((from, to)).or_default(), time)
            }
        };
        if added {
            self.len += 1;
            self.max_time = Some(self.max_time.map_or(c.time(), |m| m.max(c.time())));
        }
        added
    }

    fn contains(&self, c: &Constraint) -> bool {
        match *c {
            Constraint::Vertex { time, at, .. } => self.vertex_blocked(at, time),
            Constraint::Edge { time, from, to, .. } => self.edge_blocked(from, to, time),
        }
    }

    /// Maximal safe intervals at `v`, ascending; the last one is always unbounded.
    pub fn safe_intervals(&self, v: VertexId) -> Vec<TimeInterval> {
        subtract_times(TimeInterval::from(0), self.vertex_times(v).iter().copied())
    }

    /// The safe interval at `v` containing `t`, if `(t, v)` is safe.
    pub fn safe_interval_containing(&self, v: VertexId, t: Time) -> Option<TimeInterval> {
        let times = self.vertex_times(v);
        match times.binary_search(&t) {
            Ok(_) => None,
            Err(pos) => {
                let lo = if pos == 0 { 0 } else { times[pos - 1] + 1 };
                let hi = times.get(pos).map_or(UNBOUNDED, |&next| next - 1);
                Some(TimeInterval { lo, hi })
            }
        }
    }

    fn all(&self, agent: AgentId) -> Vec<Constraint> {
        let mut out: Vec<Constraint> = self
            .vertex
            .iter()
            .flat_map(|(&at, ts)| ts.iter().map(move |&time| Constraint::Vertex { agent, time, at }))
            .chain(self.edge.iter().flat_map(|(&(from, to), ts)| {
                ts.iter().map(move |&time| Constraint::Edge { agent, time, from, to })
            }))
            .collect();
        out.sort();
        out
    }
}

/// Per-agent constraint collections.
///
/// Agent entries are reference counted, so a child constraint-tree node clones
/// the parent set cheaply and only copies the entry of the agent it constrains.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    agents: Vec<Arc<AgentConstraints>>,
}

static NO_CONSTRAINTS: std::sync::LazyLock<AgentConstraints> = std::sync::LazyLock::new(AgentConstraints::default);

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn for_agent(&self, agent: AgentId) -> &AgentConstraints {
        self.agents.get(agent).map_or(&NO_CONSTRAINTS, |c| c.as_ref())
    }

    pub fn shared_for_agent(&self, agent: AgentId) -> Option<&Arc<AgentConstraints>> {
        self.agents.get(agent)
    }

    pub fn len(&self) -> usize {
        self.agents.iter().map(|a| a.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.for_agent(c.agent()).contains(c)
    }

    /// Adds `c`; returns false if it was already present.
    pub fn insert(&mut self, c: Constraint) -> bool {
        let agent = c.agent();
        if self.agents.len() <= agent {
            self.agents.resize_with(agent + 1, Default::default);
        }
        if self.contains(&c) {
            return false;
        }
        Arc::make_mut(&mut self.agents[agent]).insert(&c)
    }

    /// Copy of `self` with `c` added.
    pub fn with(&self, c: Constraint) -> ConstraintSet {
        let mut next = self.clone();
        next.insert(c);
        next
    }

    /// All constraints in a canonical order.
    pub fn iter_sorted(&self) -> Vec<Constraint> {
        self.agents.iter().enumerate().flat_map(|(a, c)| c.all(a)).collect()
    }

    /// One JSON object per line, canonical order.
    pub fn to_json_lines(&self) -> String {
        self.iter_sorted()
            .iter()
            .map(|c| serde_json::to_string(c).expect("constraint serialization") + "\n")
            .collect()
    }
}

impl FromIterator<Constraint> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = Constraint>>(iter: I) -> Self {
        let mut set = ConstraintSet::new();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

pub fn compute_safe_intervals(agent: AgentId, vertex: VertexId, cons: &ConstraintSet) -> Vec<SafeInterval> {
    cons.for_agent(agent)
        .safe_intervals(vertex)
        .into_iter()
        .map(|interval| SafeInterval { interval, vertex })
        .collect()
}

/// Whether the move `from -> to` departing at `t` respects the agent's constraints.
pub fn is_move_safe(
    graph: &Graph,
    agent: AgentId,
    t: Time,
    from: VertexId,
    to: VertexId,
    cons: &ConstraintSet,
) -> Result<bool, ContractError> {
    if from != to && !graph.are_adjacent(from, to) {
        return Err(ContractError::NotAdjacent { from, to });
    }
    Ok(cons.for_agent(agent).move_allowed(t, from, to))
}

pub fn get_earliest_si(agent: AgentId, vertex: VertexId, cons: &ConstraintSet) -> Result<SafeInterval, SearchError> {
    cons.for_agent(agent)
        .safe_interval_containing(vertex, 0)
        .map(|interval| SafeInterval { interval, vertex })
        .ok_or(SearchError::NoStartInterval { vertex })
}
