#![allow(dead_code)]

use std::collections::HashSet;

use mgcbs::constraints::AgentConstraints;
use mgcbs::{Constraint, ConstraintSet, Graph, Time, TimeInterval, VertexId, UNBOUNDED};
use rand::Rng;

pub fn random_grid(rng: &mut impl Rng, max_h: usize, max_w: usize, blocked: f64) -> Graph {
    loop {
        let h = rng.gen_range(1..=max_h);
        let w = rng.gen_range(2..=max_w);
        let rows: Vec<Vec<bool>> = (0..h).map(|_| (0..w).map(|_| !rng.gen_bool(blocked)).collect()).collect();
        let g = Graph::from_passability(&rows);
        if g.vertex_count() >= 2 {
            return g;
        }
    }
}

/// Random vertex and edge constraints for one agent, never touching `(keep_free, 0)`.
pub fn random_constraints(
    rng: &mut impl Rng,
    graph: &Graph,
    agent: usize,
    count: usize,
    max_t: Time,
    keep_free: Option<VertexId>,
) -> Vec<Constraint> {
    let mut out = Vec::new();
    while out.len() < count {
        let v = rng.gen_range(0..graph.vertex_count());
        let time = rng.gen_range(0..=max_t);
        if rng.gen_bool(0.6) {
            if keep_free == Some(v) && time == 0 {
                continue;
            }
            out.push(Constraint::Vertex { agent, time, at: v });
        } else {
            let ns = graph.neighbors(v);
            if ns.is_empty() {
                continue;
            }
            let to = ns[rng.gen_range(0..ns.len())];
            out.push(Constraint::Edge { agent, time, from: v, to });
        }
    }
    out
}

pub fn agent_constraints(list: &[Constraint], agent: usize) -> AgentConstraints {
    let set: ConstraintSet = list.iter().copied().collect();
    set.for_agent(agent).clone()
}

/// Plain set-based view of one agent's constraints.
pub struct RawCons {
    vertex: HashSet<(VertexId, Time)>,
    edge: HashSet<(VertexId, VertexId, Time)>,
    pub max_time: Time,
}

impl RawCons {
    pub fn new(list: &[Constraint], agent: usize) -> RawCons {
        let mut raw = RawCons {
            vertex: HashSet::new(),
            edge: HashSet::new(),
            max_time: 0,
        };
        for c in list {
            match *c {
                Constraint::Vertex { agent: a, time, at } if a == agent => {
                    raw.vertex.insert((at, time));
                    raw.max_time = raw.max_time.max(time);
                }
                Constraint::Edge { agent: a, time, from, to } if a == agent => {
                    raw.edge.insert((from, to, time));
                    raw.max_time = raw.max_time.max(time);
                }
                _ => {}
            }
        }
        raw
    }

    pub fn safe(&self, v: VertexId, t: Time) -> bool {
        !self.vertex.contains(&(v, t))
    }

    pub fn step_ok(&self, from: VertexId, to: VertexId, t: Time) -> bool {
        self.safe(to, t + 1) && (from == to || !self.edge.contains(&(from, to, t)))
    }

    pub fn free_after(&self, v: VertexId, t: Time) -> bool {
        !self.vertex.iter().any(|&(u, s)| u == v && s >= t)
    }
}

fn actions(graph: &Graph, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
    graph.neighbors(v).iter().copied().chain(std::iter::once(v))
}

/// `table[t][v]`: fewest steps from `(v, t)` to `goal` at a time in `seed`,
/// for every `t <= tmax`. Computed by backward induction over a time-expanded graph.
pub fn time_expanded_lengths(
    graph: &Graph,
    raw: &RawCons,
    goal: VertexId,
    seed: TimeInterval,
    tmax: Time,
) -> Vec<Vec<Option<u32>>> {
    let horizon = if seed.hi == UNBOUNDED {
        tmax.max(raw.max_time + 1).max(seed.lo) + graph.vertex_count() as Time + 2
    } else {
        seed.hi.max(tmax) + 1
    };
    let n = graph.vertex_count();
    let mut next: Vec<Option<u32>> = (0..n)
        .map(|v| (v == goal && seed.contains(horizon) && raw.safe(v, horizon)).then_some(0))
        .collect();
    let mut table = vec![Vec::new(); tmax as usize + 1];
    for t in (0..horizon).rev() {
        let cur: Vec<Option<u32>> = (0..n)
            .map(|v| {
                if !raw.safe(v, t) {
                    return None;
                }
                if v == goal && seed.contains(t) {
                    return Some(0);
                }
                actions(graph, v)
                    .filter(|&w| raw.step_ok(v, w, t))
                    .filter_map(|w| next[w])
                    .min()
                    .map(|d| d + 1)
            })
            .collect();
        if t <= tmax {
            table[t as usize] = cur.clone();
        }
        next = cur;
    }
    table
}

/// Earliest completion time of a single agent visiting all `goals` from
/// `start` under `raw`, by layered breadth-first search over `(vertex, visited)`.
pub fn multigoal_oracle(graph: &Graph, raw: &RawCons, start: VertexId, goals: &[VertexId]) -> Option<Time> {
    if !raw.safe(start, 0) {
        return None;
    }
    let full: u64 = (1u64 << goals.len()) - 1;
    let bit = |v: VertexId| goals.iter().position(|&g| g == v).map_or(0, |i| 1u64 << i);
    let horizon = raw.max_time + 2 + (graph.vertex_count() * (goals.len() + 1)) as Time;
    let mut layer: HashSet<(VertexId, u64)> = HashSet::from([(start, bit(start))]);
    for t in 0..=horizon {
        if layer
            .iter()
            .any(|&(v, m)| m == full && goals.contains(&v) && raw.free_after(v, t))
        {
            return Some(t);
        }
        let mut next = HashSet::new();
        for &(v, m) in &layer {
            for w in actions(graph, v) {
                if raw.step_ok(v, w, t) {
                    next.insert((w, m | bit(w)));
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        layer = next;
    }
    None
}

/// Checks a single-agent path against `raw` and the multi-goal task.
pub fn check_agent_path(
    graph: &Graph,
    raw: &RawCons,
    steps: &[VertexId],
    start: VertexId,
    goals: &[VertexId],
) -> Result<(), String> {
    if steps.first() != Some(&start) {
        return Err("wrong start".into());
    }
    if !raw.safe(start, 0) {
        return Err("start unsafe".into());
    }
    for (t, pair) in steps.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        if a != b && !graph.are_adjacent(a, b) {
            return Err(format!("jump at t={t}"));
        }
        if !raw.step_ok(a, b, t as Time) {
            return Err(format!("constraint violated at t={t}"));
        }
    }
    for g in goals {
        if !steps.contains(g) {
            return Err(format!("goal {g} missed"));
        }
    }
    let last = *steps.last().unwrap();
    if !goals.contains(&last) {
        return Err("does not end on a goal".into());
    }
    if !raw.free_after(last, (steps.len() - 1) as Time) {
        return Err("final stay is constrained".into());
    }
    Ok(())
}

/// One randomized tree build compared against [`time_expanded_lengths`] for
/// every safe `(v, t)` with `t <= tmax`. Returns the number of compared states.
pub fn tis_trial(rng: &mut impl Rng, tmax: Time) -> Result<usize, String> {
    use mgcbs::constraints::SafeInterval;
    use mgcbs::tis::TisTree;

    let graph = random_grid(rng, 10, 10, 0.25);
    let count = rng.gen_range(0..=12);
    let list = random_constraints(rng, &graph, 0, count, 20, None);
    let cons = agent_constraints(&list, 0);
    let raw = RawCons::new(&list, 0);
    let goal = rng.gen_range(0..graph.vertex_count());
    let intervals = cons.safe_intervals(goal);
    let seed = intervals[rng.gen_range(0..intervals.len())];
    let tree = TisTree::build(&graph, &cons, SafeInterval { interval: seed, vertex: goal });
    let table = time_expanded_lengths(&graph, &raw, goal, seed, tmax);
    let mut compared = 0;
    for t in 0..=tmax {
        for v in 0..graph.vertex_count() {
            let got = tree.query_length(v, t);
            if !raw.safe(v, t) {
                if got.is_ok() {
                    return Err(format!("unsafe ({v}, {t}) answered {got:?}"));
                }
                continue;
            }
            compared += 1;
            let want = table[t as usize][v];
            let got = got.map_err(|e| format!("safe ({v}, {t}) rejected: {e}"))?;
            if got != want {
                return Err(format!("({v}, {t}): tree {got:?}, oracle {want:?}, seed {seed} at {goal}, constraints {list:?}"));
            }
            if let Some(d) = got {
                let path = tree.extract_path(v, t).map_err(|e| e.to_string())?;
                if path.len() != d as usize + 1 || *path.last().unwrap() != goal || !seed.contains(t + d) {
                    return Err(format!("({v}, {t}): bad path {path:?} for length {d}"));
                }
                for (i, pair) in path.windows(2).enumerate() {
                    let ok = (pair[0] == pair[1] || graph.are_adjacent(pair[0], pair[1]))
                        && raw.step_ok(pair[0], pair[1], t + i as Time);
                    if !ok {
                        return Err(format!("({v}, {t}): illegal step {i} in {path:?}"));
                    }
                }
            }
        }
    }
    Ok(compared)
}

/// Outcome of one randomized single-agent comparison.
pub struct LowTrial {
    pub oracle: Option<Time>,
    pub forest: Option<Time>,
    pub astar: Option<Time>,
}

/// One randomized constrained multi-goal task solved by the low level with
/// both leg planners and by [`multigoal_oracle`]. Paths are checked.
pub fn low_trial(rng: &mut impl Rng) -> Result<LowTrial, String> {
    use mgcbs::baselines::AstarLegs;
    use mgcbs::low::{low_level_search, DistanceTable};
    use mgcbs::tis::TisForest;
    use mgcbs::{AgentTask, Deadline, SearchError};

    let graph = loop {
        let g = random_grid(rng, 5, 5, 0.2);
        if g.vertex_count() <= 25 && g.vertex_count() >= 3 {
            break g;
        }
    };
    let start = rng.gen_range(0..graph.vertex_count());
    let n = rng.gen_range(1..=3.min(graph.vertex_count()));
    let mut goals = Vec::new();
    while goals.len() < n {
        let g = rng.gen_range(0..graph.vertex_count());
        if !goals.contains(&g) {
            goals.push(g);
        }
    }
    let count = rng.gen_range(0..=8);
    let list = random_constraints(rng, &graph, 0, count, 12, Some(start));
    let cons = agent_constraints(&list, 0);
    let raw = RawCons::new(&list, 0);
    let task = AgentTask { start, goals: goals.clone() };
    let oracle = multigoal_oracle(&graph, &raw, start, &goals);

    let table = match DistanceTable::build(&graph, 0, &task) {
        Ok(t) => t,
        Err(SearchError::InfeasibleTask { .. }) => {
            return Ok(LowTrial {
                oracle,
                forest: None,
                astar: None,
            })
        }
        Err(e) => return Err(e.to_string()),
    };
    let check = |sol: Option<mgcbs::low::LowSolution>| -> Result<Option<Time>, String> {
        match sol {
            None => Ok(None),
            Some(s) => {
                check_agent_path(&graph, &raw, &s.path.steps, start, &goals)
                    .map_err(|e| format!("{e}: {:?} for {task:?} under {list:?}", s.path.steps))?;
                Ok(Some(s.path.cost()))
            }
        }
    };
    let forest = TisForest::build(&graph, 0, &task, &cons);
    let f = low_level_search(&forest, &table, &task, &cons, &Deadline::never()).map_err(|e| e.to_string())?;
    let legs = AstarLegs::new(&graph, &task, &cons, &table, Deadline::never());
    let a = low_level_search(&legs, &table, &task, &cons, &Deadline::never()).map_err(|e| e.to_string())?;
    let trial = LowTrial {
        oracle,
        forest: check(f)?,
        astar: check(a)?,
    };
    if trial.forest != trial.oracle || trial.astar != trial.oracle {
        return Err(format!(
            "forest {:?}, astar {:?}, oracle {:?} for {task:?} under {list:?}",
            trial.forest, trial.astar, trial.oracle
        ));
    }
    Ok(trial)
}

type Cells = Vec<[usize; 2]>;

fn solution_file(paths: Vec<Cells>) -> mgcbs::solution::SolutionFile {
    let cost = paths.iter().map(|p| p.len().saturating_sub(1) as u64).sum();
    mgcbs::solution::SolutionFile {
        cost,
        paths,
        algo: "hand".into(),
        elapsed_ms: 0,
    }
}

/// Hand-built invalid solutions, each with the violation class it must raise.
pub fn corrupted_solutions() -> Vec<(Graph, mgcbs::Instance, mgcbs::solution::SolutionFile, &'static str)> {
    use mgcbs::{parse_map, AgentTask, Instance};

    let g = parse_map("type octile\nheight 3\nwidth 4\nmap\n....\n...@\n....\n").unwrap();
    let v = |r, c| g.vertex_at(r, c).unwrap();
    let inst = Instance::new(
        "hand",
        vec![
            AgentTask { start: v(0, 0), goals: vec![v(0, 3)] },
            AgentTask { start: v(2, 0), goals: vec![v(2, 3)] },
        ],
        &g,
    )
    .unwrap();
    let a1: Cells = vec![[2, 0], [2, 1], [2, 2], [2, 3]];
    let two = |a0: Cells| solution_file(vec![a0, a1.clone()]);
    let valid = two(vec![[0, 0], [0, 1], [0, 2], [0, 3]]);

    let mut out = vec![
        (two(vec![[0, 0], [0, 2], [0, 3]]), "continuity"),
        (two(vec![[0, 0], [0, 1], [1, 2], [0, 3]]), "continuity"),
        (two(vec![[1, 0], [1, 1], [1, 2], [0, 2], [0, 3]]), "wrong-start"),
        (two(vec![[0, 0], [0, 1], [0, 2]]), "goal-not-visited"),
        (two(vec![[0, 0], [0, 1], [0, 2], [0, 3], [0, 2]]), "terminal-not-goal"),
        (two(vec![[0, 0], [0, 1], [0, 2], [0, 3], [1, 3], [0, 3]]), "impassable"),
        (two(vec![[0, 0], [0, 1], [0, 2], [0, 3], [0, 4]]), "impassable"),
        (
            solution_file(vec![
                vec![[0, 0], [1, 0], [1, 1], [0, 1], [0, 2], [0, 3]],
                vec![[2, 0], [2, 1], [1, 1], [1, 2], [2, 2], [2, 3]],
            ]),
            "vertex-conflict",
        ),
        (
            mgcbs::solution::SolutionFile {
                cost: valid.cost + 1,
                ..valid.clone()
            },
            "cost-mismatch",
        ),
        (solution_file(vec![valid.paths[0].clone()]), "agent-count"),
        (solution_file(vec![valid.paths[0].clone(), vec![]]), "empty-path"),
    ]
    .into_iter()
    .map(|(s, class)| (g.clone(), inst.clone(), s, class))
    .collect::<Vec<_>>();

    let line = parse_map("type octile\nheight 1\nwidth 2\nmap\n..\n").unwrap();
    let swap = Instance::new(
        "swap",
        vec![
            AgentTask { start: 0, goals: vec![1] },
            AgentTask { start: 1, goals: vec![0] },
        ],
        &line,
    )
    .unwrap();
    out.push((
        line,
        swap,
        solution_file(vec![vec![[0, 0], [0, 1]], vec![[0, 1], [0, 0]]]),
        "edge-conflict",
    ));
    out
}

/// The uncorrupted solution of the corruption fixtures.
pub fn valid_hand_solution() -> (Graph, mgcbs::Instance, mgcbs::solution::SolutionFile) {
    let (g, inst, _, _) = corrupted_solutions().swap_remove(0);
    let sol = solution_file(vec![vec![[0, 0], [0, 1], [0, 2], [0, 3]], vec![[2, 0], [2, 1], [2, 2], [2, 3]]]);
    (g, inst, sol)
}
