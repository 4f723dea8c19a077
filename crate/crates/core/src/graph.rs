//! Grid maps, the unit-edge graph built from them, and MG-MAPF instances.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{InstanceError, MapError};

pub type VertexId = usize;
pub type AgentId = usize;

/// Undirected 4-connected graph over the passable cells of a grid map.
///
/// Vertex ids are dense and assigned in row-major order of passable cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    height: usize,
    width: usize,
    cell_vertex: Vec<Option<VertexId>>,
    coords: Vec<(usize, usize)>,
    adjacency: Vec<Vec<VertexId>>,
}

fn is_passable_char(c: char) -> Option<bool> {
    match c {
        '.' | 'G' | 'S' => Some(true),
        '@' | 'O' | 'T' | 'W' => Some(false),
        _ => None,
    }
}

impl Graph {
    /// Builds a graph from a passability matrix (`true` = free cell).
    pub fn from_passability(rows: &[Vec<bool>]) -> Graph {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        let mut cell_vertex = vec![None; height * width];
        let mut coords = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            for (c, &free) in row.iter().enumerate() {
                if free {
                    cell_vertex[r * width + c] = Some(coords.len());
                    coords.push((r, c));
                }
            }
        }
        let mut adjacency = vec![Vec::new(); coords.len()];
        for (v, &(r, c)) in coords.iter().enumerate() {
            // up, left, right, down: keeps every list sorted by vertex id
            let candidates = [
                r.checked_sub(1).map(|r| (r, c)),
                c.checked_sub(1).map(|c| (r, c)),
                (c + 1 < width).then_some((r, c + 1)),
                (r + 1 < height).then_some((r + 1, c)),
            ];
            for (nr, nc) in candidates.into_iter().flatten() {
                if let Some(u) = cell_vertex[nr * width + nc] {
                    adjacency[v].push(u);
                }
            }
        }
        Graph {
            height,
            width,
            cell_vertex,
            coords,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn coord(&self, v: VertexId) -> (usize, usize) {
        self.coords[v]
    }

    /// Vertex at grid cell `(row, col)`, or `None` for blocked or out-of-range cells.
    pub fn vertex_at(&self, row: usize, col: usize) -> Option<VertexId> {
        if row >= self.height || col >= self.width {
            return None;
        }
        self.cell_vertex[row * self.width + col]
    }

    pub fn is_passable(&self, row: usize, col: usize) -> bool {
        self.vertex_at(row, col).is_some()
    }

    pub fn are_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn passability(&self) -> Vec<Vec<bool>> {
        (0..self.height)
            .map(|r| (0..self.width).map(|c| self.is_passable(r, c)).collect())
            .collect()
    }

    /// Unconstrained breadth-first distances from `source` to every vertex.
    pub fn bfs_distances(&self, source: VertexId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &u in &self.adjacency[v] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

/// Parses a grid map in the `type octile / height / width / map` text format.
pub fn parse_map(text: &str) -> Result<Graph, MapError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    let mut header = |key: &str| -> Result<(usize, String), MapError> {
        let (line, content) = lines.next().ok_or(MapError::Header {
            line: 0,
            msg: format!("missing `{key}` line"),
        })?;
        let mut parts = content.split_whitespace();
        match parts.next() {
            Some(k) if k == key => Ok((line, parts.collect::<Vec<_>>().join(" "))),
            _ => Err(MapError::Header {
                line,
                msg: format!("expected `{key}`, found `{content}`"),
            }),
        }
    };

    let (line, kind) = header("type")?;
    if kind != "octile" {
        return Err(MapError::Header {
            line,
            msg: format!("unsupported map type `{kind}`"),
        });
    }
    let parse_dim = |(line, value): (usize, String)| {
        value.parse::<usize>().map_err(|_| MapError::Header {
            line,
            msg: format!("invalid dimension `{value}`"),
        })
    };
    let height = parse_dim(header("height")?)?;
    let width = parse_dim(header("width")?)?;
    let (line, rest) = header("map")?;
    if !rest.is_empty() {
        return Err(MapError::Header {
            line,
            msg: "trailing content after `map`".into(),
        });
    }

    let mut rows = Vec::with_capacity(height);
    for (line, content) in lines.by_ref() {
        if rows.len() == height {
            if content.trim().is_empty() {
                continue;
            }
            return Err(MapError::RowCount {
                line,
                expected: height,
            });
        }
        let row = content
            .chars()
            .enumerate()
            .map(|(col, ch)| {
                is_passable_char(ch).ok_or(MapError::UnknownCell {
                    line,
                    col: col + 1,
                    ch,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != width {
            return Err(MapError::RowLength {
                line,
                expected: width,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    if rows.len() != height {
        return Err(MapError::RowCount {
            line: 4 + rows.len(),
            expected: height,
        });
    }
    Ok(Graph::from_passability(&rows))
}

/// Writes a passability matrix back to the map text format (`.` free, `@` blocked).
pub fn serialize_map(graph: &Graph) -> String {
    let mut out = format!(
        "type octile\nheight {}\nwidth {}\nmap\n",
        graph.height, graph.width
    );
    for r in 0..graph.height {
        for c in 0..graph.width {
            out.push(if graph.is_passable(r, c) { '.' } else { '@' });
        }
        out.push('\n');
    }
    out
}

/// One agent's start and goal set. Goal order is the canonical bitmask index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentTask {
    pub start: VertexId,
    pub goals: Vec<VertexId>,
}

impl AgentTask {
    pub fn goal_count(&self) -> usize {
        self.goals.len()
    }

    pub fn full_mask(&self) -> u64 {
        if self.goals.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.goals.len()) - 1
        }
    }

    pub fn goal_index(&self, v: VertexId) -> Option<usize> {
        self.goals.iter().position(|&g| g == v)
    }
}

/// A validated MG-MAPF instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub map_ref: String,
    pub agents: Vec<AgentTask>,
}

/// Bitmask bookkeeping caps an agent at 64 goals.
pub const MAX_GOALS: usize = 64;

impl Instance {
    /// Validates the agent list against the instance invariants.
    pub fn new(map_ref: impl Into<String>, agents: Vec<AgentTask>, graph: &Graph) -> Result<Instance, InstanceError> {
        if agents.is_empty() {
            return Err(InstanceError::NoAgents);
        }
        let mut starts = HashSet::new();
        for (agent, task) in agents.iter().enumerate() {
            if task.start >= graph.vertex_count() {
                return Err(InstanceError::StartNotPassable { agent });
            }
            if !starts.insert(task.start) {
                return Err(InstanceError::DuplicateStart { agent });
            }
            if task.goals.is_empty() {
                return Err(InstanceError::EmptyGoals { agent });
            }
            if task.goals.len() > MAX_GOALS {
                return Err(InstanceError::TooManyGoals { agent });
            }
            let mut seen = HashSet::new();
            for &g in &task.goals {
                if g >= graph.vertex_count() {
                    return Err(InstanceError::GoalNotPassable { agent });
                }
                if !seen.insert(g) {
                    return Err(InstanceError::DuplicateGoal { agent });
                }
            }
        }
        Ok(Instance {
            map_ref: map_ref.into(),
            agents,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }
}

/// On-disk instance representation with `[row, col]` cell coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub map: String,
    pub agents: Vec<AgentTaskFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentTaskFile {
    pub start: [usize; 2],
    pub goals: Vec<[usize; 2]>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance, graph: &Graph) -> InstanceFile {
        let cell = |v: VertexId| {
            let (r, c) = graph.coord(v);
            [r, c]
        };
        InstanceFile {
            map: instance.map_ref.clone(),
            agents: instance
                .agents
                .iter()
                .map(|a| AgentTaskFile {
                    start: cell(a.start),
                    goals: a.goals.iter().map(|&g| cell(g)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_instance(&self, graph: &Graph) -> Result<Instance, InstanceError> {
        let mut agents = Vec::with_capacity(self.agents.len());
        for (agent, a) in self.agents.iter().enumerate() {
            let start = graph
                .vertex_at(a.start[0], a.start[1])
                .ok_or(InstanceError::StartNotPassable { agent })?;
            let goals = a
                .goals
                .iter()
                .map(|g| graph.vertex_at(g[0], g[1]).ok_or(InstanceError::GoalNotPassable { agent }))
                .collect::<Result<Vec<_>, _>>()?;
            agents.push(AgentTask { start, goals });
        }
        Instance::new(self.map.clone(), agents, graph)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization") + "\n"
    }
}

/// Parses an instance file against an already-loaded graph.
pub fn load_instance(text: &str, graph: &Graph) -> Result<Instance, InstanceError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
    file.to_instance(graph)
}

/// Renders the grid with agent starts as digits, for debugging.
pub fn render_ascii(graph: &Graph, instance: Option<&Instance>) -> String {
    let mut out = String::new();
    for r in 0..graph.height() {
        for c in 0..graph.width() {
            let ch = match graph.vertex_at(r, c) {
                None => '@',
                Some(v) => instance
                    .and_then(|inst| inst.agents.iter().position(|a| a.start == v))
                    .map_or('.', |a| char::from_digit((a % 36) as u32, 36).unwrap_or('?')),
            };
            out.push(ch);
        }
        let _ = writeln!(out);
    }
    out
}
