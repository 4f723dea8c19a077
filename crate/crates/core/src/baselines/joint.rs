//! Exhaustive joint-state search: the referee for tiny instances.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::graph::{Graph, Instance, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("joint state space of {size} exceeds the bound {bound}")]
pub struct JointSpaceTooLarge {
    pub size: u128,
    pub bound: u128,
}

/// Default cap on `|V|^k * 2^(total goals) * 2^k`.
pub const DEFAULT_JOINT_BOUND: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct JointState {
    pos: Vec<VertexId>,
    visited: Vec<u64>,
    done: u32,
}

/// Exact optimal SOC by Dijkstra over joint configurations.
///
/// Every not-yet-finished agent pays one per step. An agent that has visited
/// all its goals and stands on one of them may finish; it then stays in place
/// forever and keeps blocking its vertex. `Ok(None)` means no solution exists.
pub fn joint_bfs_oracle(graph: &Graph, instance: &Instance) -> Result<Option<u64>, JointSpaceTooLarge> {
    joint_bfs_oracle_bounded(graph, instance, DEFAULT_JOINT_BOUND)
}

pub fn joint_bfs_oracle_bounded(
    graph: &Graph,
    instance: &Instance,
    bound: u128,
) -> Result<Option<u64>, JointSpaceTooLarge> {
    let k = instance.agent_count();
    let total_goals: u32 = instance.agents.iter().map(|a| a.goals.len() as u32).sum();
    let size = (graph.vertex_count() as u128)
        .checked_pow(k as u32)
        .and_then(|s| s.checked_mul(1u128.checked_shl(total_goals + k as u32)?))
        .unwrap_or(u128::MAX);
    if size > bound || k > 16 {
        return Err(JointSpaceTooLarge { size, bound });
    }
    let agents = &instance.agents;
    let bit = |a: usize, v: VertexId| agents[a].goal_index(v).map_or(0u64, |i| 1 << i);
    let all_done = (1u32 << k) - 1;

    let start = JointState {
        pos: agents.iter().map(|a| a.start).collect(),
        visited: agents.iter().enumerate().map(|(i, a)| bit(i, a.start)).collect(),
        done: 0,
    };
    let mut dist: HashMap<JointState, u64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(start.clone(), 0);
    heap.push(Reverse((0u64, start)));

    while let Some(Reverse((d, s))) = heap.pop() {
        if dist.get(&s).is_some_and(|&best| best < d) {
            continue;
        }
        if s.done == all_done {
            return Ok(Some(d));
        }
        let mut relax = |next: JointState, cost: u64| {
            let nd = d + cost;
            if dist.get(&next).is_none_or(|&old| nd < old) {
                dist.insert(next.clone(), nd);
                heap.push(Reverse((nd, next)));
            }
        };
        // finishing is free
        for a in 0..k {
            if s.done & (1 << a) == 0
                && s.visited[a] == agents[a].full_mask()
                && agents[a].goal_index(s.pos[a]).is_some()
            {
                let mut next = s.clone();
                next.done |= 1 << a;
                relax(next, 0);
            }
        }
        // one synchronous step for all active agents
        let active: Vec<usize> = (0..k).filter(|&a| s.done & (1 << a) == 0).collect();
        let step_cost = active.len() as u64;
        let options: Vec<Vec<VertexId>> = active
            .iter()
            .map(|&a| {
                let v = s.pos[a];
                graph.neighbors(v).iter().copied().chain(std::iter::once(v)).collect()
            })
            .collect();
        let mut choice = vec![0usize; active.len()];
        'outer: loop {
            let mut pos = s.pos.clone();
            for (slot, &a) in active.iter().enumerate() {
                pos[a] = options[slot][choice[slot]];
            }
            if legal_step(&s.pos, &pos) {
                let visited = s
                    .visited
                    .iter()
                    .enumerate()
                    .map(|(a, &m)| m | bit(a, pos[a]))
                    .collect();
                relax(
                    JointState {
                        pos,
                        visited,
                        done: s.done,
                    },
                    step_cost,
                );
            }
            for slot in 0..choice.len() {
                choice[slot] += 1;
                if choice[slot] < options[slot].len() {
                    continue 'outer;
                }
                choice[slot] = 0;
            }
            break;
        }
    }
    Ok(None)
}

fn legal_step(from: &[VertexId], to: &[VertexId]) -> bool {
    for i in 0..to.len() {
        for j in i + 1..to.len() {
            if to[i] == to[j] || (to[i] == from[j] && to[j] == from[i] && from[i] != to[i]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_map, AgentTask};

    #[test]
    fn single_adjacent_goal() {
        let g = parse_map("type octile\nheight 1\nwidth 2\nmap\n..\n").unwrap();
        let inst = Instance::new("m", vec![AgentTask { start: 0, goals: vec![1] }], &g).unwrap();
        assert_eq!(joint_bfs_oracle(&g, &inst).unwrap(), Some(1));
    }

    #[test]
    fn square_swap_costs_four() {
        let g = parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n..\n").unwrap();
        let inst = Instance::new(
            "m",
            vec![
                AgentTask { start: 0, goals: vec![3] },
                AgentTask { start: 3, goals: vec![0] },
            ],
            &g,
        )
        .unwrap();
        assert_eq!(joint_bfs_oracle(&g, &inst).unwrap(), Some(4));
    }

    #[test]
    fn corridor_swap_is_infeasible() {
        let g = parse_map("type octile\nheight 1\nwidth 3\nmap\n...\n").unwrap();
        let inst = Instance::new(
            "m",
            vec![
                AgentTask { start: 0, goals: vec![2] },
                AgentTask { start: 2, goals: vec![0] },
            ],
            &g,
        )
        .unwrap();
        assert_eq!(joint_bfs_oracle(&g, &inst).unwrap(), None);
    }

    #[test]
    fn refuses_large_spaces() {
        let g = parse_map(&format!("type octile\nheight 10\nwidth 10\nmap\n{}", "..........\n".repeat(10))).unwrap();
        let agents = (0..4).map(|a| AgentTask { start: a, goals: vec![50 + a, 60 + a] }).collect();
        let inst = Instance::new("m", agents, &g).unwrap();
        assert!(joint_bfs_oracle(&g, &inst).is_err());
    }
}
