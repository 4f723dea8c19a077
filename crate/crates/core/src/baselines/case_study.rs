//! A small instance on which goal-vertex-order search is provably suboptimal.
//!
//! Two agents share a one-cell-wide corridor with a single passing bay. The
//! cheapest joint plan has agent 0 reach one of its goals later than it could,
//! which an earliest-arrival leg planner never considers.

use crate::graph::{parse_map, AgentTask, Graph, Instance};

pub const CASE_STUDY_MAP: &str = "type octile\nheight 2\nwidth 7\nmap\n@.@....\n....@..\n";

pub fn case_study_builder() -> (Graph, Instance) {
    let graph = parse_map(CASE_STUDY_MAP).expect("case study map");
    let v = |r: usize, c: usize| graph.vertex_at(r, c).expect("passable");
    let agents = vec![
        AgentTask {
            start: v(1, 2),
            goals: vec![v(0, 3), v(0, 1), v(1, 5)],
        },
        AgentTask {
            start: v(1, 1),
            goals: vec![v(0, 1), v(0, 4), v(0, 5)],
        },
    ];
    let instance = Instance::new("case-study", agents, &graph).expect("case study instance");
    (graph, instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{hcbs_solve, joint_bfs_oracle};
    use crate::cbs::mgcbs_solve;
    use std::time::Duration;

    #[test]
    fn gap_is_certified() {
        let (g, inst) = case_study_builder();
        let budget = Duration::from_secs(30);
        let h = hcbs_solve(&g, &inst, budget).unwrap().0.soc().unwrap();
        let m = mgcbs_solve(&g, &inst, budget).unwrap().0.soc().unwrap();
        let opt = joint_bfs_oracle(&g, &inst).unwrap().unwrap();
        assert_eq!(m, opt);
        assert!(h > m, "hcbs {h} vs mgcbs {m}");
    }
}
