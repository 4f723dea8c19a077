//! MGCBS with the forest replaced by one space-time A* per leg query.

use std::time::Duration;

use crate::baselines::spacetime::spacetime_search;
use crate::cbs::{cbs_search, LowLevel};
use crate::constraints::{AgentConstraints, Time};
use crate::error::SearchError;
use crate::graph::{AgentId, Graph, Instance, VertexId};
use crate::low::{low_level_search, DistanceTable, LegPlanner};
use crate::solution::{AgentPath, Deadline, Outcome, SearchStats};
use crate::tis::{GoalIntervals, GsiId};

/// Leg oracle answering every query with a fresh space-time search.
pub struct AstarLegs<'a> {
    graph: &'a Graph,
    cons: &'a AgentConstraints,
    table: &'a DistanceTable,
    gsis: GoalIntervals,
    deadline: Deadline,
}

impl<'a> AstarLegs<'a> {
    pub fn new(
        graph: &'a Graph,
        task: &crate::graph::AgentTask,
        cons: &'a AgentConstraints,
        table: &'a DistanceTable,
        deadline: Deadline,
    ) -> Self {
        AstarLegs {
            graph,
            cons,
            table,
            gsis: GoalIntervals::new(task, cons),
            deadline,
        }
    }

    fn search(&self, to: GsiId, from: VertexId, t: Time) -> Result<Option<Vec<VertexId>>, SearchError> {
        let gsi = self.gsis.gsi(to);
        spacetime_search(
            self.graph,
            self.cons,
            from,
            t,
            gsi.vertex,
            gsi.interval,
            self.table.to_goal(to.goal),
            &self.deadline,
        )
    }
}

impl LegPlanner for AstarLegs<'_> {
    fn goal_intervals(&self) -> &GoalIntervals {
        &self.gsis
    }

    fn leg_length(&self, to: GsiId, from: VertexId, t: Time) -> Result<Option<u32>, SearchError> {
        Ok(self.search(to, from, t)?.map(|p| (p.len() - 1) as u32))
    }

    fn leg_path(&self, to: GsiId, from: VertexId, t: Time) -> Result<Vec<VertexId>, SearchError> {
        self.search(to, from, t)?
            .ok_or_else(|| SearchError::Invariant("leg unreachable during path generation".into()))
    }
}

pub struct NoForestLow<'a> {
    graph: &'a Graph,
    instance: &'a Instance,
    tables: Vec<DistanceTable>,
}

impl<'a> NoForestLow<'a> {
    pub fn new(graph: &'a Graph, instance: &'a Instance) -> Result<Self, SearchError> {
        let tables = instance
            .agents
            .iter()
            .enumerate()
            .map(|(a, task)| DistanceTable::build(graph, a, task))
            .collect::<Result<_, _>>()?;
        Ok(NoForestLow { graph, instance, tables })
    }
}

impl LowLevel for NoForestLow<'_> {
    type AgentData = ();

    fn prepare(&self, _agent: AgentId, _cons: &AgentConstraints) {}

    fn plan(
        &self,
        agent: AgentId,
        _data: &(),
        cons: &AgentConstraints,
        deadline: &Deadline,
    ) -> Result<Option<AgentPath>, SearchError> {
        let task = &self.instance.agents[agent];
        let legs = AstarLegs::new(self.graph, task, cons, &self.tables[agent], *deadline);
        Ok(low_level_search(&legs, &self.tables[agent], task, cons, deadline)?.map(|s| s.path))
    }
}

pub fn mgcbs_noforest_solve(
    graph: &Graph,
    instance: &Instance,
    budget: Duration,
) -> Result<(Outcome, SearchStats), SearchError> {
    let deadline = Deadline::after(budget);
    let low = match NoForestLow::new(graph, instance) {
        Ok(low) => low,
        Err(SearchError::InfeasibleTask { .. }) => return Ok((Outcome::Infeasible, SearchStats::default())),
        Err(e) => return Err(e),
    };
    cbs_search(&low, instance.agent_count(), &deadline)
}
