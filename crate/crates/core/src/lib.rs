//! Optimal multi-goal multi-agent pathfinding.
//!
//! Agents on a 4-connected grid must each visit all of their goals at least
//! once, in any order, without vertex or edge collisions; the objective is the
//! sum of completion times. [`cbs::mgcbs_solve`] searches goal *safe interval*
//! visiting orders under a constraint tree and answers leg queries from
//! per-agent [`tis::TisForest`]s. The [`baselines`] module holds the
//! competitors and exhaustive referees, and [`harness`] the instance
//! generation, validation, benchmarking and plotting used by the CLI.

pub mod algorithm;
pub mod baselines;
pub mod cbs;
pub mod constraints;
pub mod error;
pub mod graph;
pub mod harness;
pub mod low;
pub mod maps;
pub mod solution;
pub mod tis;

pub use algorithm::{Algorithm, RunReport};
pub use constraints::{Constraint, ConstraintSet, Time, TimeInterval, UNBOUNDED};
pub use error::{ContractError, InstanceError, MapError, SearchError};
pub use graph::{parse_map, AgentTask, Graph, Instance, VertexId};
pub use solution::{AgentPath, Deadline, Outcome, Solution};
