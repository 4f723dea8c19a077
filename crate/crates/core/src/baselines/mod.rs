//! Competitors and referees: HCBS, forest-free MGCBS, CBS with a coupled
//! low level, and an exhaustive joint-state oracle.

pub mod case_study;
pub mod coupled;
pub mod hcbs;
pub mod joint;
pub mod noforest;
pub mod spacetime;

pub use case_study::case_study_builder;
pub use coupled::{cbs_coupled_solve, coupled_plan, SpaceTimeState};
pub use hcbs::{hcbs_plan, hcbs_solve};
pub use joint::{joint_bfs_oracle, joint_bfs_oracle_bounded, JointSpaceTooLarge};
pub use noforest::{mgcbs_noforest_solve, AstarLegs};
pub use spacetime::{spacetime_astar, spacetime_search};
