use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{AgentTask, Graph, Instance, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("map has {available} usable cells, need {needed}")]
    InsufficientCells { available: usize, needed: usize },
}

/// Samples `count` instances with `agents` agents of `goals` goals each.
///
/// Starts are pairwise distinct. Each agent's goals are distinct, exclude its
/// own start, and lie in the start's connected component. The same seed always
/// yields the same instances.
pub fn gen_instances(
    graph: &Graph,
    map_ref: &str,
    agents: usize,
    goals: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Instance>, GenError> {
    if agents > graph.vertex_count() {
        return Err(GenError::InsufficientCells {
            available: graph.vertex_count(),
            needed: agents,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices: Vec<VertexId> = (0..graph.vertex_count()).collect();
    let mut out = Vec::with_capacity(count);
    let mut components: Vec<Option<Vec<VertexId>>> = vec![None; graph.vertex_count()];
    for _ in 0..count {
        let starts: Vec<VertexId> = vertices.choose_multiple(&mut rng, agents).copied().collect();
        let mut tasks = Vec::with_capacity(agents);
        for &start in &starts {
            let reachable = components[start].get_or_insert_with(|| {
                let d = graph.bfs_distances(start);
                (0..graph.vertex_count()).filter(|&v| d[v].is_some()).collect()
            });
            let candidates: Vec<VertexId> = reachable.iter().copied().filter(|&v| v != start).collect();
            if candidates.len() < goals {
                return Err(GenError::InsufficientCells {
                    available: candidates.len(),
                    needed: goals,
                });
            }
            let picked = candidates.choose_multiple(&mut rng, goals).copied().collect();
            tasks.push(AgentTask { start, goals: picked });
        }
        out.push(Instance::new(map_ref, tasks, graph).expect("sampled instances satisfy the invariants"));
    }
    Ok(out)
}
