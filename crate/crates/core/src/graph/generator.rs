use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{is_reachable, MotionGraph, ProblemInstance};

/// Number of obstacle/endpoint regenerations before giving up.
pub const GENERATION_RETRY_BUDGET: u32 = 100;

fn obstacle_count(size: u32, ratio: f64) -> usize {
    let cells = (size as f64) * (size as f64);
    // ratio·size² is frequently an integer that f64 lands just below
    (ratio * cells + 1e-9).floor() as usize
}

/// Random grid-world instance: `size`×`size` grid with 1 m spacing,
/// ⌊`obstacle_ratio`·size²⌋ vertices removed, and distinct random starts and
/// destinations such that every agent can reach its destination. Fully
/// determined by `seed`.
pub fn generate_grid_instance(
    size: u32,
    n_agents: usize,
    obstacle_ratio: f64,
    separation: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    if size < 2 {
        return Err(Error::InvalidParameters(format!("grid size must be at least 2, got {size}")));
    }
    if n_agents == 0 {
        return Err(Error::InvalidParameters("at least one agent is required".into()));
    }
    if !(obstacle_ratio.is_finite() && (0.0..1.0).contains(&obstacle_ratio)) {
        return Err(Error::InvalidParameters(format!(
            "obstacle ratio must lie in [0, 1), got {obstacle_ratio}"
        )));
    }
    if !(separation.is_finite() && separation > 0.0) {
        return Err(Error::InvalidParameters(format!(
            "separation must be positive, got {separation}"
        )));
    }
    let cells = (size as usize) * (size as usize);
    let removed_count = obstacle_count(size, obstacle_ratio);
    if cells - removed_count < 2 * n_agents {
        return Err(Error::InvalidParameters(format!(
            "{} free vertices cannot host {} distinct starts and destinations",
            cells - removed_count,
            n_agents
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_RETRY_BUDGET {
        let removed: Vec<(u32, u32)> = sample(&mut rng, cells, removed_count)
            .into_iter()
            .map(|c| ((c % size as usize) as u32, (c / size as usize) as u32))
            .collect();
        let graph = MotionGraph::grid(size, &removed)?;

        let picks = sample(&mut rng, graph.len(), 2 * n_agents).into_vec();
        let starts: Vec<u32> = picks[..n_agents].iter().map(|&i| i as u32).collect();
        let destinations: Vec<u32> = picks[n_agents..].iter().map(|&i| i as u32).collect();

        if !rest_separated(&graph, &starts, separation) || !rest_separated(&graph, &destinations, separation) {
            continue;
        }
        let mut solvable = true;
        for (&s, &d) in starts.iter().zip(&destinations) {
            if !is_reachable(&graph, s, d)? {
                solvable = false;
                break;
            }
        }
        if solvable {
            return ProblemInstance::shared(graph, starts, destinations, separation, seed);
        }
    }
    Err(Error::GenerationFailed {
        budget: GENERATION_RETRY_BUDGET,
    })
}

fn rest_separated(graph: &MotionGraph, waypoints: &[u32], separation: f64) -> bool {
    waypoints.iter().enumerate().all(|(i, &a)| {
        waypoints[..i]
            .iter()
            .all(|&b| graph.position(a).distance(graph.position(b)) > separation)
    })
}
