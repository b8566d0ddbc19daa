use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ProblemInstance;
use crate::joint::JointState;
use crate::planner::PlannerConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    Uniform,
    /// Biased toward tubes around each agent's single-agent optimal path.
    Informed,
}

/// Draws joint states for tree extension. Tubes around the single-agent
/// paths are precomputed once per planner run.
#[derive(Clone, Debug)]
pub struct Sampler {
    mode: SamplingMode,
    goal_bias: f64,
    informed_bias: f64,
    goal: JointState,
    sizes: Vec<u32>,
    /// tubes[agent][k]: waypoints within the informed radius of the k-th
    /// waypoint of the agent's optimal path.
    tubes: Vec<Vec<Vec<u32>>>,
}

impl Sampler {
    /// Attempts per call before falling back to the destination state.
    pub const RETRIES: u32 = 100;

    pub fn new(
        instance: &ProblemInstance,
        config: &PlannerConfig,
        mode: SamplingMode,
        single_agent_paths: Option<&[Vec<u32>]>,
    ) -> Result<Self> {
        let n = instance.n_agents();
        let tubes = match mode {
            SamplingMode::Uniform => Vec::new(),
            SamplingMode::Informed => {
                let paths = single_agent_paths.ok_or_else(|| {
                    Error::InvalidParameters("informed sampling needs single-agent paths".into())
                })?;
                if paths.len() != n {
                    return Err(Error::ArityMismatch { expected: n, found: paths.len() });
                }
                paths
                    .iter()
                    .enumerate()
                    .map(|(i, path)| tubes_along(instance, i, path, config.informed_radius))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Sampler {
            mode,
            goal_bias: config.goal_bias,
            informed_bias: config.informed_bias,
            goal: JointState::destinations(instance),
            sizes: (0..n).map(|i| instance.graph(i).len() as u32).collect(),
            tubes,
        })
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    /// One uniform draw `u` picks the branch: `u < goal_bias` returns the
    /// destination, the next `informed_bias` of mass (informed mode only)
    /// samples the tubes, the rest is uniform over each agent's waypoints.
    pub fn sample<R: Rng + ?Sized>(&self, instance: &ProblemInstance, rng: &mut R) -> JointState {
        for _ in 0..Self::RETRIES {
            let u: f64 = rng.gen();
            if u < self.goal_bias {
                return self.goal.clone();
            }
            let informed = self.mode == SamplingMode::Informed && u < self.goal_bias + self.informed_bias;
            let state: JointState = if informed {
                self.tubes
                    .iter()
                    .map(|agent| {
                        let tube = &agent[rng.gen_range(0..agent.len())];
                        tube[rng.gen_range(0..tube.len())]
                    })
                    .collect()
            } else {
                self.sizes.iter().map(|&m| rng.gen_range(0..m)).collect()
            };
            if state.is_separated(instance) {
                return state;
            }
        }
        self.goal.clone()
    }
}

fn tubes_along(instance: &ProblemInstance, agent: usize, path: &[u32], radius: f64) -> Result<Vec<Vec<u32>>> {
    let graph = instance.graph(agent);
    if path.is_empty() {
        return Err(Error::InvalidParameters(format!("empty optimal path for agent {agent}")));
    }
    path.iter()
        .map(|&c| {
            if !graph.contains(c) {
                return Err(Error::UnknownWaypoint(c));
            }
            let centre = graph.position(c);
            Ok((0..graph.len() as u32)
                .filter(|&w| graph.position(w).distance(centre) <= radius)
                .collect())
        })
        .collect()
}

/// Convenience wrapper building a one-off [`Sampler`]; planners keep one
/// sampler for the whole run instead.
pub fn sample_joint_state<R: Rng + ?Sized>(
    instance: &ProblemInstance,
    config: &PlannerConfig,
    rng: &mut R,
    mode: SamplingMode,
    single_agent_paths: Option<&[Vec<u32>]>,
) -> Result<JointState> {
    Ok(Sampler::new(instance, config, mode, single_agent_paths)?.sample(instance, rng))
}
