use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{is_reachable, MotionGraph};

/// A cooperative pathfinding problem: one motion graph per agent, a start and
/// destination waypoint for each agent and the required separation.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    graphs: Vec<Arc<MotionGraph>>,
    starts: Vec<u32>,
    destinations: Vec<u32>,
    separation: f64,
    seed: u64,
}

impl PartialEq for ProblemInstance {
    fn eq(&self, other: &Self) -> bool {
        self.starts == other.starts
            && self.destinations == other.destinations
            && self.separation == other.separation
            && self.seed == other.seed
            && self.graphs.len() == other.graphs.len()
            && self
                .graphs
                .iter()
                .zip(&other.graphs)
                .all(|(a, b)| Arc::ptr_eq(a, b) || **a == **b)
    }
}

impl ProblemInstance {
    /// Validates all invariants before returning the instance.
    pub fn new(
        graphs: Vec<Arc<MotionGraph>>,
        starts: Vec<u32>,
        destinations: Vec<u32>,
        separation: f64,
        seed: u64,
    ) -> Result<Self> {
        let instance = ProblemInstance {
            graphs,
            starts,
            destinations,
            separation,
            seed,
        };
        instance.validate()?;
        Ok(instance)
    }

    /// All agents share `graph`.
    pub fn shared(
        graph: MotionGraph,
        starts: Vec<u32>,
        destinations: Vec<u32>,
        separation: f64,
        seed: u64,
    ) -> Result<Self> {
        let graph = Arc::new(graph);
        let graphs = vec![graph; starts.len()];
        Self::new(graphs, starts, destinations, separation, seed)
    }

    /// Checks every instance invariant; the standalone validator used on
    /// generated and loaded instances alike.
    pub fn validate(&self) -> Result<()> {
        let n = self.starts.len();
        if n == 0 {
            return Err(Error::InvalidInstance("at least one agent is required".into()));
        }
        if self.destinations.len() != n || self.graphs.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{} starts, {} destinations and {} graphs do not agree",
                n,
                self.destinations.len(),
                self.graphs.len()
            )));
        }
        if !(self.separation.is_finite() && self.separation > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "separation must be positive, got {}",
                self.separation
            )));
        }
        for (name, tuple) in [("start", &self.starts), ("destination", &self.destinations)] {
            for i in 0..n {
                if !self.graphs[i].contains(tuple[i]) {
                    return Err(Error::InvalidInstance(format!(
                        "{name} waypoint of agent {i} is not in its graph"
                    )));
                }
                for j in 0..i {
                    let same_graph = Arc::ptr_eq(&self.graphs[i], &self.graphs[j])
                        || *self.graphs[i] == *self.graphs[j];
                    if same_graph && tuple[i] == tuple[j] {
                        return Err(Error::InvalidInstance(format!(
                            "{name} waypoints must be pairwise distinct (agents {j} and {i} share one)"
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            if !is_reachable(&self.graphs[i], self.starts[i], self.destinations[i])? {
                return Err(Error::InvalidInstance(format!(
                    "destination of agent {i} is unreachable from its start"
                )));
            }
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.starts.len()
    }

    #[inline]
    pub fn graph(&self, agent: usize) -> &MotionGraph {
        &self.graphs[agent]
    }

    pub fn graphs(&self) -> &[Arc<MotionGraph>] {
        &self.graphs
    }

    /// The graph shared by every agent, if they all use the same one.
    pub fn shared_graph(&self) -> Option<&MotionGraph> {
        let first = &self.graphs[0];
        self.graphs
            .iter()
            .all(|g| Arc::ptr_eq(g, first) || **g == **first)
            .then_some(&**first)
    }

    pub fn starts(&self) -> &[u32] {
        &self.starts
    }

    pub fn destinations(&self) -> &[u32] {
        &self.destinations
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}
