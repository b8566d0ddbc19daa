use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::ProblemInstance;
use crate::joint::JointPath;

/// Per-agent waypoint sequences sampled at every joint timestep, plus the
/// declared total cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub paths: Vec<Vec<u32>>,
    pub total_cost: f64,
}

impl Solution {
    pub fn from_joint_path(path: &JointPath) -> Self {
        let n = path.start().arity();
        let paths = (0..n)
            .map(|i| path.states.iter().map(|s| s[i]).collect())
            .collect();
        Solution {
            paths,
            total_cost: path.cost,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.paths.len()
    }

    /// Length of the longest per-agent sequence minus one.
    pub fn steps(&self) -> usize {
        self.paths.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

#[derive(Serialize)]
struct SolutionDoc<'a> {
    instance_seed: u64,
    algorithm: &'a str,
    cost: f64,
    agents: Vec<AgentTrack>,
}

#[derive(Serialize)]
struct AgentTrack {
    waypoints: Vec<u32>,
    t0: u32,
    dt: f64,
}

/// Serializes `solution` with waypoint ids. All timesteps must share one
/// duration, which becomes `dt`.
pub fn save_solution(instance: &ProblemInstance, solution: &Solution, algorithm: &str) -> Result<String> {
    let dt = uniform_timestep(instance, solution)?;
    let agents = solution
        .paths
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let g = instance.graph(i);
            let waypoints = p
                .iter()
                .map(|&w| {
                    if g.contains(w) {
                        Ok(g.waypoint(w).id)
                    } else {
                        Err(Error::UnknownWaypoint(w))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AgentTrack { waypoints, t0: 0, dt })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = SolutionDoc {
        instance_seed: instance.seed(),
        algorithm,
        cost: solution.total_cost,
        agents,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

fn uniform_timestep(instance: &ProblemInstance, solution: &Solution) -> Result<f64> {
    let mut dt: Option<f64> = None;
    for (i, p) in solution.paths.iter().enumerate() {
        if i >= instance.n_agents() {
            return Err(Error::ArityMismatch {
                expected: instance.n_agents(),
                found: solution.n_agents(),
            });
        }
        let g = instance.graph(i);
        for w in p.windows(2) {
            let d = g
                .primitive_between(w[0], w[1])
                .map(|prim| prim.duration)
                .ok_or(Error::UnknownWaypoint(w[1]))?;
            match dt {
                None => dt = Some(d),
                Some(prev) if prev != d => return Err(Error::NonUniformTimestep),
                _ => {}
            }
        }
    }
    Ok(dt.unwrap_or_else(|| {
        let g = instance.graph(0);
        instance
            .starts()
            .first()
            .and_then(|&s| g.wait_primitive(s))
            .map_or(1.0, |p| p.duration)
    }))
}

pub fn load_solution(instance: &ProblemInstance, text: &str) -> Result<Solution> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let cost = value
        .get("cost")
        .ok_or_else(|| Error::schema("cost", "missing"))?
        .as_f64()
        .ok_or_else(|| Error::schema("cost", "expected a number"))?;
    let agents = value
        .get("agents")
        .ok_or_else(|| Error::schema("agents", "missing"))?
        .as_array()
        .ok_or_else(|| Error::schema("agents", "expected an array"))?;
    if agents.len() != instance.n_agents() {
        return Err(Error::schema(
            "agents",
            format!("{} tracks for {} agents", agents.len(), instance.n_agents()),
        ));
    }
    let mut paths = Vec::with_capacity(agents.len());
    for (i, track) in agents.iter().enumerate() {
        let field = format!("agents[{i}].waypoints");
        let ids = track
            .get("waypoints")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::schema(&field, "expected an array"))?;
        let g = instance.graph(i);
        let path = ids
            .iter()
            .map(|v| {
                let id = v
                    .as_u64()
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| Error::schema(&field, "expected waypoint ids"))?;
                g.index_of(id)
                    .ok_or_else(|| Error::schema(&field, format!("waypoint {id} is not in the graph")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(dt) = track.get("dt") {
            if !dt.as_f64().is_some_and(|d| d.is_finite() && d > 0.0) {
                return Err(Error::schema(format!("agents[{i}].dt"), "must be a positive number"));
            }
        }
        paths.push(path);
    }
    Ok(Solution { paths, total_cost: cost })
}
