//! Independent solution checker. Deliberately shares nothing with the
//! planners' feasibility code except [`min_move_distance`].

use std::fmt;

use crate::graph::ProblemInstance;
use crate::joint::{min_move_distance, SeparationMode, Solution};

pub const COST_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    AgentCount { expected: usize, found: usize },
    EmptyPath { agent: usize },
    UnknownWaypoint { agent: usize, t: usize, waypoint: u32 },
    WrongStart { agent: usize, expected: u32, found: u32 },
    WrongEnd { agent: usize, expected: u32, found: u32 },
    /// No primitive connects the agent's waypoints at `t` and `t + 1`.
    MissingPrimitive { agent: usize, t: usize },
    UnequalDurations { t: usize },
    /// Agents came within `distance` ≤ d_sep of each other during `t → t + 1`
    /// (or at rest at `t` when the solution has no moves).
    Separation { t: usize, agents: (usize, usize), distance: f64 },
    CostMismatch { declared: f64, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AgentCount { expected, found } => {
                write!(f, "agent count: expected {expected} paths, found {found}")
            }
            Violation::EmptyPath { agent } => write!(f, "endpoint: agent {agent} has an empty path"),
            Violation::UnknownWaypoint { agent, t, waypoint } => {
                write!(f, "chain: agent {agent} at t={t} is at unknown waypoint {waypoint}")
            }
            Violation::WrongStart { agent, expected, found } => {
                write!(f, "endpoint: agent {agent} starts at {found}, expected {expected}")
            }
            Violation::WrongEnd { agent, expected, found } => {
                write!(f, "endpoint: agent {agent} ends at {found}, expected {expected}")
            }
            Violation::MissingPrimitive { agent, t } => {
                write!(f, "chain: agent {agent} has no primitive for t={t}→{}", t + 1)
            }
            Violation::UnequalDurations { t } => {
                write!(f, "chain: primitive durations differ across agents at t={t}→{}", t + 1)
            }
            Violation::Separation { t, agents, distance } => write!(
                f,
                "separation: agents {} and {} come within {distance} m during t={t}→{}",
                agents.0,
                agents.1,
                t + 1
            ),
            Violation::CostMismatch { declared, recomputed } => {
                write!(f, "cost-mismatch: declared {declared}, recomputed {recomputed}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Valid,
    Invalid(Vec<Violation>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            Verdict::Valid => &[],
            Verdict::Invalid(v) => v,
        }
    }
}

pub fn validate_solution(instance: &ProblemInstance, solution: &Solution) -> Verdict {
    validate_solution_with(instance, solution, SeparationMode::Continuous)
}

/// Checks endpoints, chain consistency against the motion graphs, strict
/// separation for every timestep and pair, and the declared cost. Shorter
/// paths are padded with waits at their final waypoint.
pub fn validate_solution_with(instance: &ProblemInstance, solution: &Solution, mode: SeparationMode) -> Verdict {
    let n = instance.n_agents();
    if solution.paths.len() != n {
        return Verdict::Invalid(vec![Violation::AgentCount {
            expected: n,
            found: solution.paths.len(),
        }]);
    }

    let mut violations = Vec::new();
    for (agent, path) in solution.paths.iter().enumerate() {
        if path.is_empty() {
            violations.push(Violation::EmptyPath { agent });
            continue;
        }
        let graph = instance.graph(agent);
        for (t, &w) in path.iter().enumerate() {
            if !graph.contains(w) {
                violations.push(Violation::UnknownWaypoint { agent, t, waypoint: w });
            }
        }
    }
    if !violations.is_empty() {
        return Verdict::Invalid(violations);
    }

    for (agent, path) in solution.paths.iter().enumerate() {
        let (s, d) = (instance.starts()[agent], instance.destinations()[agent]);
        if path[0] != s {
            violations.push(Violation::WrongStart { agent, expected: s, found: path[0] });
        }
        let last = *path.last().unwrap();
        if last != d {
            violations.push(Violation::WrongEnd { agent, expected: d, found: last });
        }
    }

    let horizon = solution.paths.iter().map(Vec::len).max().unwrap_or(1);
    let at = |agent: usize, t: usize| -> u32 {
        let p = &solution.paths[agent];
        p[t.min(p.len() - 1)]
    };

    let mut recomputed = 0.0;
    for t in 0..horizon.saturating_sub(1) {
        let mut durations = Vec::with_capacity(n);
        for agent in 0..n {
            let (u, v) = (at(agent, t), at(agent, t + 1));
            match instance.graph(agent).primitives(u).iter().find(|p| p.to == v) {
                Some(p) => {
                    durations.push(p.duration);
                    let parked = u == instance.destinations()[agent] && p.is_wait();
                    if !parked {
                        recomputed += p.duration;
                    }
                }
                None => violations.push(Violation::MissingPrimitive { agent, t }),
            }
        }
        if durations.len() == n && durations.iter().any(|&d| d != durations[0]) {
            violations.push(Violation::UnequalDurations { t });
        }

        for a in 0..n {
            for b in (a + 1)..n {
                let (ga, gb) = (instance.graph(a), instance.graph(b));
                let a0 = ga.position(at(a, t));
                let a1 = ga.position(at(a, t + 1));
                let b0 = gb.position(at(b, t));
                let b1 = gb.position(at(b, t + 1));
                let distance = match mode {
                    SeparationMode::Continuous => min_move_distance(a0, a1, b0, b1, 1.0),
                    SeparationMode::Discrete => a0.distance(b0).min(a1.distance(b1)),
                };
                if distance <= instance.separation() {
                    violations.push(Violation::Separation { t, agents: (a, b), distance });
                }
            }
        }
    }
    if horizon == 1 {
        for a in 0..n {
            for b in (a + 1)..n {
                let distance = instance
                    .graph(a)
                    .position(at(a, 0))
                    .distance(instance.graph(b).position(at(b, 0)));
                if distance <= instance.separation() {
                    violations.push(Violation::Separation { t: 0, agents: (a, b), distance });
                }
            }
        }
    }

    // NaN declared costs fall through to a mismatch
    let matches = (solution.total_cost - recomputed).abs() <= COST_TOLERANCE;
    if !matches {
        violations.push(Violation::CostMismatch {
            declared: solution.total_cost,
            recomputed,
        });
    }

    if violations.is_empty() {
        Verdict::Valid
    } else {
        Verdict::Invalid(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MotionGraph;

    /// Two agents on neighbouring cells that want to trade places.
    fn corridor() -> ProblemInstance {
        let g = MotionGraph::grid(3, &[]).unwrap();
        ProblemInstance::shared(g, vec![0, 1], vec![1, 0], 0.8, 0).unwrap()
    }

    #[test]
    fn swap_is_flagged() {
        let inst = corridor();
        let sol = Solution {
            paths: vec![vec![0, 1], vec![1, 0]],
            total_cost: 2.0,
        };
        let verdict = validate_solution(&inst, &sol);
        assert_eq!(
            verdict.violations(),
            &[Violation::Separation { t: 0, agents: (0, 1), distance: 0.0 }]
        );
    }

    #[test]
    fn cost_mismatch_is_flagged() {
        let g = MotionGraph::grid(3, &[]).unwrap();
        let inst = ProblemInstance::shared(g, vec![0], vec![2], 0.8, 0).unwrap();
        let ok = Solution { paths: vec![vec![0, 1, 2]], total_cost: 2.0 };
        assert!(validate_solution(&inst, &ok).is_valid());
        let bad = Solution { total_cost: 3.0, ..ok };
        assert!(matches!(
            validate_solution(&inst, &bad).violations(),
            [Violation::CostMismatch { .. }]
        ));
    }

    #[test]
    fn padding_and_parking() {
        let g = MotionGraph::grid(3, &[]).unwrap();
        // agent 0 arrives at t=1 and waits; agent 1 needs two steps
        let inst = ProblemInstance::shared(g, vec![0, 8], vec![1, 6], 0.8, 0).unwrap();
        let sol = Solution { paths: vec![vec![0, 1], vec![8, 7, 6]], total_cost: 3.0 };
        assert_eq!(validate_solution(&inst, &sol), Verdict::Valid);
    }

    #[test]
    fn garbage_is_reported_not_panicked() {
        let inst = corridor();
        let sol = Solution { paths: vec![vec![], vec![99]], total_cost: 0.0 };
        let v = validate_solution(&inst, &sol);
        assert_eq!(v.violations().len(), 2);
        let sol = Solution { paths: vec![vec![0, 8], vec![1, 1]], total_cost: 0.0 };
        let v = validate_solution(&inst, &sol);
        assert!(v.violations().iter().any(|x| matches!(x, Violation::MissingPrimitive { agent: 0, t: 0 })));
        assert!(v.violations().iter().any(|x| matches!(x, Violation::WrongEnd { agent: 0, .. })));
        let v = validate_solution(&inst, &Solution { paths: vec![vec![0]], total_cost: 0.0 });
        assert!(matches!(v.violations(), [Violation::AgentCount { expected: 2, found: 1 }]));
    }
}
