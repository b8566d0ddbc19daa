//! Joint-state-space kinematics: synchronized moves of all agents, continuous
//! separation checking, the time-outside-destination cost and an independent
//! solution validator.

mod separation;
mod solution;
mod successors;
mod validate;

pub use separation::{min_move_distance, move_is_separated, move_is_separated_with, SeparationMode};
pub use solution::{load_solution, save_solution, Solution};
pub use successors::{joint_successors, joint_successors_with, step_cost, Successor};
pub use validate::{validate_solution, validate_solution_with, Verdict, Violation};

pub(crate) use separation::pair_clear;
pub(crate) use successors::for_each_successor;

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::{MotionPrimitive, ProblemInstance};

pub(crate) type AgentVec<T> = SmallVec<[T; 8]>;

/// One waypoint index per agent. Ordered lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointState(pub AgentVec<u32>);

impl JointState {
    pub fn from_slice(components: &[u32]) -> Self {
        JointState(SmallVec::from_slice(components))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn starts(instance: &ProblemInstance) -> Self {
        Self::from_slice(instance.starts())
    }

    pub fn destinations(instance: &ProblemInstance) -> Self {
        Self::from_slice(instance.destinations())
    }

    /// Pairwise separation of the agents at rest.
    pub fn is_separated(&self, instance: &ProblemInstance) -> bool {
        let d_sep = instance.separation();
        (0..self.arity()).all(|i| {
            (0..i).all(|j| {
                instance
                    .graph(i)
                    .position(self[i])
                    .distance(instance.graph(j).position(self[j]))
                    > d_sep
            })
        })
    }

    /// Arity and waypoint-membership check against `instance`.
    pub fn check(&self, instance: &ProblemInstance) -> Result<()> {
        if self.arity() != instance.n_agents() {
            return Err(Error::ArityMismatch {
                expected: instance.n_agents(),
                found: self.arity(),
            });
        }
        for (i, &w) in self.iter().enumerate() {
            if !instance.graph(i).contains(w) {
                return Err(Error::UnknownWaypoint(w));
            }
        }
        Ok(())
    }
}

impl Deref for JointState {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for JointState {
    fn from(v: Vec<u32>) -> Self {
        JointState(SmallVec::from_vec(v))
    }
}

impl FromIterator<u32> for JointState {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        JointState(iter.into_iter().collect())
    }
}

impl fmt::Display for JointState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

/// The synchronized primitives executed by all agents over one timestep.
#[derive(Clone, Debug, PartialEq)]
pub struct JointMove {
    pub primitives: AgentVec<MotionPrimitive>,
}

impl JointMove {
    pub fn new(primitives: impl IntoIterator<Item = MotionPrimitive>) -> Self {
        JointMove {
            primitives: primitives.into_iter().collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.primitives.len()
    }

    pub fn duration(&self) -> f64 {
        self.primitives.first().map_or(0.0, |p| p.duration)
    }

    pub fn target(&self) -> JointState {
        self.primitives.iter().map(|p| p.to).collect()
    }

    /// The move whose components connect `from` to `to`, if every agent has
    /// a primitive for its step and all durations agree.
    pub fn between(instance: &ProblemInstance, from: &[u32], to: &[u32]) -> Option<Self> {
        let mut prims = AgentVec::new();
        for (i, (&a, &b)) in from.iter().zip(to).enumerate() {
            prims.push(*instance.graph(i).primitive_between(a, b)?);
        }
        let d = prims.first()?.duration;
        prims.iter().all(|p| p.duration == d).then_some(JointMove { primitives: prims })
    }

    pub(crate) fn check_applicable(&self, state: &JointState) -> Result<()> {
        if self.arity() != state.arity() {
            return Err(Error::ArityMismatch {
                expected: state.arity(),
                found: self.arity(),
            });
        }
        for (agent, (p, &w)) in self.primitives.iter().zip(state.iter()).enumerate() {
            if p.from != w {
                return Err(Error::InapplicableMove { agent });
            }
        }
        Ok(())
    }
}

/// A chain of joint states; the joint moves between consecutive states are
/// recovered from the motion graphs on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPath {
    pub states: Vec<JointState>,
    /// Sum of step costs.
    pub cost: f64,
    /// Elapsed time, in seconds.
    pub duration: f64,
}

impl JointPath {
    pub fn empty(at: JointState) -> Self {
        JointPath {
            states: vec![at],
            cost: 0.0,
            duration: 0.0,
        }
    }

    /// Number of joint moves.
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn start(&self) -> &JointState {
        &self.states[0]
    }

    pub fn end(&self) -> &JointState {
        self.states.last().expect("joint path has at least one state")
    }

    pub fn moves(&self, instance: &ProblemInstance) -> Option<Vec<JointMove>> {
        self.states
            .windows(2)
            .map(|w| JointMove::between(instance, &w[0], &w[1]))
            .collect()
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &JointPath) {
        debug_assert_eq!(self.end(), other.start());
        self.states.extend(other.states[1..].iter().cloned());
        self.cost += other.cost;
        self.duration += other.duration;
    }

    /// Sum of step costs, recomputed from the moves.
    pub fn recompute_cost(&self, instance: &ProblemInstance) -> Option<f64> {
        let moves = self.moves(instance)?;
        let mut total = 0.0;
        for (state, mv) in self.states.iter().zip(&moves) {
            total += step_cost(state, mv, instance.destinations()).ok()?;
        }
        Some(total)
    }
}
