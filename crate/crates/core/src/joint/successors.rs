use crate::error::{Error, Result};
use crate::graph::{MotionPrimitive, Point, ProblemInstance};
use crate::joint::{pair_clear, AgentVec, JointMove, JointState, SeparationMode};

/// Time spent outside destinations during `mv`: every agent contributes the
/// move duration except one that is at its destination and waiting there.
pub fn step_cost(state: &JointState, mv: &JointMove, destinations: &[u32]) -> Result<f64> {
    if mv.arity() != state.arity() || destinations.len() != state.arity() {
        return Err(Error::ArityMismatch {
            expected: state.arity(),
            found: if mv.arity() != state.arity() { mv.arity() } else { destinations.len() },
        });
    }
    Ok(mv
        .primitives
        .iter()
        .zip(state.iter().zip(destinations))
        .map(|(p, (&w, &d))| if w == d && p.is_wait() { 0.0 } else { p.duration })
        .sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Successor {
    pub mv: JointMove,
    pub state: JointState,
    pub cost: f64,
}

/// All separated joint moves out of `state`, in lexicographic order over the
/// canonical per-agent primitive order.
pub fn joint_successors(instance: &ProblemInstance, state: &JointState) -> Result<Vec<Successor>> {
    joint_successors_with(instance, state, SeparationMode::Continuous)
}

pub fn joint_successors_with(
    instance: &ProblemInstance,
    state: &JointState,
    mode: SeparationMode,
) -> Result<Vec<Successor>> {
    state.check(instance)?;
    let mut out = Vec::new();
    for_each_successor(instance, state, mode, |prims, cost| {
        out.push(Successor {
            mv: JointMove::new(prims.iter().copied()),
            state: prims.iter().map(|p| p.to).collect(),
            cost,
        });
        true
    });
    Ok(out)
}

/// Depth-first enumeration of the Cartesian product of per-agent primitives,
/// pruning a prefix as soon as its newest agent conflicts with an earlier one.
/// Enumeration stops once `visit` returns false; the return value says whether
/// it ran to completion.
pub(crate) fn for_each_successor<F>(instance: &ProblemInstance, state: &[u32], mode: SeparationMode, mut visit: F) -> bool
where
    F: FnMut(&[MotionPrimitive], f64) -> bool,
{
    let n = state.len();
    let origins: AgentVec<Point> = (0..n).map(|i| instance.graph(i).position(state[i])).collect();
    let mut ctx = Expansion {
        instance,
        state,
        origins,
        targets: AgentVec::with_capacity(n),
        chosen: AgentVec::with_capacity(n),
        d_sep: instance.separation(),
        mode,
    };
    ctx.descend(0, 0.0, &mut visit)
}

struct Expansion<'a> {
    instance: &'a ProblemInstance,
    state: &'a [u32],
    origins: AgentVec<Point>,
    targets: AgentVec<Point>,
    chosen: AgentVec<MotionPrimitive>,
    d_sep: f64,
    mode: SeparationMode,
}

impl Expansion<'_> {
    fn descend<F: FnMut(&[MotionPrimitive], f64) -> bool>(&mut self, agent: usize, cost: f64, visit: &mut F) -> bool {
        if agent == self.state.len() {
            return visit(&self.chosen, cost);
        }
        let graph = self.instance.graph(agent);
        let here = self.state[agent];
        let parked = here == self.instance.destinations()[agent];
        let a0 = self.origins[agent];
        for p in graph.primitives(here) {
            if let Some(first) = self.chosen.first() {
                if p.duration != first.duration {
                    continue;
                }
            }
            let a1 = graph.position(p.to);
            let clear = (0..agent).all(|j| pair_clear(a0, a1, self.origins[j], self.targets[j], self.d_sep, self.mode));
            if !clear {
                continue;
            }
            let c = if parked && p.is_wait() { 0.0 } else { p.duration };
            self.chosen.push(*p);
            self.targets.push(a1);
            let go_on = self.descend(agent + 1, cost + c, visit);
            self.chosen.pop();
            self.targets.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
}
