//! Greedy connection between two joint states.
//!
//! Each agent independently steps to the neighbour closest (Euclidean) to its
//! target component; the combined move must keep all agents separated and
//! strictly reduce the summed distance to the target. The walk never
//! backtracks: the first blocked step ends it.

use crate::graph::{MotionPrimitive, Point, ProblemInstance};
use crate::joint::{pair_clear, AgentVec, JointPath, JointState, SeparationMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FailureReason {
    /// The greedy joint move violates separation.
    Conflict,
    /// The greedy joint move does not bring the agents closer to the target.
    LocalMinimum,
    /// The target was not reached within the step limit.
    StepLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConnectFailure {
    pub reason: FailureReason,
    /// Joint steps completed before the walk stopped.
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    pub mode: SeparationMode,
    /// After a conflict, how many next-best joint moves to try before failing.
    pub alternatives: u32,
}

/// Connects `from` to `to` within `max_steps` joint steps, or reports why the
/// greedy walk stopped.
pub fn greedy_connect(
    instance: &ProblemInstance,
    from: &JointState,
    to: &JointState,
    max_steps: usize,
) -> Result<JointPath, ConnectFailure> {
    greedy_connect_with(instance, from, to, max_steps, GreedyOptions::default())
}

pub fn greedy_connect_with(
    instance: &ProblemInstance,
    from: &JointState,
    to: &JointState,
    max_steps: usize,
    options: GreedyOptions,
) -> Result<JointPath, ConnectFailure> {
    let walk = greedy_walk(instance, from, to, max_steps, options);
    match walk.stopped {
        None => Ok(walk.path),
        Some(reason) => Err(ConnectFailure {
            reason,
            steps: walk.path.steps(),
        }),
    }
}

/// A greedy walk and, if it did not reach its target, why it stopped. The
/// path holds the prefix walked so far either way.
pub(crate) struct Walk {
    pub path: JointPath,
    pub stopped: Option<FailureReason>,
}

pub(crate) fn greedy_walk(
    instance: &ProblemInstance,
    from: &JointState,
    to: &JointState,
    max_steps: usize,
    options: GreedyOptions,
) -> Walk {
    debug_assert_eq!(from.arity(), instance.n_agents());
    debug_assert_eq!(to.arity(), instance.n_agents());
    let n = from.arity();
    let targets: AgentVec<Point> = (0..n).map(|i| instance.graph(i).position(to[i])).collect();
    let d_sep = instance.separation();
    let destinations = instance.destinations();

    let mut path = JointPath::empty(from.clone());
    path.states.reserve(max_steps.min(64));
    let mut current = from.clone();
    let mut remaining: f64 = (0..n)
        .map(|i| instance.graph(i).position(current[i]).distance(targets[i]))
        .sum();

    loop {
        if current == *to {
            return Walk { path, stopped: None };
        }
        if path.steps() >= max_steps {
            return Walk { path, stopped: Some(FailureReason::StepLimit) };
        }

        let greedy: AgentVec<(f64, MotionPrimitive)> = (0..n)
            .map(|i| best_primitive(instance, i, current[i], to[i], targets[i]))
            .collect();
        let chosen = match evaluate(instance, &greedy, remaining, d_sep, options.mode) {
            Step::Ok(sum) => Some((greedy, sum)),
            Step::NoProgress => return Walk { path, stopped: Some(FailureReason::LocalMinimum) },
            Step::Blocked => alternatives(instance, &current, to, &targets, &greedy, remaining, d_sep, options),
        };
        let Some((choice, sum)) = chosen else {
            return Walk { path, stopped: Some(FailureReason::Conflict) };
        };

        let mut step_cost = 0.0;
        for (i, (_, p)) in choice.iter().enumerate() {
            if !(current[i] == destinations[i] && p.is_wait()) {
                step_cost += p.duration;
            }
        }
        current = choice.iter().map(|(_, p)| p.to).collect();
        path.states.push(current.clone());
        path.cost += step_cost;
        path.duration += choice[0].1.duration;
        remaining = sum;
    }
}

/// Agent `i`'s greedy primitive and the distance of its endpoint to the
/// target: the wait when already on the target, otherwise the closest
/// endpoint with canonical order breaking ties.
fn best_primitive(instance: &ProblemInstance, i: usize, at: u32, target: u32, target_pos: Point) -> (f64, MotionPrimitive) {
    let graph = instance.graph(i);
    if at == target {
        if let Some(w) = graph.wait_primitive(at) {
            return (0.0, *w);
        }
    }
    let mut best: Option<(f64, MotionPrimitive)> = None;
    for p in graph.primitives(at) {
        let d = graph.position(p.to).distance(target_pos);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, *p));
        }
    }
    // every waypoint has at least its wait primitive
    best.expect("waypoint without primitives")
}

/// Agent `i`'s primitives ordered like [`best_primitive`] would pick them.
fn rank_primitives(
    instance: &ProblemInstance,
    i: usize,
    at: u32,
    target: u32,
    target_pos: Point,
) -> Vec<(f64, MotionPrimitive)> {
    let graph = instance.graph(i);
    let mut ranked: Vec<(f64, MotionPrimitive)> = graph
        .primitives(at)
        .iter()
        .map(|p| (graph.position(p.to).distance(target_pos), *p))
        .collect();
    // stable: equal distances keep canonical order
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    if at == target {
        if let Some(pos) = ranked.iter().position(|(_, p)| p.is_wait()) {
            let w = ranked.remove(pos);
            ranked.insert(0, (0.0, w.1));
        }
    }
    ranked
}

enum Step {
    Ok(f64),
    NoProgress,
    Blocked,
}

fn evaluate(
    instance: &ProblemInstance,
    choice: &[(f64, MotionPrimitive)],
    remaining: f64,
    d_sep: f64,
    mode: SeparationMode,
) -> Step {
    let sum: f64 = choice.iter().map(|c| c.0).sum();
    let shorter = sum < remaining;
    if !shorter {
        return Step::NoProgress;
    }
    let duration = choice[0].1.duration;
    if choice.iter().any(|c| c.1.duration != duration) {
        return Step::Blocked;
    }
    for a in 1..choice.len() {
        let ga = instance.graph(a);
        let pa = choice[a].1;
        let (a0, a1) = (ga.position(pa.from), ga.position(pa.to));
        for (b, cb) in choice.iter().enumerate().take(a) {
            let gb = instance.graph(b);
            let pb = cb.1;
            if !pair_clear(a0, a1, gb.position(pb.from), gb.position(pb.to), d_sep, mode) {
                return Step::Blocked;
            }
        }
    }
    Step::Ok(sum)
}

/// Single-agent deviations from the greedy choice, best summed distance first;
/// returns the first of at most `options.alternatives` that is feasible.
#[allow(clippy::too_many_arguments)]
fn alternatives(
    instance: &ProblemInstance,
    current: &JointState,
    to: &JointState,
    targets: &[Point],
    greedy: &[(f64, MotionPrimitive)],
    remaining: f64,
    d_sep: f64,
    options: GreedyOptions,
) -> Option<(AgentVec<(f64, MotionPrimitive)>, f64)> {
    if options.alternatives == 0 {
        return None;
    }
    let base: f64 = greedy.iter().map(|c| c.0).sum();
    let mut candidates: Vec<(f64, usize, (f64, MotionPrimitive))> = Vec::new();
    for i in 0..current.arity() {
        let ranked = rank_primitives(instance, i, current[i], to[i], targets[i]);
        for &(d, p) in ranked.iter().skip(1) {
            let sum = base - greedy[i].0 + d;
            if sum < remaining {
                candidates.push((sum, i, (d, p)));
            }
        }
    }
    // stable: ties keep agent order, then rank order
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(_, i, alt) in candidates.iter().take(options.alternatives as usize) {
        let mut choice: AgentVec<(f64, MotionPrimitive)> = AgentVec::from_slice(greedy);
        choice[i] = alt;
        if let Step::Ok(sum) = evaluate(instance, &choice, remaining, d_sep, options.mode) {
            return Some((choice, sum));
        }
    }
    None
}
