//! A* directly in the joint-state space.
//!
//! Nodes live in flat arrays indexed by discovery order; a joint state is
//! stored once in `states` and referenced by index from the open list. The
//! open list is a hand-rolled binary heap because its ordering needs the
//! stored states for the final lexicographic tie-break.

use std::cmp::Ordering;

use rustc_hash::FxHashMap;

use crate::error::Result;
use crate::graph::ProblemInstance;
use crate::joint::{for_each_successor, AgentVec, JointPath, JointState, Solution};
use crate::planner::{AnytimeResult, BudgetClock, PlannerConfig, PlanningContext, Status, TimedSolution};

/// Stored nodes after which the search gives up with `budget_exhausted`.
/// Nine or more agents can generate millions of children per expansion.
const NODE_LIMIT: usize = 1 << 23;

/// Generated children between wall-clock polls inside one expansion.
const POLL_EVERY: u32 = 4096;

pub fn plan_ja(instance: &ProblemInstance, config: &PlannerConfig) -> Result<AnytimeResult> {
    let ctx = PlanningContext::new(instance)?;
    plan_ja_with(&ctx, config)
}

#[derive(Clone, Copy)]
struct OpenEntry {
    f: f64,
    h: f64,
    g: f64,
    node: u32,
}

struct Nodes {
    arity: usize,
    states: Vec<u32>,
    g: Vec<f64>,
    parent: Vec<u32>,
    closed: Vec<bool>,
}

impl Nodes {
    const NO_PARENT: u32 = u32::MAX;

    fn state(&self, node: u32) -> &[u32] {
        let at = node as usize * self.arity;
        &self.states[at..at + self.arity]
    }

    fn push(&mut self, state: &[u32], g: f64, parent: u32) -> u32 {
        let id = self.g.len() as u32;
        self.states.extend_from_slice(state);
        self.g.push(g);
        self.parent.push(parent);
        self.closed.push(false);
        id
    }
}

/// Min-heap on (f, h, joint state).
struct OpenList {
    heap: Vec<OpenEntry>,
}

impl OpenList {
    fn order(nodes: &Nodes, a: &OpenEntry, b: &OpenEntry) -> Ordering {
        a.f.total_cmp(&b.f)
            .then(a.h.total_cmp(&b.h))
            .then_with(|| nodes.state(a.node).cmp(nodes.state(b.node)))
            .then(a.g.total_cmp(&b.g))
    }

    fn push(&mut self, nodes: &Nodes, entry: OpenEntry) {
        self.heap.push(entry);
        let mut i = self.heap.len() - 1;
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::order(nodes, &self.heap[i], &self.heap[parent]) == Ordering::Less {
                self.heap.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn pop(&mut self, nodes: &Nodes) -> Option<OpenEntry> {
        let last = self.heap.len().checked_sub(1)?;
        self.heap.swap(0, last);
        let top = self.heap.pop();
        let len = self.heap.len();
        let mut i = 0;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut smallest = i;
            if l < len && Self::order(nodes, &self.heap[l], &self.heap[smallest]) == Ordering::Less {
                smallest = l;
            }
            if r < len && Self::order(nodes, &self.heap[r], &self.heap[smallest]) == Ordering::Less {
                smallest = r;
            }
            if smallest == i {
                break;
            }
            self.heap.swap(i, smallest);
            i = smallest;
        }
        top
    }
}

/// Optimal joint plan by A* with the sum of per-agent shortest arrival times
/// as heuristic. The heuristic is consistent, so closed nodes are final.
pub fn plan_ja_with(ctx: &PlanningContext<'_>, config: &PlannerConfig) -> Result<AnytimeResult> {
    config.validate()?;
    let mut clock = BudgetClock::start(config.budget);
    let instance = ctx.instance;
    let n = instance.n_agents();
    let start = JointState::starts(instance);
    let goal = JointState::destinations(instance);

    let infeasible = |iterations| AnytimeResult {
        solutions: Vec::new(),
        status: Status::InfeasibleProven,
        iterations,
    };
    if !start.is_separated(instance) || !goal.is_separated(instance) {
        return Ok(infeasible(0));
    }

    let mut nodes = Nodes {
        arity: n,
        states: Vec::new(),
        g: Vec::new(),
        parent: Vec::new(),
        closed: Vec::new(),
    };
    let mut lookup: FxHashMap<JointState, u32> = FxHashMap::default();
    let mut open = OpenList { heap: Vec::new() };

    let h0 = ctx.heuristic(&start);
    let root = nodes.push(&start, 0.0, Nodes::NO_PARENT);
    lookup.insert(start.clone(), root);
    open.push(&nodes, OpenEntry { f: h0, h: h0, g: 0.0, node: root });

    let mut expansions: u64 = 0;
    let mut exhausted = false;
    let mut current = AgentVec::<u32>::new();
    let mut child = AgentVec::<u32>::new();
    while let Some(entry) = open.pop(&nodes) {
        let node = entry.node;
        if nodes.closed[node as usize] || entry.g > nodes.g[node as usize] {
            continue;
        }
        if nodes.state(node) == &goal[..] {
            let elapsed = clock.elapsed();
            if !clock.within(elapsed) {
                exhausted = true;
                break;
            }
            let path = reconstruct(&nodes, node, instance);
            return Ok(AnytimeResult {
                solutions: vec![TimedSolution {
                    elapsed,
                    iteration: expansions.max(1),
                    solution: Solution::from_joint_path(&path),
                }],
                status: Status::OptimalProven,
                iterations: expansions,
            });
        }
        if clock.exhausted(expansions) {
            exhausted = true;
            break;
        }
        expansions += 1;
        nodes.closed[node as usize] = true;
        let g = nodes.g[node as usize];
        current.clear();
        current.extend_from_slice(nodes.state(node));

        let mut since_poll = 0u32;
        let complete = for_each_successor(instance, &current, config.separation_mode, |prims, step| {
            since_poll += 1;
            if since_poll == POLL_EVERY {
                since_poll = 0;
                if clock.poll() || nodes.g.len() >= NODE_LIMIT {
                    return false;
                }
            }
            child.clear();
            child.extend(prims.iter().map(|p| p.to));
            let h = ctx.heuristic(&child);
            if !h.is_finite() {
                return true;
            }
            let ng = g + step;
            let key = JointState(child.clone());
            match lookup.get(&key) {
                Some(&id) => {
                    if nodes.closed[id as usize] || ng >= nodes.g[id as usize] {
                        return true;
                    }
                    nodes.g[id as usize] = ng;
                    nodes.parent[id as usize] = node;
                    open.push(&nodes, OpenEntry { f: ng + h, h, g: ng, node: id });
                }
                None => {
                    let id = nodes.push(&child, ng, node);
                    lookup.insert(key, id);
                    open.push(&nodes, OpenEntry { f: ng + h, h, g: ng, node: id });
                }
            }
            true
        });
        if !complete {
            // a half-expanded node cannot be closed soundly
            exhausted = true;
            break;
        }
    }

    Ok(AnytimeResult {
        solutions: Vec::new(),
        status: if exhausted { Status::BudgetExhausted } else { Status::InfeasibleProven },
        iterations: expansions,
    })
}

fn reconstruct(nodes: &Nodes, goal: u32, instance: &ProblemInstance) -> JointPath {
    let mut chain = Vec::new();
    let mut at = goal;
    while at != Nodes::NO_PARENT {
        chain.push(JointState::from_slice(nodes.state(at)));
        at = nodes.parent[at as usize];
    }
    chain.reverse();
    let duration = chain
        .windows(2)
        .map(|w| {
            instance
                .graph(0)
                .primitive_between(w[0][0], w[1][0])
                .map_or(0.0, |p| p.duration)
        })
        .sum();
    JointPath {
        states: chain,
        cost: nodes.g[goal as usize],
        duration,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MotionGraph;
    use crate::joint::validate_solution;
    use crate::planner::Budget;

    #[test]
    fn single_agent_manhattan() {
        let g = MotionGraph::grid(5, &[]).unwrap();
        let inst = ProblemInstance::shared(g, vec![0], vec![3], 0.8, 0).unwrap();
        let r = plan_ja(&inst, &PlannerConfig::default()).unwrap();
        assert_eq!(r.status, Status::OptimalProven);
        let best = &r.best().unwrap().solution;
        assert_eq!(best.total_cost, 3.0);
        assert!(validate_solution(&inst, best).is_valid());
    }

    #[test]
    fn swap_in_a_dead_end_corridor_is_infeasible() {
        // 3x3 grid keeping only the middle row
        let removed: Vec<(u32, u32)> = (0..3).flat_map(|x| [(x, 0), (x, 2)]).collect();
        let g = MotionGraph::grid(3, &removed).unwrap();
        let left = g.index_of(3).unwrap();
        let right = g.index_of(5).unwrap();
        let inst = ProblemInstance::shared(g, vec![left, right], vec![right, left], 0.8, 0).unwrap();
        let r = plan_ja(&inst, &PlannerConfig::default()).unwrap();
        assert_eq!(r.status, Status::InfeasibleProven);
        assert!(r.solutions.is_empty());
    }

    #[test]
    fn start_equals_goal() {
        let g = MotionGraph::grid(3, &[]).unwrap();
        let inst = ProblemInstance::shared(g, vec![0, 8], vec![0, 8], 0.8, 0).unwrap();
        let r = plan_ja(&inst, &PlannerConfig::default()).unwrap();
        assert_eq!(r.best().unwrap().solution.total_cost, 0.0);
        assert_eq!(r.status, Status::OptimalProven);
    }

    #[test]
    fn iteration_budget_stops_search() {
        let g = MotionGraph::grid(6, &[]).unwrap();
        let inst = ProblemInstance::shared(g, vec![0, 5], vec![35, 30], 0.8, 0).unwrap();
        let cfg = PlannerConfig { budget: Budget::Iterations(2), ..Default::default() };
        let r = plan_ja(&inst, &cfg).unwrap();
        assert_eq!(r.status, Status::BudgetExhausted);
        assert_eq!(r.iterations, 2);
    }
}
