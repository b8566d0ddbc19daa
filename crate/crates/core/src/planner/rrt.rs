//! Graph RRT* over the joint-state space. With one agent this is plain graph
//! RRT*; with `informed` set, sampling is biased toward tubes around the
//! agents' individual optimal paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::ProblemInstance;
use crate::joint::{JointPath, JointState, Solution};
use crate::planner::greedy::greedy_walk;
use crate::planner::{
    greedy_connect_with, near, near_radius, nearest, single_agent_optimal_path, AnytimeResult, BudgetClock,
    GreedyOptions, PlannerConfig, PlanningContext, Sampler, SamplingMode, SearchTree, Status, TimedSolution,
};

pub fn plan_marrtstar(instance: &ProblemInstance, config: &PlannerConfig, informed: bool) -> Result<AnytimeResult> {
    let ctx = PlanningContext::new(instance)?;
    plan_marrtstar_with(&ctx, config, informed)
}

/// Runs until the budget is spent, or stops early with `optimal_proven` once
/// the best solution meets the per-agent lower bound.
pub fn plan_marrtstar_with(ctx: &PlanningContext<'_>, config: &PlannerConfig, informed: bool) -> Result<AnytimeResult> {
    config.validate()?;
    let mut clock = BudgetClock::start(config.budget);
    let instance = ctx.instance;
    let start = JointState::starts(instance);
    let goal = JointState::destinations(instance);
    let lower_bound = ctx.lower_bound();

    if !start.is_separated(instance) || !goal.is_separated(instance) || !lower_bound.is_finite() {
        return Ok(AnytimeResult {
            solutions: Vec::new(),
            status: Status::InfeasibleProven,
            iterations: 0,
        });
    }

    let sampler = if informed {
        let paths = (0..instance.n_agents())
            .map(|i| single_agent_optimal_path(instance.graph(i), start[i], goal[i]))
            .collect::<Result<Vec<_>>>()?;
        Sampler::new(instance, config, SamplingMode::Informed, Some(&paths))?
    } else {
        Sampler::new(instance, config, SamplingMode::Uniform, None)?
    };

    let mut grower = Grower {
        instance,
        speeds: (0..instance.n_agents()).map(|i| instance.graph(i).max_speed()).collect(),
        tree: SearchTree::new(instance, start, config.metric),
        eta: config.eta,
        gamma: config.gamma,
        options: config.greedy_options(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut solutions: Vec<TimedSolution> = Vec::new();
    let mut best = f64::INFINITY;
    let mut iterations: u64 = 0;
    let mut status = Status::BudgetExhausted;

    while !clock.exhausted(iterations) {
        iterations += 1;
        let x = sampler.sample(instance, &mut rng);
        grower.extend(&x)?;

        if let Some(gv) = grower.tree.find(&goal) {
            let cost = grower.tree.vertex(gv)?.cost_from_root;
            if cost < best {
                let elapsed = clock.elapsed();
                if !clock.within(elapsed) {
                    break;
                }
                let path = grower.tree.path_to(gv)?;
                best = cost;
                solutions.push(TimedSolution {
                    elapsed,
                    iteration: iterations,
                    solution: Solution::from_joint_path(&path),
                });
            }
        }
        if let Some(k) = config.check_every {
            if k > 0 && iterations.is_multiple_of(k) {
                grower.tree.check_invariants()?;
            }
        }
        if best <= lower_bound {
            status = Status::OptimalProven;
            break;
        }
    }

    Ok(AnytimeResult {
        solutions,
        status,
        iterations,
    })
}

struct Grower<'a> {
    instance: &'a ProblemInstance,
    speeds: Vec<f64>,
    tree: SearchTree,
    eta: u32,
    gamma: f64,
    options: GreedyOptions,
}

impl Grower<'_> {
    fn connect_limit(&self) -> usize {
        2 * self.eta as usize
    }

    fn cost(&self, v: usize) -> f64 {
        self.tree.vertices()[v].cost_from_root
    }

    fn state(&self, v: usize) -> &JointState {
        &self.tree.vertices()[v].state
    }

    /// No joint path from `a` to `b` costs less: every agent has to cover
    /// its straight-line displacement, and only waits at a destination are free.
    fn connection_bound(&self, a: &JointState, b: &JointState) -> f64 {
        (0..a.arity())
            .map(|i| {
                let g = self.instance.graph(i);
                let d = g.position(a[i]).distance(g.position(b[i]));
                if d == 0.0 {
                    0.0
                } else {
                    d / self.speeds[i]
                }
            })
            .sum()
    }

    /// One RRT* iteration toward the sample `x`.
    fn extend(&mut self, x: &JointState) -> Result<()> {
        let instance = self.instance;
        let x_near = nearest(&self.tree, instance, x)?;
        let walk = greedy_walk(instance, self.state(x_near), x, self.eta as usize, self.options);
        if walk.path.steps() == 0 && walk.stopped.is_some() {
            return Ok(());
        }
        let x_new = walk.path.end().clone();
        let radius = near_radius(self.tree.len(), instance.n_agents(), self.eta, self.gamma);
        let near_set = near(&self.tree, instance, &x_new, radius)?;

        let target = match self.tree.find(&x_new) {
            None => {
                let (parent, edge) = self.choose_parent(x_near, walk.path, &near_set, &x_new, None);
                self.tree.insert(instance, parent, edge)?
            }
            Some(existing) => {
                let (parent, edge) = self.choose_parent(x_near, walk.path, &near_set, &x_new, Some(existing));
                if Some(parent) != self.tree.vertices()[existing].parent && parent != existing {
                    self.tree.reparent(existing, parent, edge)?;
                }
                existing
            }
        };
        self.rewire(target, &near_set)
    }

    /// Cheapest feasible parent for `x_new` among the nearest vertex (with
    /// its already-walked path) and the near set. For an existing vertex,
    /// its current parent is the incumbent and vertices in its subtree are
    /// skipped.
    fn choose_parent(
        &self,
        x_near: usize,
        walked: JointPath,
        near_set: &[usize],
        x_new: &JointState,
        existing: Option<usize>,
    ) -> (usize, JointPath) {
        let mut best: Option<(usize, JointPath, f64)> = None;
        let mut bound = f64::INFINITY;
        if let Some(e) = existing {
            bound = self.cost(e);
            if let Some(p) = self.tree.vertices()[e].parent {
                best = Some((p, self.tree.vertices()[e].edge.clone(), bound));
            }
        }
        let admissible = |v: usize| existing.is_none_or(|e| !self.tree.is_ancestor(e, v));

        if admissible(x_near) {
            let c = self.cost(x_near) + walked.cost;
            if c < bound {
                bound = c;
                best = Some((x_near, walked, c));
            }
        }
        for &v in near_set {
            if v == x_near || self.cost(v) + self.connection_bound(self.state(v), x_new) >= bound || !admissible(v) {
                continue;
            }
            if let Ok(edge) = greedy_connect_with(self.instance, self.state(v), x_new, self.connect_limit(), self.options)
            {
                let c = self.cost(v) + edge.cost;
                if c < bound {
                    bound = c;
                    best = Some((v, edge, c));
                }
            }
        }
        match best {
            Some((p, e, _)) => (p, e),
            // only reachable for the root, which keeps itself
            None => (existing.unwrap_or(x_near), JointPath::empty(x_new.clone())),
        }
    }

    fn rewire(&mut self, u: usize, near_set: &[usize]) -> Result<()> {
        for &v in near_set {
            if v == u || v == SearchTree::ROOT {
                continue;
            }
            let cu = self.cost(u);
            if cu + self.connection_bound(self.state(u), self.state(v)) >= self.cost(v) || self.tree.is_ancestor(v, u) {
                continue;
            }
            let Ok(edge) = greedy_connect_with(self.instance, self.state(u), self.state(v), self.connect_limit(), self.options)
            else {
                continue;
            };
            if cu + edge.cost < self.cost(v) {
                self.tree.reparent(v, u, edge)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_grid_instance, MotionGraph};
    use crate::joint::validate_solution;
    use crate::planner::{plan_ja, Budget};

    fn iters(k: u64) -> PlannerConfig {
        PlannerConfig {
            budget: Budget::Iterations(k),
            check_every: Some(1),
            ..Default::default()
        }
    }

    #[test]
    fn start_equal_to_goal_is_solved_at_once() {
        let g = MotionGraph::grid(4, &[]).unwrap();
        let inst = ProblemInstance::shared(g, vec![0, 15], vec![0, 15], 0.8, 0).unwrap();
        let r = plan_marrtstar(&inst, &iters(100), false).unwrap();
        let first = r.first().unwrap();
        assert_eq!(first.solution.total_cost, 0.0);
        assert_eq!(first.iteration, 1);
        assert_eq!(r.status, Status::OptimalProven);
    }

    #[test]
    fn single_agent_reaches_optimum() {
        let g = MotionGraph::grid(10, &[]).unwrap();
        let inst = ProblemInstance::shared(g, vec![0], vec![99], 0.8, 0).unwrap();
        let r = plan_marrtstar(&inst, &iters(20_000), false).unwrap();
        assert_eq!(r.best().unwrap().solution.total_cost, 18.0);
        assert!(r.costs_strictly_decrease());
    }

    #[test]
    fn solutions_are_valid_and_above_the_bound() {
        for seed in 0..6 {
            let inst = generate_grid_instance(10, 3, 0.1, 0.8, seed).unwrap();
            let ctx = PlanningContext::new(&inst).unwrap();
            for informed in [false, true] {
                let cfg = PlannerConfig { rng_seed: seed, ..iters(1500) };
                let r = plan_marrtstar_with(&ctx, &cfg, informed).unwrap();
                assert!(r.costs_strictly_decrease());
                for s in &r.solutions {
                    assert!(validate_solution(&inst, &s.solution).is_valid());
                    assert!(s.solution.total_cost >= ctx.lower_bound());
                }
            }
        }
    }

    #[test]
    fn deterministic_under_iteration_budget() {
        let inst = generate_grid_instance(10, 2, 0.1, 0.8, 4).unwrap();
        let cfg = PlannerConfig { rng_seed: 11, ..iters(800) };
        let a = plan_marrtstar(&inst, &cfg, true).unwrap();
        let b = plan_marrtstar(&inst, &cfg, true).unwrap();
        let strip = |r: &AnytimeResult| {
            r.solutions.iter().map(|s| (s.iteration, s.solution.clone())).collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn never_beats_ja() {
        let inst = generate_grid_instance(10, 2, 0.1, 0.8, 8).unwrap();
        let opt = plan_ja(&inst, &PlannerConfig::default()).unwrap().best().unwrap().solution.total_cost;
        let r = plan_marrtstar(&inst, &iters(3000), true).unwrap();
        for s in &r.solutions {
            assert!(s.solution.total_cost >= opt);
        }
    }
}
