//! The planners: optimal A* in the joint-state space (JA), and graph RRT*
//! over the joint-state space (MA-RRT*) with an optional informed sampler
//! (isMA-RRT*). All share [`PlannerConfig`] and return an [`AnytimeResult`].

mod greedy;
mod index;
mod ja;
mod rrt;
mod sampler;
mod single;
mod tree;

pub use greedy::{greedy_connect, greedy_connect_with, ConnectFailure, FailureReason, GreedyOptions};
pub use index::{JointIndex, JointMetric};
pub use ja::{plan_ja, plan_ja_with};
pub use rrt::{plan_marrtstar, plan_marrtstar_with};
pub use sampler::{sample_joint_state, Sampler, SamplingMode};
pub use single::single_agent_optimal_path;
pub use tree::{near, near_radius, nearest, rewire_cost_propagation, SearchTree, TreeVertex};

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{distance_table, DistanceTable, ProblemInstance};
use crate::joint::{SeparationMode, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// Wall-clock seconds from planner invocation.
    Seconds(f64),
    /// Iterations (RRT* samples, or A* expansions).
    Iterations(u64),
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Seconds(s) => write!(f, "{s}s"),
            Budget::Iterations(k) => write!(f, "{k} iterations"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Maximum greedy extension length, in joint steps. Also sets the
    /// near-radius cap of `eta` grid steps.
    pub eta: u32,
    /// Near-radius scale.
    pub gamma: f64,
    pub goal_bias: f64,
    pub informed_bias: f64,
    /// Tube radius around single-agent optimal paths, in meters.
    pub informed_radius: f64,
    pub rng_seed: u64,
    pub budget: Budget,
    pub metric: JointMetric,
    /// Alternative joint moves a greedy step may try after a conflict.
    pub greedy_alternatives: u32,
    pub separation_mode: SeparationMode,
    /// Verify search-tree invariants every this many iterations.
    pub check_every: Option<u64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            eta: 10,
            gamma: 20.0,
            goal_bias: 0.05,
            informed_bias: 0.5,
            informed_radius: 2.0,
            rng_seed: 0,
            budget: Budget::Seconds(2.5),
            metric: JointMetric::Sum,
            greedy_alternatives: 0,
            separation_mode: SeparationMode::Continuous,
            check_every: None,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if self.eta == 0 {
            return bad("eta must be positive".into());
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        for (name, p) in [("goal_bias", self.goal_bias), ("informed_bias", self.informed_bias)] {
            if !(p.is_finite() && (0.0..1.0).contains(&p)) {
                return bad(format!("{name} must lie in [0, 1), got {p}"));
            }
        }
        if self.goal_bias + self.informed_bias > 1.0 {
            return bad("goal_bias + informed_bias must not exceed 1".into());
        }
        if !(self.informed_radius.is_finite() && self.informed_radius >= 0.0) {
            return bad(format!("informed_radius must be non-negative, got {}", self.informed_radius));
        }
        match self.budget {
            Budget::Seconds(s) if !(s.is_finite() && s > 0.0) => bad(format!("time budget must be positive, got {s}")),
            Budget::Iterations(0) => bad("iteration budget must be positive".into()),
            _ => Ok(()),
        }
    }

    pub(crate) fn greedy_options(&self) -> GreedyOptions {
        GreedyOptions {
            mode: self.separation_mode,
            alternatives: self.greedy_alternatives,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    OptimalProven,
    BudgetExhausted,
    InfeasibleProven,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::OptimalProven => "optimal_proven",
            Status::BudgetExhausted => "budget_exhausted",
            Status::InfeasibleProven => "infeasible_proven",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal_proven" => Ok(Status::OptimalProven),
            "budget_exhausted" => Ok(Status::BudgetExhausted),
            "infeasible_proven" => Ok(Status::InfeasibleProven),
            other => Err(Error::InvalidParameters(format!("unknown status `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimedSolution {
    pub elapsed: Duration,
    /// 1-based iteration during which the solution was found.
    pub iteration: u64,
    pub solution: Solution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnytimeResult {
    /// Time-ordered, with strictly decreasing cost.
    pub solutions: Vec<TimedSolution>,
    pub status: Status,
    pub iterations: u64,
}

impl AnytimeResult {
    pub fn first(&self) -> Option<&TimedSolution> {
        self.solutions.first()
    }

    pub fn best(&self) -> Option<&TimedSolution> {
        self.solutions.last()
    }

    pub fn costs_strictly_decrease(&self) -> bool {
        self.solutions
            .windows(2)
            .all(|w| w[1].solution.total_cost < w[0].solution.total_cost)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ja,
    MaRrtStar,
    IsMaRrtStar,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ja, Algorithm::MaRrtStar, Algorithm::IsMaRrtStar];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ja => "ja",
            Algorithm::MaRrtStar => "marrtstar",
            Algorithm::IsMaRrtStar => "ismarrtstar",
        }
    }

    pub fn plan(self, ctx: &PlanningContext<'_>, config: &PlannerConfig) -> Result<AnytimeResult> {
        match self {
            Algorithm::Ja => plan_ja_with(ctx, config),
            Algorithm::MaRrtStar => plan_marrtstar_with(ctx, config, false),
            Algorithm::IsMaRrtStar => plan_marrtstar_with(ctx, config, true),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// Per-instance data shared by all planners and computed before any planner
/// clock starts: one distance-to-destination table per agent.
#[derive(Clone, Debug)]
pub struct PlanningContext<'a> {
    pub instance: &'a ProblemInstance,
    pub tables: Vec<DistanceTable>,
}

impl<'a> PlanningContext<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Result<Self> {
        instance.validate()?;
        let tables = (0..instance.n_agents())
            .map(|i| distance_table(instance.graph(i), instance.destinations()[i]))
            .collect::<Result<Vec<_>>>()?;
        Ok(PlanningContext { instance, tables })
    }

    /// Σ_i shortest single-agent arrival time; no joint plan costs less.
    pub fn lower_bound(&self) -> f64 {
        self.instance
            .starts()
            .iter()
            .zip(&self.tables)
            .map(|(&s, t)| t.get(s))
            .sum()
    }

    #[inline]
    pub(crate) fn heuristic(&self, state: &[u32]) -> f64 {
        state.iter().zip(&self.tables).map(|(&w, t)| t.get(w)).sum()
    }
}

/// Monotonic wall-clock or iteration budget; wall-clock is only sampled every
/// [`BudgetClock::CHECK_INTERVAL`] iterations.
pub(crate) struct BudgetClock {
    start: Instant,
    budget: Budget,
    expired: bool,
}

impl BudgetClock {
    pub const CHECK_INTERVAL: u64 = 64;

    pub fn start(budget: Budget) -> Self {
        BudgetClock {
            start: Instant::now(),
            budget,
            expired: false,
        }
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    /// Called with the number of completed iterations before starting the next.
    pub fn exhausted(&mut self, completed: u64) -> bool {
        if self.expired {
            return true;
        }
        self.expired = match self.budget {
            Budget::Iterations(k) => completed >= k,
            Budget::Seconds(s) => {
                completed.is_multiple_of(Self::CHECK_INTERVAL) && self.start.elapsed().as_secs_f64() >= s
            }
        };
        self.expired
    }

    /// Reads the wall clock regardless of the iteration count. For work
    /// inside a single iteration that can itself outlast the budget.
    pub fn poll(&mut self) -> bool {
        if let Budget::Seconds(s) = self.budget {
            self.expired |= self.start.elapsed().as_secs_f64() >= s;
        }
        self.expired
    }

    /// Whether a result found at `elapsed` still counts as within budget.
    pub fn within(&self, elapsed: Duration) -> bool {
        match self.budget {
            Budget::Iterations(_) => true,
            Budget::Seconds(s) => elapsed.as_secs_f64() <= s,
        }
    }
}
