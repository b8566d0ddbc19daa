use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::bench::{write_records, RecordWriter, RunRecord, SuiteInstance, SuiteSpec};
use crate::error::{Error, Result};
use crate::joint::validate_solution;
use crate::planner::{AnytimeResult, Algorithm, PlannerConfig, PlanningContext};
use crate::util::{combine_seed, short_digest};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub suite: SuiteSpec,
    pub algorithms: Vec<Algorithm>,
    /// Shared by all runs; `rng_seed` is mixed with each run's identity.
    pub planner: PlannerConfig,
    /// Concurrent runs. Values above 1 need the `parallel` feature.
    pub parallelism: usize,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        self.suite.validate()?;
        self.planner.validate()?;
        if self.algorithms.is_empty() {
            return Err(Error::InvalidParameters("no algorithms selected".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidParameters("parallelism must be at least 1".into()));
        }
        Ok(())
    }
}

/// Digest of everything that determines the non-timing record columns.
/// Parallelism is deliberately left out.
pub fn config_digest(config: &BenchConfig) -> String {
    #[derive(Serialize)]
    struct Digested<'a> {
        suite: &'a SuiteSpec,
        algorithms: &'a [Algorithm],
        planner: &'a PlannerConfig,
    }
    let doc = Digested {
        suite: &config.suite,
        algorithms: &config.algorithms,
        planner: &config.planner,
    };
    short_digest(&serde_json::to_vec(&doc).expect("bench config serializes"))
}

/// RNG seed of one run, a function of the configured seed, the instance seed
/// and the algorithm only.
pub fn run_seed(base: u64, instance_seed: u64, algorithm: Algorithm) -> u64 {
    let tag = Algorithm::ALL.iter().position(|&a| a == algorithm).expect("listed algorithm") as u64;
    combine_seed(&[base, instance_seed, tag])
}

/// Runs every algorithm on every instance. Each emitted solution is checked
/// by the validator; an invalid one aborts with a soundness error. When
/// `sink` is given, records are appended there as runs finish and the file
/// is rewritten in canonical order at the end.
pub fn run_benchmark(suite: &[SuiteInstance], config: &BenchConfig, sink: Option<&Path>) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let suite_id = config.suite.suite_id();
    let digest = config_digest(config);
    let writer = sink.map(RecordWriter::create).transpose()?.map(Mutex::new);

    let jobs: Vec<(&SuiteInstance, Algorithm)> = suite
        .iter()
        .flat_map(|s| config.algorithms.iter().map(move |&a| (s, a)))
        .collect();

    let run = |&(s, algorithm): &(&SuiteInstance, Algorithm)| -> Result<RunRecord> {
        let ctx = PlanningContext::new(&s.instance)?;
        let planner = PlannerConfig {
            rng_seed: run_seed(config.planner.rng_seed, s.id.seed, algorithm),
            ..config.planner.clone()
        };
        let result = algorithm.plan(&ctx, &planner)?;
        audit(&ctx, &result, s, algorithm)?;
        let record = RunRecord {
            suite_id: suite_id.clone(),
            grid_size: s.id.size,
            agents: s.id.agents,
            instance_index: s.id.index,
            instance_seed: s.id.seed,
            algorithm,
            status: result.status,
            iterations: result.iterations,
            first_solution_time_s: result.first().map(|f| f.elapsed.as_secs_f64()),
            first_cost: result.first().map(|f| f.solution.total_cost),
            best_cost: result.best().map(|b| b.solution.total_cost),
            config_digest: digest.clone(),
        };
        if let Some(w) = &writer {
            w.lock().expect("record writer poisoned").write(&record)?;
        }
        Ok(record)
    };

    let records = execute(&jobs, config.parallelism, run)?;
    if let Some(path) = sink {
        drop(writer);
        write_records(path, &records)?;
    }
    Ok(records)
}

#[cfg(feature = "parallel")]
fn execute<J, F>(jobs: &[J], parallelism: usize, run: F) -> Result<Vec<RunRecord>>
where
    J: Sync,
    F: Fn(&J) -> Result<RunRecord> + Sync,
{
    if parallelism <= 1 {
        return jobs.iter().map(run).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;
    pool.install(|| jobs.par_iter().map(&run).collect())
}

#[cfg(not(feature = "parallel"))]
fn execute<J, F>(jobs: &[J], _parallelism: usize, run: F) -> Result<Vec<RunRecord>>
where
    F: Fn(&J) -> Result<RunRecord>,
{
    jobs.iter().map(run).collect()
}

fn audit(ctx: &PlanningContext<'_>, result: &AnytimeResult, s: &SuiteInstance, algorithm: Algorithm) -> Result<()> {
    let tag = || format!("{algorithm} on {}", s.id.file_name());
    if !result.costs_strictly_decrease() {
        return Err(Error::Soundness(format!("{}: solution costs do not strictly decrease", tag())));
    }
    let bound = ctx.lower_bound();
    for t in &result.solutions {
        let verdict = validate_solution(&s.instance, &t.solution);
        if !verdict.is_valid() {
            let reasons: Vec<String> = verdict.violations().iter().map(|v| v.to_string()).collect();
            return Err(Error::Soundness(format!("{}: {}", tag(), reasons.join("; "))));
        }
        if t.solution.total_cost < bound - 1e-9 {
            return Err(Error::Soundness(format!(
                "{}: cost {} below the lower bound {bound}",
                tag(),
                t.solution.total_cost
            )));
        }
    }
    Ok(())
}
