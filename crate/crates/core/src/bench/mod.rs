//! Benchmark pipeline: seeded instance suites, budgeted runs of every
//! planner on every instance, and the derived curves and tables.

mod curve;
mod records;
mod report;
mod runner;
mod svg;

pub use curve::{performance_curve, runtime_curve, suboptimality, CurvePoint, SUBOPTIMALITY_TOLERANCE};
pub use records::{read_records, write_records, RecordWriter, RunRecord};
pub use report::{report, ReportSummary, TIMING_BOUNDARY_NOTE};
pub use runner::{config_digest, run_benchmark, run_seed, BenchConfig};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate_grid_instance, io, ProblemInstance};
use crate::util::{combine_seed, short_digest, write_atomic};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub grid_sizes: Vec<u32>,
    pub agent_counts: Vec<u32>,
    pub instances_per_cell: u32,
    pub obstacle_ratio: f64,
    pub separation: f64,
    pub base_seed: u64,
}

impl SuiteSpec {
    /// {10, 30, 50} × 1–6 agents × 20 instances.
    pub fn desk_scale() -> Self {
        SuiteSpec {
            grid_sizes: vec![10, 30, 50],
            agent_counts: (1..=6).collect(),
            instances_per_cell: 20,
            obstacle_ratio: 0.1,
            separation: 0.8,
            base_seed: 0,
        }
    }

    /// {10, 30, 50, 70, 90} × 1–10 agents × 120 instances.
    pub fn full_scale() -> Self {
        SuiteSpec {
            grid_sizes: vec![10, 30, 50, 70, 90],
            agent_counts: (1..=10).collect(),
            instances_per_cell: 120,
            ..Self::desk_scale()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameters(m.into()));
        if self.grid_sizes.is_empty() || self.agent_counts.is_empty() {
            return bad("grid sizes and agent counts must be non-empty");
        }
        if self.grid_sizes.contains(&0) || self.agent_counts.contains(&0) || self.instances_per_cell == 0 {
            return bad("sizes and counts must be positive");
        }
        if !(0.0..1.0).contains(&self.obstacle_ratio) {
            return bad("obstacle ratio must lie in [0, 1)");
        }
        if !(self.separation.is_finite() && self.separation > 0.0) {
            return bad("separation must be positive");
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grid_sizes.len() * self.agent_counts.len() * self.instances_per_cell as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Short content hash identifying the suite.
    pub fn suite_id(&self) -> String {
        short_digest(&serde_json::to_vec(self).expect("suite spec serializes"))
    }

    /// Cell coordinates in canonical order: size, then agents, then index.
    pub fn ids(&self) -> Vec<InstanceId> {
        let mut out = Vec::with_capacity(self.len());
        for &size in &self.grid_sizes {
            for &agents in &self.agent_counts {
                for index in 0..self.instances_per_cell {
                    out.push(InstanceId {
                        size,
                        agents,
                        index,
                        seed: combine_seed(&[self.base_seed, size as u64, agents as u64, index as u64]),
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceId {
    pub size: u32,
    pub agents: u32,
    pub index: u32,
    pub seed: u64,
}

impl InstanceId {
    pub fn file_name(&self) -> String {
        format!("s{}_a{}_i{:03}.json", self.size, self.agents, self.index)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteInstance {
    pub id: InstanceId,
    pub instance: ProblemInstance,
}

/// Generates every instance of `spec`, in canonical order.
pub fn build_suite(spec: &SuiteSpec) -> Result<Vec<SuiteInstance>> {
    spec.validate()?;
    let make = |id: InstanceId| -> Result<SuiteInstance> {
        generate_grid_instance(id.size, id.agents as usize, spec.obstacle_ratio, spec.separation, id.seed)
            .map(|instance| SuiteInstance { id, instance })
            .map_err(|e| Error::Cell {
                size: id.size,
                agents: id.agents,
                index: id.index,
                source: Box::new(e),
            })
    };
    let ids = spec.ids();
    #[cfg(feature = "parallel")]
    let built = ids.into_par_iter().map(make).collect();
    #[cfg(not(feature = "parallel"))]
    let built = ids.into_iter().map(make).collect();
    built
}

/// Writes one JSON file per instance into `dir`.
pub fn save_suite(suite: &[SuiteInstance], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for s in suite {
        let text = io::save_instance(&s.instance)?;
        write_atomic(&dir.join(s.id.file_name()), text.as_bytes())?;
    }
    Ok(())
}
