use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::bench::svg::{line_chart, Chart, Series};
use crate::bench::{performance_curve, suboptimality, CurvePoint, RunRecord};
use crate::error::{Error, Result};
use crate::planner::{Algorithm, Status};
use crate::util::{median, write_atomic};

pub const TIMING_BOUNDARY_NOTE: &str = "Runtimes are measured from planner invocation to the moment a solution \
is recorded. They exclude instance generation or loading and the per-agent distance tables shared by all \
algorithms. Absolute values depend on hardware and are not comparable to other implementations.";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuboptimalityRow {
    pub grid_size: u32,
    pub agents: u32,
    pub instance_index: u32,
    pub instance_seed: u64,
    pub algorithm: Algorithm,
    pub optimal_cost: f64,
    pub first_cost: f64,
    pub best_cost: f64,
    /// Empty when undefined (zero optimum, nonzero cost).
    pub first_suboptimality_pct: Option<f64>,
    pub best_suboptimality_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub solved: usize,
    /// Over instances where JA proved optimality and this algorithm solved.
    pub suboptimality_instances: usize,
    pub median_first_suboptimality_pct: Option<f64>,
    pub median_best_suboptimality_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportSummary {
    pub algorithms: Vec<AlgorithmSummary>,
    pub curves: Vec<(Algorithm, Vec<CurvePoint>)>,
    pub suboptimality: Vec<SuboptimalityRow>,
    pub figures_written: bool,
}

impl ReportSummary {
    pub fn algorithm(&self, a: Algorithm) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|s| s.algorithm == a)
    }
}

#[derive(Serialize)]
struct SuccessRow {
    grid_size: u32,
    agents: u32,
    algorithm: Algorithm,
    instances: usize,
    solved: usize,
    success_rate: f64,
}

#[derive(Serialize)]
struct Metadata<'a> {
    timing_boundary: &'a str,
    records: usize,
    suite_ids: BTreeSet<&'a str>,
    config_digests: BTreeSet<&'a str>,
    suboptimality_population: &'a str,
    algorithms: &'a [AlgorithmSummary],
}

fn csv_bytes<T: Serialize>(header: &[&str], rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Writes curves, the success-rate and suboptimality tables, metadata and
/// (for non-empty input) the two SVG figures into `out_dir`.
pub fn report(records: &[RunRecord], out_dir: &Path) -> Result<ReportSummary> {
    for r in records {
        r.check()?;
    }
    std::fs::create_dir_all(out_dir)?;
    let present: Vec<Algorithm> = Algorithm::ALL
        .into_iter()
        .filter(|a| records.iter().any(|r| r.algorithm == *a))
        .collect();

    let mut curves = Vec::new();
    for &a in &present {
        let curve = performance_curve(records, a);
        write_atomic(
            &out_dir.join(format!("{a}_curve.csv")),
            &csv_bytes(&["index", "runtime_s"], &curve)?,
        )?;
        curves.push((a, curve));
    }

    let mut cells: BTreeMap<(u32, u32, usize), (usize, usize)> = BTreeMap::new();
    for r in records {
        let slot = Algorithm::ALL.iter().position(|&a| a == r.algorithm).expect("listed algorithm");
        let e = cells.entry((r.grid_size, r.agents, slot)).or_default();
        e.0 += 1;
        e.1 += r.solved() as usize;
    }
    let success: Vec<SuccessRow> = cells
        .into_iter()
        .map(|((grid_size, agents, slot), (instances, solved))| SuccessRow {
            grid_size,
            agents,
            algorithm: Algorithm::ALL[slot],
            instances,
            solved,
            success_rate: solved as f64 / instances as f64,
        })
        .collect();
    write_atomic(
        &out_dir.join("success_rates.csv"),
        &csv_bytes(&["grid_size", "agents", "algorithm", "instances", "solved", "success_rate"], &success)?,
    )?;

    let rows = suboptimality_rows(records)?;
    write_atomic(
        &out_dir.join("suboptimality.csv"),
        &csv_bytes(
            &[
                "grid_size",
                "agents",
                "instance_index",
                "instance_seed",
                "algorithm",
                "optimal_cost",
                "first_cost",
                "best_cost",
                "first_suboptimality_pct",
                "best_suboptimality_pct",
            ],
            &rows,
        )?,
    )?;

    let algorithms: Vec<AlgorithmSummary> = present
        .iter()
        .map(|&a| {
            let mine: Vec<&SuboptimalityRow> = rows.iter().filter(|r| r.algorithm == a).collect();
            let firsts: Vec<f64> = mine.iter().filter_map(|r| r.first_suboptimality_pct).collect();
            let bests: Vec<f64> = mine.iter().filter_map(|r| r.best_suboptimality_pct).collect();
            AlgorithmSummary {
                algorithm: a,
                runs: records.iter().filter(|r| r.algorithm == a).count(),
                solved: records.iter().filter(|r| r.algorithm == a && r.solved()).count(),
                suboptimality_instances: mine.len(),
                median_first_suboptimality_pct: median(&firsts),
                median_best_suboptimality_pct: median(&bests),
            }
        })
        .collect();
    write_atomic(
        &out_dir.join("suboptimality_summary.csv"),
        &csv_bytes(
            &[
                "algorithm",
                "runs",
                "solved",
                "suboptimality_instances",
                "median_first_suboptimality_pct",
                "median_best_suboptimality_pct",
            ],
            &algorithms,
        )?,
    )?;

    let meta = Metadata {
        timing_boundary: TIMING_BOUNDARY_NOTE,
        records: records.len(),
        suite_ids: records.iter().map(|r| r.suite_id.as_str()).collect(),
        config_digests: records.iter().map(|r| r.config_digest.as_str()).collect(),
        suboptimality_population: "instances on which ja finished with status optimal_proven",
        algorithms: &algorithms,
    };
    let mut meta_text = serde_json::to_string_pretty(&meta)?;
    meta_text.push('\n');
    write_atomic(&out_dir.join("metadata.json"), meta_text.as_bytes())?;

    let figures_written = !records.is_empty();
    if figures_written {
        write_atomic(&out_dir.join("performance_curve.svg"), curve_figure(&curves).as_bytes())?;
        write_atomic(&out_dir.join("suboptimality.svg"), suboptimality_figure(&rows).as_bytes())?;
    }

    Ok(ReportSummary {
        algorithms,
        curves,
        suboptimality: rows,
        figures_written,
    })
}

/// First and best suboptimality of each anytime run, against JA's proven
/// optimum on the same instance.
fn suboptimality_rows(records: &[RunRecord]) -> Result<Vec<SuboptimalityRow>> {
    let optimum: BTreeMap<_, f64> = records
        .iter()
        .filter(|r| r.algorithm == Algorithm::Ja && r.status == Status::OptimalProven)
        .filter_map(|r| r.best_cost.map(|c| (r.instance_key(), c)))
        .collect();
    let mut rows = Vec::new();
    for r in records.iter().filter(|r| r.algorithm != Algorithm::Ja) {
        let (Some(&opt), Some(first), Some(best)) = (optimum.get(&r.instance_key()), r.first_cost, r.best_cost) else {
            continue;
        };
        rows.push(SuboptimalityRow {
            grid_size: r.grid_size,
            agents: r.agents,
            instance_index: r.instance_index,
            instance_seed: r.instance_seed,
            algorithm: r.algorithm,
            optimal_cost: opt,
            first_cost: first,
            best_cost: best,
            first_suboptimality_pct: suboptimality(first, opt)?,
            best_suboptimality_pct: suboptimality(best, opt)?,
        });
    }
    Ok(rows)
}

fn curve_figure(curves: &[(Algorithm, Vec<CurvePoint>)]) -> String {
    let series = curves
        .iter()
        .map(|(a, c)| Series {
            label: a.to_string(),
            points: c.iter().map(|p| (p.index as f64, p.runtime_s)).collect(),
            dashed: false,
            colour: Algorithm::ALL.iter().position(|x| x == a).unwrap_or(0),
        })
        .collect();
    line_chart(&Chart {
        title: "First-solution performance curve".into(),
        x_label: "instance index (sorted by runtime)".into(),
        y_label: "runtime to first solution [s]".into(),
        series,
        steps: true,
    })
}

fn suboptimality_figure(rows: &[SuboptimalityRow]) -> String {
    let mut series = Vec::new();
    for (slot, a) in Algorithm::ALL.into_iter().enumerate().skip(1) {
        let mine: Vec<&SuboptimalityRow> = rows.iter().filter(|r| r.algorithm == a).collect();
        let agents: BTreeSet<u32> = mine.iter().map(|r| r.agents).collect();
        for (best, label) in [(false, "first"), (true, "best")] {
            let points = agents
                .iter()
                .filter_map(|&n| {
                    let vals: Vec<f64> = mine
                        .iter()
                        .filter(|r| r.agents == n)
                        .filter_map(|r| if best { r.best_suboptimality_pct } else { r.first_suboptimality_pct })
                        .collect();
                    median(&vals).map(|m| (n as f64, m))
                })
                .collect();
            series.push(Series {
                label: format!("{a} {label}"),
                points,
                dashed: !best,
                colour: slot,
            });
        }
    }
    line_chart(&Chart {
        title: "Solution quality".into(),
        x_label: "number of agents".into(),
        y_label: "median suboptimality [%]".into(),
        series,
        steps: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(agents: u32, index: u32, alg: Algorithm, status: Status, first: Option<(f64, f64)>, best: Option<f64>) -> RunRecord {
        RunRecord {
            suite_id: "s".into(),
            grid_size: 10,
            agents,
            instance_index: index,
            instance_seed: index as u64,
            algorithm: alg,
            status,
            iterations: 1,
            first_solution_time_s: first.map(|f| f.0),
            first_cost: first.map(|f| f.1),
            best_cost: best,
            config_digest: "c".into(),
        }
    }

    #[test]
    fn empty_records_give_empty_tables_and_no_figures() {
        let dir = tempfile::tempdir().unwrap();
        let s = report(&[], dir.path()).unwrap();
        assert!(!s.figures_written);
        assert!(s.algorithms.is_empty());
        let rates = std::fs::read_to_string(dir.path().join("success_rates.csv")).unwrap();
        assert_eq!(rates.lines().count(), 1);
        assert!(!dir.path().join("performance_curve.svg").exists());
        assert!(dir.path().join("metadata.json").exists());
    }

    #[test]
    fn tables_and_medians() {
        use Algorithm::*;
        use Status::*;
        let recs = vec![
            rec(1, 0, Ja, OptimalProven, Some((0.1, 10.0)), Some(10.0)),
            rec(1, 0, IsMaRrtStar, BudgetExhausted, Some((0.2, 12.0)), Some(10.0)),
            rec(2, 1, Ja, BudgetExhausted, None, None),
            rec(2, 1, IsMaRrtStar, BudgetExhausted, Some((0.3, 30.0)), Some(25.0)),
        ];
        let dir = tempfile::tempdir().unwrap();
        let s = report(&recs, dir.path()).unwrap();
        let is = s.algorithm(IsMaRrtStar).unwrap();
        assert_eq!((is.runs, is.solved, is.suboptimality_instances), (2, 2, 1));
        assert_eq!(is.median_first_suboptimality_pct, Some(20.0));
        assert_eq!(is.median_best_suboptimality_pct, Some(0.0));
        assert_eq!(s.algorithm(Ja).unwrap().solved, 1);
        assert!(s.figures_written);
        for f in ["ja_curve.csv", "ismarrtstar_curve.csv", "performance_curve.svg", "suboptimality.svg"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let curve = std::fs::read_to_string(dir.path().join("ismarrtstar_curve.csv")).unwrap();
        assert_eq!(curve, "index,runtime_s\n1,0.2\n2,0.3\n");
    }

    #[test]
    fn cost_below_optimum_is_an_error() {
        use Algorithm::*;
        let recs = vec![
            rec(1, 0, Ja, Status::OptimalProven, Some((0.1, 10.0)), Some(10.0)),
            rec(1, 0, MaRrtStar, Status::BudgetExhausted, Some((0.2, 9.0)), Some(9.0)),
        ];
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(report(&recs, dir.path()), Err(Error::CostBelowOptimal { .. })));
    }
}
