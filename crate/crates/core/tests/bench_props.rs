use coop_planner::bench::{
    build_suite, read_records, report, run_benchmark, runtime_curve, suboptimality, BenchConfig, RunRecord, SuiteSpec,
};
use coop_planner::planner::{Algorithm, Budget, PlannerConfig};
use coop_planner::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn curves_are_monotone_and_count_solved(runtimes in prop::collection::vec(prop::option::of(0.0f64..10.0), 0..60)) {
        let curve = runtime_curve(&runtimes);
        let solved = runtimes.iter().flatten().count();
        prop_assert_eq!(curve.len(), solved);
        for (k, p) in curve.iter().enumerate() {
            prop_assert_eq!(p.index, k + 1);
        }
        for w in curve.windows(2) {
            prop_assert!(w[0].runtime_s <= w[1].runtime_s);
        }
        let mut expected: Vec<f64> = runtimes.iter().flatten().copied().collect();
        expected.sort_by(f64::total_cmp);
        let got: Vec<f64> = curve.iter().map(|p| p.runtime_s).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn suboptimality_is_non_negative(opt in 1u32..200, extra in 0u32..200) {
        let s = suboptimality((opt + extra) as f64, opt as f64).unwrap().unwrap();
        prop_assert!(s >= 0.0);
        prop_assert_eq!(s == 0.0, extra == 0);
    }

    #[test]
    fn cost_below_optimum_is_rejected(opt in 2u32..200, short in 1u32..2) {
        let r = suboptimality((opt - short) as f64, opt as f64);
        prop_assert!(matches!(r, Err(Error::CostBelowOptimal { .. })), "{:?}", r);
    }
}

#[test]
fn suboptimality_reference_value() {
    assert_eq!(suboptimality(12.0, 10.0).unwrap(), Some(20.0));
    assert_eq!(suboptimality(0.0, 0.0).unwrap(), Some(0.0));
    assert_eq!(suboptimality(3.0, 0.0).unwrap(), None);
}

fn config() -> BenchConfig {
    BenchConfig {
        suite: SuiteSpec {
            grid_sizes: vec![10, 30],
            agent_counts: vec![1, 2, 3],
            instances_per_cell: 2,
            ..SuiteSpec::desk_scale()
        },
        algorithms: Algorithm::ALL.to_vec(),
        planner: PlannerConfig {
            budget: Budget::Iterations(400),
            ..Default::default()
        },
        parallelism: 1,
    }
}

#[test]
fn identical_seeds_give_identical_non_timing_columns() {
    let cfg = config();
    let suite = build_suite(&cfg.suite).unwrap();
    let a = run_benchmark(&suite, &cfg, None).unwrap();
    let b = run_benchmark(&suite, &cfg, None).unwrap();
    let strip = |v: &[RunRecord]| v.iter().map(RunRecord::without_timing).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn report_curves_match_solved_counts() {
    let cfg = config();
    let suite = build_suite(&cfg.suite).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let records_path = dir.path().join("records.csv");
    let records = run_benchmark(&suite, &cfg, Some(&records_path)).unwrap();
    assert_eq!(read_records(&records_path).unwrap(), records);

    let out = dir.path().join("report");
    let summary = report(&records, &out).unwrap();
    for (a, curve) in &summary.curves {
        let solved = records.iter().filter(|r| r.algorithm == *a && r.solved()).count();
        assert_eq!(curve.len(), solved);
        assert_eq!(summary.algorithm(*a).unwrap().solved, solved);
        assert!(out.join(format!("{a}_curve.csv")).is_file());
    }
    for row in &summary.suboptimality {
        for s in [row.first_suboptimality_pct, row.best_suboptimality_pct].into_iter().flatten() {
            assert!(s >= 0.0);
        }
    }
    for f in ["success_rates.csv", "suboptimality.csv", "suboptimality_summary.csv", "metadata.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert!(summary.figures_written);
}
