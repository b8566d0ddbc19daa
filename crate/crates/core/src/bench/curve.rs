use serde::{Deserialize, Serialize};

use crate::bench::RunRecord;
use crate::error::{Error, Result};
use crate::planner::Algorithm;

/// Costs this far below the optimum are treated as equal to it.
pub const SUBOPTIMALITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// 1-based rank among solved instances.
    pub index: usize,
    pub runtime_s: f64,
}

/// Solved runtimes sorted ascending and ranked; unsolved entries drop out,
/// so the last index equals the solved count.
pub fn runtime_curve(runtimes: &[Option<f64>]) -> Vec<CurvePoint> {
    let mut solved: Vec<f64> = runtimes.iter().flatten().copied().collect();
    solved.sort_by(f64::total_cmp);
    solved
        .into_iter()
        .enumerate()
        .map(|(i, runtime_s)| CurvePoint { index: i + 1, runtime_s })
        .collect()
}

/// First-solution performance curve of `algorithm` over `records`.
pub fn performance_curve(records: &[RunRecord], algorithm: Algorithm) -> Vec<CurvePoint> {
    let runtimes: Vec<Option<f64>> = records
        .iter()
        .filter(|r| r.algorithm == algorithm)
        .map(|r| r.first_solution_time_s)
        .collect();
    runtime_curve(&runtimes)
}

/// Relative excess cost in percent, `100·(cost − optimal)/optimal`.
///
/// Returns `Ok(None)` when the optimum is zero and `cost` is not, where the
/// ratio is undefined; a zero optimum matched exactly gives 0.
pub fn suboptimality(cost: f64, optimal: f64) -> Result<Option<f64>> {
    if !(cost.is_finite() && optimal.is_finite()) || optimal < 0.0 {
        return Err(Error::InvalidParameters(format!("suboptimality of {cost} against {optimal}")));
    }
    if cost < optimal - SUBOPTIMALITY_TOLERANCE {
        return Err(Error::CostBelowOptimal { cost, optimal });
    }
    if optimal == 0.0 {
        return Ok((cost <= SUBOPTIMALITY_TOLERANCE).then_some(0.0));
    }
    if cost <= optimal {
        return Ok(Some(0.0));
    }
    Ok(Some(100.0 * (cost - optimal) / optimal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_and_ranked() {
        let c = runtime_curve(&[Some(3.0), Some(1.0), Some(2.0)]);
        let pairs: Vec<_> = c.iter().map(|p| (p.index, p.runtime_s)).collect();
        assert_eq!(pairs, vec![(1, 1.0), (2, 2.0), (3, 3.0)]);
    }

    #[test]
    fn unsolved_entries_drop_out() {
        let c = runtime_curve(&[Some(1.0), None, Some(2.0)]);
        let pairs: Vec<_> = c.iter().map(|p| (p.index, p.runtime_s)).collect();
        assert_eq!(pairs, vec![(1, 1.0), (2, 2.0)]);
        assert!(runtime_curve(&[]).is_empty());
    }

    #[test]
    fn suboptimality_examples() {
        assert_eq!(suboptimality(12.0, 10.0).unwrap(), Some(20.0));
        assert_eq!(suboptimality(10.0, 10.0).unwrap(), Some(0.0));
        assert_eq!(suboptimality(9.999_999_999, 10.0).unwrap(), Some(0.0));
        assert!(matches!(suboptimality(9.0, 10.0), Err(Error::CostBelowOptimal { .. })));
        assert_eq!(suboptimality(0.0, 0.0).unwrap(), Some(0.0));
        assert_eq!(suboptimality(3.0, 0.0).unwrap(), None);
    }
}
