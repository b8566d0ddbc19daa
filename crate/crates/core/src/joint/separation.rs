use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Point, ProblemInstance};
use crate::joint::{JointMove, JointState};

/// How inter-agent distance is checked during a joint move.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparationMode {
    /// Every instant of the move, with both agents interpolated linearly.
    #[default]
    Continuous,
    /// Only at the two timestep boundaries.
    Discrete,
}

/// Minimum distance between two agents moving at constant speed from `a0` to
/// `a1` and from `b0` to `b1` over the same interval.
///
/// The relative position is `r(t) = d0 + t·(d1 − d0)` with `d = a − b`, so
/// |r(t)|² is a quadratic minimized at `t* = −(d0·v)/|v|²`, clamped to [0, 1].
/// The result does not depend on `duration`; it is accepted so call sites
/// read like the move they describe.
pub fn min_move_distance(a0: Point, a1: Point, b0: Point, b1: Point, duration: f64) -> f64 {
    debug_assert!(duration > 0.0);
    let d0x = a0.x - b0.x;
    let d0y = a0.y - b0.y;
    let vx = (a1.x - b1.x) - d0x;
    let vy = (a1.y - b1.y) - d0y;
    let vv = vx * vx + vy * vy;
    let t = if vv > 0.0 {
        (-(d0x * vx + d0y * vy) / vv).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let rx = d0x + t * vx;
    let ry = d0y + t * vy;
    (rx * rx + ry * ry).sqrt()
}

#[inline]
pub(crate) fn pair_clear(a0: Point, a1: Point, b0: Point, b1: Point, d_sep: f64, mode: SeparationMode) -> bool {
    match mode {
        SeparationMode::Continuous => min_move_distance(a0, a1, b0, b1, 1.0) > d_sep,
        SeparationMode::Discrete => a0.distance(b0) > d_sep && a1.distance(b1) > d_sep,
    }
}

/// True iff every agent pair stays strictly more than `d_sep` apart for the
/// whole move.
pub fn move_is_separated(instance: &ProblemInstance, state: &JointState, mv: &JointMove, d_sep: f64) -> Result<bool> {
    move_is_separated_with(instance, state, mv, d_sep, SeparationMode::Continuous)
}

pub fn move_is_separated_with(
    instance: &ProblemInstance,
    state: &JointState,
    mv: &JointMove,
    d_sep: f64,
    mode: SeparationMode,
) -> Result<bool> {
    state.check(instance)?;
    mv.check_applicable(state)?;
    let ends: Vec<(Point, Point)> = mv
        .primitives
        .iter()
        .enumerate()
        .map(|(i, p)| (instance.graph(i).position(p.from), instance.graph(i).position(p.to)))
        .collect();
    for i in 0..ends.len() {
        for j in 0..i {
            if !pair_clear(ends[i].0, ends[i].1, ends[j].0, ends[j].1, d_sep, mode) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MotionGraph;

    const P00: Point = Point::new(0.0, 0.0);
    const P10: Point = Point::new(1.0, 0.0);
    const P11: Point = Point::new(1.0, 1.0);

    #[test]
    fn both_waiting() {
        assert_eq!(min_move_distance(P00, P00, P10, P10, 1.0), 1.0);
    }

    #[test]
    fn swap_meets_at_midpoint() {
        assert_eq!(min_move_distance(P00, P10, P10, P00, 1.0), 0.0);
    }

    #[test]
    fn perpendicular_shear() {
        let d = min_move_distance(P00, P10, P10, P11, 1.0);
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn following_keeps_distance() {
        let p20 = Point::new(2.0, 0.0);
        assert_eq!(min_move_distance(P00, P10, P10, p20, 1.0), 1.0);
    }

    #[test]
    fn joint_checks_on_grid() {
        let g = MotionGraph::grid(3, &[]).unwrap();
        // agents at (0,0) and (1,0)
        let inst = crate::graph::ProblemInstance::shared(g.clone(), vec![0, 1], vec![6, 7], 0.8, 0).unwrap();
        let state = JointState::from_slice(&[0, 1]);
        let wait = |w: u32| *g.wait_primitive(w).unwrap();
        let mv = |a: u32, b: u32| *g.primitive_between(a, b).unwrap();

        let both_wait = JointMove::new([wait(0), wait(1)]);
        assert!(move_is_separated(&inst, &state, &both_wait, 0.8).unwrap());

        let swap = JointMove::new([mv(0, 1), mv(1, 0)]);
        assert!(!move_is_separated(&inst, &state, &swap, 0.8).unwrap());
        assert!(move_is_separated_with(&inst, &state, &swap, 0.8, SeparationMode::Discrete).unwrap());

        // (0,0)->(1,0) while (1,0)->(1,1)
        let shear = JointMove::new([mv(0, 1), mv(1, 4)]);
        assert!(!move_is_separated(&inst, &state, &shear, 0.8).unwrap());
        assert!(move_is_separated(&inst, &state, &shear, 0.5).unwrap());

        let short = JointMove::new([wait(0)]);
        assert!(move_is_separated(&inst, &state, &short, 0.8).is_err());
    }
}
