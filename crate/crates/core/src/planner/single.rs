use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::MotionGraph;
use crate::util::OrdF64;

/// Shortest waypoint sequence from `start` to `destination`, by A* with the
/// Euclidean distance (divided by the fastest move speed) as heuristic.
/// Ties go to the lower heuristic, then to the earlier-pushed entry, which
/// follows the canonical primitive order.
pub fn single_agent_optimal_path(graph: &MotionGraph, start: u32, destination: u32) -> Result<Vec<u32>> {
    for ix in [start, destination] {
        if !graph.contains(ix) {
            return Err(Error::UnknownWaypoint(ix));
        }
    }
    let speed = graph.max_speed();
    let goal = graph.position(destination);
    let h = |w: u32| {
        if speed > 0.0 {
            graph.position(w).distance(goal) / speed
        } else {
            0.0
        }
    };

    let n = graph.len();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![u32::MAX; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut seq: u64 = 0;
    g[start as usize] = 0.0;
    heap.push(Reverse((OrdF64(h(start)), OrdF64(h(start)), seq, start)));

    while let Some(Reverse((_, _, _, u))) = heap.pop() {
        if closed[u as usize] {
            continue;
        }
        if u == destination {
            let mut path = vec![u];
            let mut at = u;
            while at != start {
                at = parent[at as usize];
                path.push(at);
            }
            path.reverse();
            return Ok(path);
        }
        closed[u as usize] = true;
        for p in graph.primitives(u).iter().filter(|p| !p.is_wait()) {
            let v = p.to;
            let ng = g[u as usize] + p.duration;
            if !closed[v as usize] && ng < g[v as usize] {
                g[v as usize] = ng;
                parent[v as usize] = u;
                seq += 1;
                let hv = h(v);
                heap.push(Reverse((OrdF64(ng + hv), OrdF64(hv), seq, v)));
            }
        }
    }
    Err(Error::Unreachable { from: start, to: destination })
}
