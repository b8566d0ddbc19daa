use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::MotionGraph;
use crate::util::OrdF64;

/// Exact shortest arrival time from every waypoint to `goal`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceTable {
    pub goal: u32,
    cost_to_goal: Vec<f64>,
}

impl DistanceTable {
    /// `f64::INFINITY` when `ix` cannot reach the goal.
    #[inline]
    pub fn get(&self, ix: u32) -> f64 {
        self.cost_to_goal[ix as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.cost_to_goal
    }
}

/// Backward uniform-cost search from `goal` over reversed primitives.
pub fn distance_table(graph: &MotionGraph, goal: u32) -> Result<DistanceTable> {
    if !graph.contains(goal) {
        return Err(Error::UnknownWaypoint(goal));
    }
    let n = graph.len();
    let mut reverse: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for p in graph.all_primitives().filter(|p| !p.is_wait()) {
        reverse[p.to as usize].push((p.from, p.duration));
    }

    let mut cost = vec![f64::INFINITY; n];
    cost[goal as usize] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((OrdF64(0.0), goal)));
    while let Some(Reverse((OrdF64(c), u))) = heap.pop() {
        if c > cost[u as usize] {
            continue;
        }
        for &(v, d) in &reverse[u as usize] {
            let nc = c + d;
            if nc < cost[v as usize] {
                cost[v as usize] = nc;
                heap.push(Reverse((OrdF64(nc), v)));
            }
        }
    }
    Ok(DistanceTable {
        goal,
        cost_to_goal: cost,
    })
}

pub fn is_reachable(graph: &MotionGraph, from: u32, to: u32) -> Result<bool> {
    for ix in [from, to] {
        if !graph.contains(ix) {
            return Err(Error::UnknownWaypoint(ix));
        }
    }
    let mut seen = vec![false; graph.len()];
    let mut queue = VecDeque::from([from]);
    seen[from as usize] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            return Ok(true);
        }
        for p in graph.primitives(u) {
            if !seen[p.to as usize] {
                seen[p.to as usize] = true;
                queue.push_back(p.to);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain BFS hop count on a unit-duration graph.
    fn bfs_hops(graph: &MotionGraph, from: u32, to: u32) -> Option<usize> {
        let mut dist = vec![usize::MAX; graph.len()];
        dist[from as usize] = 0;
        let mut q = VecDeque::from([from]);
        while let Some(u) = q.pop_front() {
            for p in graph.primitives(u) {
                if dist[p.to as usize] == usize::MAX {
                    dist[p.to as usize] = dist[u as usize] + 1;
                    q.push_back(p.to);
                }
            }
        }
        (dist[to as usize] != usize::MAX).then_some(dist[to as usize])
    }

    #[test]
    fn goal_and_neighbour() {
        let g = MotionGraph::grid(5, &[]).unwrap();
        let goal = g.index_of(12).unwrap();
        let t = distance_table(&g, goal).unwrap();
        assert_eq!(t.get(goal), 0.0);
        assert_eq!(t.get(g.index_of(13).unwrap()), 1.0);
    }

    #[test]
    fn hollow_square_opposite_corners() {
        let g = MotionGraph::grid(3, &[(1, 1)]).unwrap();
        let a = g.index_of(0).unwrap();
        let b = g.index_of(8).unwrap();
        let t = distance_table(&g, b).unwrap();
        assert_eq!(bfs_hops(&g, a, b), Some(4));
        assert_eq!(t.get(a), 4.0);
    }

    #[test]
    fn split_grid_is_unreachable() {
        let wall: Vec<(u32, u32)> = (0..4).map(|y| (2, y)).collect();
        let g = MotionGraph::grid(4, &wall).unwrap();
        let left = g.index_of(0).unwrap();
        let right = g.index_of(3).unwrap();
        assert!(!is_reachable(&g, left, right).unwrap());
        assert!(is_reachable(&g, left, left).unwrap());
        assert_eq!(distance_table(&g, right).unwrap().get(left), f64::INFINITY);
        assert!(bfs_hops(&g, left, right).is_none());
    }

    #[test]
    fn unknown_goal() {
        let g = MotionGraph::grid(2, &[]).unwrap();
        assert!(matches!(distance_table(&g, 99), Err(Error::UnknownWaypoint(99))));
        assert!(is_reachable(&g, 0, 99).is_err());
    }
}
