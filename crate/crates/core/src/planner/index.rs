//! Incremental kd-tree over joint positions (2n coordinates per vertex).
//!
//! Both joint metrics dominate the absolute difference along any single
//! coordinate, so the usual split-plane bound prunes exactly.

use serde::{Deserialize, Serialize};

use crate::graph::Point;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointMetric {
    /// Σ_i Euclidean distance between agent i's positions.
    #[default]
    Sum,
    /// max_i Euclidean distance between agent i's positions.
    Max,
}

impl JointMetric {
    /// Distance between two flattened joint positions `[x0, y0, x1, y1, ...]`.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let per_agent = a
            .chunks_exact(2)
            .zip(b.chunks_exact(2))
            .map(|(p, q)| Point::new(p[0], p[1]).distance(Point::new(q[0], q[1])));
        match self {
            JointMetric::Sum => per_agent.sum(),
            JointMetric::Max => per_agent.fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    item: usize,
    left: Option<u32>,
    right: Option<u32>,
}

/// Points are identified by the caller's item ids; several items may share
/// one position.
#[derive(Clone, Debug)]
pub struct JointIndex {
    dim: usize,
    metric: JointMetric,
    coords: Vec<f64>,
    nodes: Vec<Node>,
}

impl JointIndex {
    pub fn new(dim: usize, metric: JointMetric) -> Self {
        assert!(dim > 0 && dim.is_multiple_of(2), "joint dimension must be a positive even number");
        JointIndex {
            dim,
            metric,
            coords: Vec::new(),
            nodes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn metric(&self) -> JointMetric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn point(&self, node: u32) -> &[f64] {
        let at = node as usize * self.dim;
        &self.coords[at..at + self.dim]
    }

    /// Items in insertion order.
    pub fn items(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().map(|n| n.item)
    }

    pub fn insert(&mut self, item: usize, point: &[f64]) {
        assert_eq!(point.len(), self.dim);
        let id = self.nodes.len() as u32;
        self.coords.extend_from_slice(point);
        self.nodes.push(Node { item, left: None, right: None });
        if id == 0 {
            return;
        }
        let mut at = 0u32;
        let mut depth = 0;
        loop {
            let axis = depth % self.dim;
            let split = self.point(at)[axis];
            let node = &mut self.nodes[at as usize];
            let slot = if point[axis] < split { &mut node.left } else { &mut node.right };
            match *slot {
                Some(next) => at = next,
                None => {
                    *slot = Some(id);
                    return;
                }
            }
            depth += 1;
        }
    }

    /// Closest item to `query`; ties go to the smaller item id.
    pub fn nearest(&self, query: &[f64]) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_from(0, 0, query, &mut best);
        Some(best)
    }

    fn nearest_from(&self, at: u32, depth: usize, query: &[f64], best: &mut (usize, f64)) {
        let p = self.point(at);
        let d = self.metric.distance(p, query);
        let item = self.nodes[at as usize].item;
        if d < best.1 || (d == best.1 && item < best.0) {
            *best = (item, d);
        }
        let axis = depth % self.dim;
        let diff = query[axis] - p[axis];
        let node = &self.nodes[at as usize];
        let (near, far) = if diff < 0.0 { (node.left, node.right) } else { (node.right, node.left) };
        if let Some(n) = near {
            self.nearest_from(n, depth + 1, query, best);
        }
        if let Some(f) = far {
            // `<=` keeps equal-distance candidates with smaller ids reachable
            if diff.abs() <= best.1 {
                self.nearest_from(f, depth + 1, query, best);
            }
        }
    }

    /// All items within distance `radius` (inclusive) of `query`, sorted by id.
    pub fn within(&self, query: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            let mut stack = vec![(0u32, 0usize)];
            while let Some((at, depth)) = stack.pop() {
                let p = self.point(at);
                if self.metric.distance(p, query) <= radius {
                    out.push(self.nodes[at as usize].item);
                }
                let axis = depth % self.dim;
                let diff = query[axis] - p[axis];
                let node = &self.nodes[at as usize];
                if let Some(l) = node.left {
                    if diff < 0.0 || diff <= radius {
                        stack.push((l, depth + 1));
                    }
                }
                if let Some(r) = node.right {
                    if diff >= 0.0 || -diff <= radius {
                        stack.push((r, depth + 1));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}
