//! Independent reference implementations shared by the integration tests and
//! the acceptance runner. Nothing here calls into the planners' search or
//! feasibility code.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use coop_planner::graph::{MotionPrimitive, Point, ProblemInstance};
use coop_planner::joint::Solution;
use rand::Rng;

/// Squared distance between `a(t)` and `b(t)` at `t` in [0, 1].
fn gap_sq(a0: Point, a1: Point, b0: Point, b1: Point, t: f64) -> f64 {
    let ax = a0.x + t * (a1.x - a0.x);
    let ay = a0.y + t * (a1.y - a0.y);
    let bx = b0.x + t * (b1.x - b0.x);
    let by = b0.y + t * (b1.y - b0.y);
    (ax - bx).powi(2) + (ay - by).powi(2)
}

/// Minimum over `samples` evenly spaced instants, endpoints included.
pub fn sampled_min_distance(a0: Point, a1: Point, b0: Point, b1: Point, samples: usize) -> f64 {
    (0..samples)
        .map(|k| gap_sq(a0, a1, b0, b1, k as f64 / (samples - 1) as f64))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Exact minimum by comparing the endpoints with the stationary point of the
/// quadratic, written out independently of the library's closed form.
pub fn reference_min_distance(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    let mut best = gap_sq(a0, a1, b0, b1, 0.0).min(gap_sq(a0, a1, b0, b1, 1.0));
    // d/dt |p + t q|^2 = 2 p.q + 2 t q.q
    let (px, py) = (a0.x - b0.x, a0.y - b0.y);
    let (qx, qy) = (a1.x - a0.x - (b1.x - b0.x), a1.y - a0.y - (b1.y - b0.y));
    let qq = qx * qx + qy * qy;
    if qq > 0.0 {
        let t = -(px * qx + py * qy) / qq;
        if t > 0.0 && t < 1.0 {
            best = best.min(gap_sq(a0, a1, b0, b1, t));
        }
    }
    best.sqrt()
}

pub fn random_point<R: Rng>(rng: &mut R) -> Point {
    Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))
}

fn combinations(lists: &[&[MotionPrimitive]]) -> Vec<Vec<MotionPrimitive>> {
    let mut out: Vec<Vec<MotionPrimitive>> = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(*p);
                    v
                })
            })
            .collect();
    }
    out
}

/// Every joint state of the instance, including unseparated ones.
fn all_states(instance: &ProblemInstance) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for i in 0..instance.n_agents() {
        let len = instance.graph(i).len() as u32;
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..len).map(move |w| {
                    let mut v = prefix.clone();
                    v.push(w);
                    v
                })
            })
            .collect();
    }
    out
}

pub struct JointGraph {
    pub states: Vec<Vec<u32>>,
    pub ids: HashMap<Vec<u32>, usize>,
    pub edges: Vec<Vec<(usize, f64)>>,
}

/// The joint graph written out edge by edge: rest-separated states, moves with
/// equal durations whose pairs stay strictly more than d_sep apart, and a
/// cost that skips waits at the agent's own destination.
pub fn materialize(instance: &ProblemInstance) -> JointGraph {
    let n = instance.n_agents();
    let d_sep = instance.separation();
    let pos = |i: usize, w: u32| instance.graph(i).position(w);
    let states: Vec<Vec<u32>> = all_states(instance)
        .into_iter()
        .filter(|s| {
            (0..n).all(|a| ((a + 1)..n).all(|b| pos(a, s[a]).distance(pos(b, s[b])) > d_sep))
        })
        .collect();
    let ids: HashMap<Vec<u32>, usize> = states.iter().cloned().enumerate().map(|(k, s)| (s, k)).collect();
    let mut edges = vec![Vec::new(); states.len()];
    for (k, s) in states.iter().enumerate() {
        let lists: Vec<&[MotionPrimitive]> = (0..n).map(|i| instance.graph(i).primitives(s[i])).collect();
        for combo in combinations(&lists) {
            if combo.iter().any(|p| p.duration != combo[0].duration) {
                continue;
            }
            let clear = (0..n).all(|a| {
                ((a + 1)..n).all(|b| {
                    let (pa, pb) = (combo[a], combo[b]);
                    reference_min_distance(pos(a, pa.from), pos(a, pa.to), pos(b, pb.from), pos(b, pb.to)) > d_sep
                })
            });
            if !clear {
                continue;
            }
            let target: Vec<u32> = combo.iter().map(|p| p.to).collect();
            let cost: f64 = combo
                .iter()
                .enumerate()
                .filter(|(i, p)| !(p.from == instance.destinations()[*i] && p.from == p.to))
                .fold(0.0, |acc, (_, p)| acc + p.duration);
            if let Some(&t) = ids.get(&target) {
                edges[k].push((t, cost));
            }
        }
    }
    JointGraph { states, ids, edges }
}

impl JointGraph {
    /// Plain Dijkstra from `from`; unreachable entries are infinite.
    pub fn costs_from(&self, from: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.states.len()];
        let mut heap = BinaryHeap::new();
        dist[from] = 0.0;
        // costs are whole seconds on grids, but keep this exact for any
        // dyadic duration by ordering on the bit pattern of a non-negative f64
        heap.push(Reverse((0f64.to_bits(), from)));
        while let Some(Reverse((bits, u))) = heap.pop() {
            let d = f64::from_bits(bits);
            if d > dist[u] {
                continue;
            }
            for &(v, c) in &self.edges[u] {
                let nd = d + c;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((nd.to_bits(), v)));
                }
            }
        }
        dist
    }

    /// Cost-to-go from every state to `to`, by Dijkstra on reversed edges.
    pub fn costs_to(&self, to: usize) -> Vec<f64> {
        let mut reversed = vec![Vec::new(); self.states.len()];
        for (u, list) in self.edges.iter().enumerate() {
            for &(v, c) in list {
                reversed[v].push((u, c));
            }
        }
        JointGraph {
            states: self.states.clone(),
            ids: HashMap::new(),
            edges: reversed,
        }
        .costs_from(to)
    }
}

/// Optimal joint cost by uniform-cost search, `None` if the goal is
/// unreachable or the endpoints are not separated.
pub fn ucs_optimum(instance: &ProblemInstance) -> Option<f64> {
    let g = materialize(instance);
    let s = *g.ids.get(instance.starts())?;
    let t = *g.ids.get(instance.destinations())?;
    let d = g.costs_from(s)[t];
    d.is_finite().then_some(d)
}

/// Checks a solution by sampling every timestep at `samples` instants. Only
/// used where the true minimum is far enough from d_sep to be caught.
pub fn sampled_verdict(instance: &ProblemInstance, solution: &Solution, samples: usize) -> bool {
    let n = instance.n_agents();
    if solution.paths.len() != n || solution.paths.iter().any(Vec::is_empty) {
        return false;
    }
    let horizon = solution.paths.iter().map(Vec::len).max().unwrap();
    let at = |i: usize, t: usize| solution.paths[i][t.min(solution.paths[i].len() - 1)];
    let mut cost = 0.0;
    for i in 0..n {
        let p = &solution.paths[i];
        if p[0] != instance.starts()[i] || *p.last().unwrap() != instance.destinations()[i] {
            return false;
        }
    }
    for t in 0..horizon.saturating_sub(1) {
        let mut durations = Vec::new();
        for i in 0..n {
            let g = instance.graph(i);
            let Some(p) = g.primitive_between(at(i, t), at(i, t + 1)) else {
                return false;
            };
            durations.push(p.duration);
            if !(p.from == instance.destinations()[i] && p.from == p.to) {
                cost += p.duration;
            }
        }
        if durations.iter().any(|&d| d != durations[0]) {
            return false;
        }
        for a in 0..n {
            for b in (a + 1)..n {
                let (ga, gb) = (instance.graph(a), instance.graph(b));
                let d = sampled_min_distance(
                    ga.position(at(a, t)),
                    ga.position(at(a, t + 1)),
                    gb.position(at(b, t)),
                    gb.position(at(b, t + 1)),
                    samples,
                );
                if d <= instance.separation() {
                    return false;
                }
            }
        }
    }
    if horizon == 1 {
        for a in 0..n {
            for b in (a + 1)..n {
                let d = instance.graph(a).position(at(a, 0)).distance(instance.graph(b).position(at(b, 0)));
                if d <= instance.separation() {
                    return false;
                }
            }
        }
    }
    (cost - solution.total_cost).abs() <= 1e-9
}
