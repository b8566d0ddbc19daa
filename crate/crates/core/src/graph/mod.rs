//! Motion graphs, problem instances and the grid-world instance generator.
//!
//! Waypoints are addressed by a dense index (`u32`) into the graph's waypoint
//! table; the external waypoint id is only used at file boundaries. The table
//! is kept sorted by id, so index order and id order coincide.

mod distance;
mod generator;
mod instance;
pub mod io;

pub use distance::{distance_table, is_reachable, DistanceTable};
pub use generator::{generate_grid_instance, GENERATION_RETRY_BUDGET};
pub use instance::ProblemInstance;

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Waypoint {
    pub id: u32,
    pub position: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveKind {
    Move,
    Wait,
}

/// One atomic action: a constant-speed move along an edge or a timed wait.
/// `from` and `to` are waypoint indices of the owning graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionPrimitive {
    pub from: u32,
    pub to: u32,
    pub duration: f64,
    pub kind: PrimitiveKind,
}

impl MotionPrimitive {
    pub fn is_wait(&self) -> bool {
        self.kind == PrimitiveKind::Wait
    }
}

/// A primitive as written in files, with endpoints given by waypoint id.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimitiveSpec {
    pub from: u32,
    pub to: u32,
    pub duration: f64,
    pub kind: PrimitiveKind,
}

/// Origin of a graph built by [`MotionGraph::grid`], kept so instances can be
/// saved in the compact grid form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridLayout {
    pub size: u32,
    /// Removed vertices as `(x, y)`, sorted ascending.
    pub removed: Vec<(u32, u32)>,
}

#[derive(Clone, Debug)]
pub struct MotionGraph {
    waypoints: Vec<Waypoint>,
    index: FxHashMap<u32, u32>,
    adjacency: Vec<Vec<MotionPrimitive>>,
    grid: Option<GridLayout>,
}

impl PartialEq for MotionGraph {
    fn eq(&self, other: &Self) -> bool {
        self.waypoints == other.waypoints && self.adjacency == other.adjacency
    }
}

impl MotionGraph {
    /// Builds a graph from waypoints and id-addressed primitives, validating
    /// every structural invariant and imposing the canonical adjacency order
    /// (moves by ascending target, wait last).
    pub fn new(mut waypoints: Vec<Waypoint>, primitives: &[PrimitiveSpec]) -> Result<Self> {
        waypoints.sort_by_key(|w| w.id);
        let mut index = FxHashMap::default();
        for (ix, w) in waypoints.iter().enumerate() {
            if !w.position.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "waypoint {} has a non-finite position",
                    w.id
                )));
            }
            if index.insert(w.id, ix as u32).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate waypoint id {}", w.id)));
            }
        }

        let mut adjacency: Vec<Vec<MotionPrimitive>> = vec![Vec::new(); waypoints.len()];
        for p in primitives {
            let from = *index.get(&p.from).ok_or(Error::UnknownWaypoint(p.from))?;
            let to = *index.get(&p.to).ok_or(Error::UnknownWaypoint(p.to))?;
            if !(p.duration.is_finite() && p.duration > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "primitive {}->{} has non-positive duration {}",
                    p.from, p.to, p.duration
                )));
            }
            if (p.kind == PrimitiveKind::Wait) != (from == to) {
                return Err(Error::InvalidGraph(format!(
                    "primitive {}->{}: a wait must start and end at the same waypoint",
                    p.from, p.to
                )));
            }
            let list = &mut adjacency[from as usize];
            if list.iter().any(|q| q.to == to) {
                return Err(Error::InvalidGraph(format!(
                    "more than one primitive {}->{}",
                    p.from, p.to
                )));
            }
            list.push(MotionPrimitive {
                from,
                to,
                duration: p.duration,
                kind: p.kind,
            });
        }
        for list in &mut adjacency {
            list.sort_by_key(|p| (p.is_wait(), p.to));
        }

        Ok(MotionGraph {
            waypoints,
            index,
            adjacency,
            grid: None,
        })
    }

    /// A `size`×`size` grid with 1 m spacing, 4-neighbour moves of 1 s and a
    /// 1 s wait at every remaining vertex. The waypoint at `(x, y)` has id
    /// `y * size + x`.
    pub fn grid(size: u32, removed: &[(u32, u32)]) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameters("grid size must be positive".into()));
        }
        let n = (size as usize) * (size as usize);
        let mut blocked = vec![false; n];
        for &(x, y) in removed {
            if x >= size || y >= size {
                return Err(Error::InvalidParameters(format!(
                    "removed vertex ({x}, {y}) lies outside the {size}x{size} grid"
                )));
            }
            blocked[(y * size + x) as usize] = true;
        }
        let cell = |x: u32, y: u32| y * size + x;

        let mut waypoints = Vec::with_capacity(n);
        let mut primitives = Vec::with_capacity(n * 5);
        for y in 0..size {
            for x in 0..size {
                let id = cell(x, y);
                if blocked[id as usize] {
                    continue;
                }
                waypoints.push(Waypoint {
                    id,
                    position: Point::new(x as f64, y as f64),
                });
                let neighbours = [
                    (x.checked_sub(1), Some(y)),
                    (x.checked_add(1).filter(|&v| v < size), Some(y)),
                    (Some(x), y.checked_sub(1)),
                    (Some(x), y.checked_add(1).filter(|&v| v < size)),
                ];
                for (nx, ny) in neighbours {
                    if let (Some(nx), Some(ny)) = (nx, ny) {
                        let nid = cell(nx, ny);
                        if !blocked[nid as usize] {
                            primitives.push(PrimitiveSpec {
                                from: id,
                                to: nid,
                                duration: 1.0,
                                kind: PrimitiveKind::Move,
                            });
                        }
                    }
                }
                primitives.push(PrimitiveSpec {
                    from: id,
                    to: id,
                    duration: 1.0,
                    kind: PrimitiveKind::Wait,
                });
            }
        }

        let mut graph = MotionGraph::new(waypoints, &primitives)?;
        let mut removed: Vec<(u32, u32)> = removed.to_vec();
        removed.sort_unstable();
        removed.dedup();
        graph.grid = Some(GridLayout { size, removed });
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    #[inline]
    pub fn waypoint(&self, ix: u32) -> &Waypoint {
        &self.waypoints[ix as usize]
    }

    #[inline]
    pub fn position(&self, ix: u32) -> Point {
        self.waypoints[ix as usize].position
    }

    pub fn contains(&self, ix: u32) -> bool {
        (ix as usize) < self.waypoints.len()
    }

    pub fn index_of(&self, id: u32) -> Option<u32> {
        self.index.get(&id).copied()
    }

    /// Outgoing primitives of `ix` in canonical order.
    #[inline]
    pub fn primitives(&self, ix: u32) -> &[MotionPrimitive] {
        &self.adjacency[ix as usize]
    }

    pub fn primitive_between(&self, from: u32, to: u32) -> Option<&MotionPrimitive> {
        self.adjacency
            .get(from as usize)?
            .iter()
            .find(|p| p.to == to)
    }

    pub fn wait_primitive(&self, ix: u32) -> Option<&MotionPrimitive> {
        self.adjacency[ix as usize].last().filter(|p| p.is_wait())
    }

    pub fn all_primitives(&self) -> impl Iterator<Item = &MotionPrimitive> {
        self.adjacency.iter().flatten()
    }

    pub fn grid_layout(&self) -> Option<&GridLayout> {
        self.grid.as_ref()
    }

    /// Fastest move speed in m/s; used to turn Euclidean distance into an
    /// admissible time bound.
    pub fn max_speed(&self) -> f64 {
        self.all_primitives()
            .filter(|p| !p.is_wait())
            .map(|p| self.position(p.from).distance(self.position(p.to)) / p.duration)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_of_empty_grid_has_two_moves_and_a_wait() {
        let g = MotionGraph::grid(3, &[]).unwrap();
        assert_eq!(g.len(), 9);
        let corner = g.index_of(0).unwrap();
        let prims = g.primitives(corner);
        assert_eq!(prims.len(), 3);
        assert_eq!(prims.iter().filter(|p| p.kind == PrimitiveKind::Move).count(), 2);
        assert!(prims.last().unwrap().is_wait());
    }

    #[test]
    fn adjacency_is_canonical() {
        let g = MotionGraph::grid(4, &[(1, 1)]).unwrap();
        for ix in 0..g.len() as u32 {
            let prims = g.primitives(ix);
            let moves: Vec<u32> = prims.iter().filter(|p| !p.is_wait()).map(|p| p.to).collect();
            let mut sorted = moves.clone();
            sorted.sort_unstable();
            assert_eq!(moves, sorted);
            assert_eq!(prims.iter().filter(|p| p.is_wait()).count(), 1);
            assert!(prims.last().unwrap().is_wait());
            assert!(prims.iter().all(|p| p.duration == 1.0));
        }
    }

    #[test]
    fn removed_vertices_are_absent() {
        let g = MotionGraph::grid(3, &[(1, 1)]).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.index_of(4).is_none());
        let north_middle = g.index_of(1).unwrap();
        assert!(g.primitives(north_middle).iter().all(|p| g.waypoint(p.to).id != 4));
    }

    #[test]
    fn rejects_bad_primitives() {
        let wps = vec![
            Waypoint { id: 3, position: Point::new(0.0, 0.0) },
            Waypoint { id: 8, position: Point::new(1.0, 0.0) },
        ];
        let wait_between = PrimitiveSpec { from: 3, to: 8, duration: 1.0, kind: PrimitiveKind::Wait };
        assert!(MotionGraph::new(wps.clone(), &[wait_between]).is_err());
        let zero = PrimitiveSpec { from: 3, to: 8, duration: 0.0, kind: PrimitiveKind::Move };
        assert!(MotionGraph::new(wps.clone(), &[zero]).is_err());
        let dangling = PrimitiveSpec { from: 3, to: 9, duration: 1.0, kind: PrimitiveKind::Move };
        assert!(matches!(
            MotionGraph::new(wps.clone(), &[dangling]),
            Err(Error::UnknownWaypoint(9))
        ));
        let dup = vec![wps[0], wps[0]];
        assert!(MotionGraph::new(dup, &[]).is_err());
    }

    #[test]
    fn explicit_graph_maps_ids_to_sorted_indices() {
        let wps = vec![
            Waypoint { id: 20, position: Point::new(1.0, 0.0) },
            Waypoint { id: 5, position: Point::new(0.0, 0.0) },
        ];
        let prims = [
            PrimitiveSpec { from: 5, to: 20, duration: 2.0, kind: PrimitiveKind::Move },
            PrimitiveSpec { from: 20, to: 20, duration: 2.0, kind: PrimitiveKind::Wait },
        ];
        let g = MotionGraph::new(wps, &prims).unwrap();
        assert_eq!(g.index_of(5), Some(0));
        assert_eq!(g.index_of(20), Some(1));
        assert_eq!(g.primitive_between(0, 1).unwrap().duration, 2.0);
        assert!(g.wait_primitive(0).is_none());
        assert!((g.max_speed() - 0.5).abs() < 1e-12);
    }
}
