use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graph::ProblemInstance;
use crate::joint::{JointPath, JointState};
use crate::planner::{JointIndex, JointMetric};

/// Slack allowed between stored and recomputed costs.
const COST_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct TreeVertex {
    pub state: JointState,
    pub parent: Option<usize>,
    /// Joint path from the parent's state to `state`; a single state at the root.
    pub edge: JointPath,
    pub cost_from_root: f64,
    /// Elapsed time when `state` is reached along the tree.
    pub arrival_time: f64,
    children: Vec<usize>,
}

impl TreeVertex {
    pub fn children(&self) -> &[usize] {
        &self.children
    }
}

/// RRT* tree over joint states. Vertex ids are dense and never reused; each
/// joint state appears at most once.
#[derive(Clone, Debug)]
pub struct SearchTree {
    vertices: Vec<TreeVertex>,
    lookup: FxHashMap<JointState, usize>,
    index: JointIndex,
}

impl SearchTree {
    pub const ROOT: usize = 0;

    pub fn new(instance: &ProblemInstance, root: JointState, metric: JointMetric) -> Self {
        let mut tree = SearchTree {
            vertices: Vec::new(),
            lookup: FxHashMap::default(),
            index: JointIndex::new(2 * root.arity(), metric),
        };
        tree.push(
            instance,
            TreeVertex {
                edge: JointPath::empty(root.clone()),
                state: root,
                parent: None,
                cost_from_root: 0.0,
                arrival_time: 0.0,
                children: Vec::new(),
            },
        );
        tree
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, id: usize) -> Result<&TreeVertex> {
        self.vertices.get(id).ok_or(Error::UnknownVertex(id))
    }

    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }

    pub fn find(&self, state: &JointState) -> Option<usize> {
        self.lookup.get(state).copied()
    }

    pub fn metric(&self) -> JointMetric {
        self.index.metric()
    }

    pub fn index(&self) -> &JointIndex {
        &self.index
    }

    fn push(&mut self, instance: &ProblemInstance, vertex: TreeVertex) -> usize {
        let id = self.vertices.len();
        let p = flatten(instance, &vertex.state);
        self.index.insert(id, &p);
        self.lookup.insert(vertex.state.clone(), id);
        if let Some(parent) = vertex.parent {
            self.vertices[parent].children.push(id);
        }
        self.vertices.push(vertex);
        id
    }

    /// Adds the end state of `edge` as a child of `parent`.
    pub fn insert(&mut self, instance: &ProblemInstance, parent: usize, edge: JointPath) -> Result<usize> {
        let p = self.vertex(parent)?;
        debug_assert_eq!(edge.start(), &p.state);
        let state = edge.end().clone();
        if let Some(existing) = self.find(&state) {
            return Err(Error::Soundness(format!("joint state {state} is already vertex {existing}")));
        }
        let vertex = TreeVertex {
            cost_from_root: p.cost_from_root + edge.cost,
            arrival_time: p.arrival_time + edge.duration,
            state,
            parent: Some(parent),
            edge,
            children: Vec::new(),
        };
        Ok(self.push(instance, vertex))
    }

    /// Reattaches `vertex` below `new_parent` via `edge` and shifts the
    /// costs and arrival times of its whole subtree.
    pub fn reparent(&mut self, vertex: usize, new_parent: usize, edge: JointPath) -> Result<()> {
        self.vertex(vertex)?;
        self.vertex(new_parent)?;
        if vertex == Self::ROOT || self.is_ancestor(vertex, new_parent) {
            return Err(Error::CyclicRewire { vertex, parent: new_parent });
        }
        let (cost, arrival) = {
            let p = &self.vertices[new_parent];
            (p.cost_from_root + edge.cost, p.arrival_time + edge.duration)
        };
        let old_parent = self.vertices[vertex].parent.expect("non-root vertex has a parent");
        self.vertices[old_parent].children.retain(|&c| c != vertex);
        self.vertices[new_parent].children.push(vertex);
        let v = &mut self.vertices[vertex];
        let cost_delta = cost - v.cost_from_root;
        let arrival_delta = arrival - v.arrival_time;
        v.parent = Some(new_parent);
        v.edge = edge;
        self.shift_subtree(vertex, cost_delta, arrival_delta);
        Ok(())
    }

    /// Whether `a` lies on the root path of `b` (or equals it).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut at = Some(b);
        while let Some(v) = at {
            if v == a {
                return true;
            }
            at = self.vertices[v].parent;
        }
        false
    }

    fn shift_subtree(&mut self, vertex: usize, cost_delta: f64, arrival_delta: f64) {
        let mut stack = vec![vertex];
        while let Some(v) = stack.pop() {
            let node = &mut self.vertices[v];
            node.cost_from_root += cost_delta;
            node.arrival_time += arrival_delta;
            stack.extend_from_slice(&node.children);
        }
    }

    /// The joint path from the root to `vertex`.
    pub fn path_to(&self, vertex: usize) -> Result<JointPath> {
        self.vertex(vertex)?;
        let mut chain = Vec::new();
        let mut at = Some(vertex);
        while let Some(v) = at {
            chain.push(v);
            at = self.vertices[v].parent;
        }
        let mut path = JointPath::empty(self.vertices[Self::ROOT].state.clone());
        for &v in chain.iter().rev().skip(1) {
            path.extend(&self.vertices[v].edge);
        }
        Ok(path)
    }

    /// Checks the structural invariants: root cost 0, per-edge cost
    /// consistency, acyclic parent links, child lists matching parent links,
    /// and the spatial index holding exactly the vertex set.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Soundness(msg));
        let root = &self.vertices[Self::ROOT];
        if root.parent.is_some() || root.cost_from_root != 0.0 {
            return fail("root has a parent or nonzero cost".into());
        }
        for (id, v) in self.vertices.iter().enumerate().skip(1) {
            let Some(p) = v.parent else {
                return fail(format!("vertex {id} has no parent"));
            };
            let parent = &self.vertices[p];
            if v.edge.start() != &parent.state || v.edge.end() != &v.state {
                return fail(format!("edge of vertex {id} does not join its parent"));
            }
            if (parent.cost_from_root + v.edge.cost - v.cost_from_root).abs() > COST_SLACK {
                return fail(format!("cost of vertex {id} disagrees with its edge"));
            }
            if !parent.children.contains(&id) {
                return fail(format!("vertex {id} missing from its parent's children"));
            }
        }
        // acyclic: every vertex reaches the root within len steps
        for id in 0..self.vertices.len() {
            let mut at = Some(id);
            let mut hops = 0;
            while let Some(v) = at {
                hops += 1;
                if hops > self.vertices.len() {
                    return fail(format!("parent cycle through vertex {id}"));
                }
                at = self.vertices[v].parent;
            }
        }
        let mut items: Vec<usize> = self.index.items().collect();
        items.sort_unstable();
        if items != (0..self.vertices.len()).collect::<Vec<_>>() || self.lookup.len() != self.vertices.len() {
            return fail("spatial index does not match the vertex set".into());
        }
        Ok(())
    }
}

pub(crate) fn flatten(instance: &ProblemInstance, state: &JointState) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * state.arity());
    for (i, &w) in state.iter().enumerate() {
        let p = instance.graph(i).position(w);
        out.push(p.x);
        out.push(p.y);
    }
    out
}

/// RRT* near radius for a tree of `m` vertices in a 2n-dimensional joint space.
pub fn near_radius(m: usize, n_agents: usize, eta: u32, gamma: f64) -> f64 {
    let cap = eta as f64;
    if m < 2 {
        return 0.0;
    }
    let m = m as f64;
    let shrink = (m.ln() / m).powf(1.0 / (2 * n_agents) as f64);
    cap.min(gamma * shrink)
}

/// Vertex closest to `x` under the tree's joint metric; ties go to the
/// smaller id.
pub fn nearest(tree: &SearchTree, instance: &ProblemInstance, x: &JointState) -> Result<usize> {
    tree.index
        .nearest(&flatten(instance, x))
        .map(|(id, _)| id)
        .ok_or(Error::EmptyTree)
}

/// Vertices within `radius` of `x`, sorted by id.
pub fn near(tree: &SearchTree, instance: &ProblemInstance, x: &JointState, radius: f64) -> Result<Vec<usize>> {
    if tree.is_empty() {
        return Err(Error::EmptyTree);
    }
    Ok(tree.index.within(&flatten(instance, x), radius))
}

/// Shifts the cost of `vertex` and its whole subtree by `delta`.
pub fn rewire_cost_propagation(tree: &mut SearchTree, vertex: usize, delta: f64) -> Result<()> {
    tree.vertex(vertex)?;
    tree.shift_subtree(vertex, delta, 0.0);
    Ok(())
}
