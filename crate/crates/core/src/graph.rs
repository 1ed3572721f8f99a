//! Overlay graph: an undirected simple graph over a fixed pool of node slots,
//! each either active (participating in the overlay) or inactive (failed /
//! not yet joined). Neighbor sets are ordered, so every traversal and every
//! exported artifact is deterministic.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Identifier of a node slot; dense in `0..capacity`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} is out of bounds")]
    OutOfBounds(NodeId),
    #[error("node {0} is inactive")]
    Inactive(NodeId),
    #[error("node {0} is already active")]
    AlreadyActive(NodeId),
    #[error("self-loop on node {0} rejected")]
    SelfLoop(NodeId),
    #[error("node {1} is not a neighbor of node {0}")]
    NotANeighbor(NodeId, NodeId),
}

/// Undirected simple graph with an active/inactive lifecycle per node slot.
///
/// Capacity is fixed at construction; inactive slots form the pool from which
/// later joins are drawn. Inactive nodes never appear in any adjacency set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlayGraph {
    active: Vec<bool>,
    adj: Vec<BTreeSet<NodeId>>,
}

impl OverlayGraph {
    /// Creates a graph with `capacity` node slots, all inactive.
    pub fn new(capacity: usize) -> Self {
        OverlayGraph {
            active: vec![false; capacity],
            adj: vec![BTreeSet::new(); capacity],
        }
    }

    /// Creates a graph with `n` slots, all active and unlinked.
    pub fn with_active(n: usize) -> Self {
        OverlayGraph {
            active: vec![true; n],
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn capacity(&self) -> usize {
        self.active.len()
    }

    fn check_bounds(&self, n: NodeId) -> Result<(), GraphError> {
        if n.index() >= self.active.len() {
            Err(GraphError::OutOfBounds(n))
        } else {
            Ok(())
        }
    }

    fn check_active(&self, n: NodeId) -> Result<(), GraphError> {
        self.check_bounds(n)?;
        if !self.active[n.index()] {
            Err(GraphError::Inactive(n))
        } else {
            Ok(())
        }
    }

    pub fn is_active(&self, n: NodeId) -> bool {
        n.index() < self.active.len() && self.active[n.index()]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    /// Active node ids in ascending order.
    pub fn active_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter(|(_, a)| **a)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Inactive node ids in ascending order.
    pub fn inactive_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter(|(_, a)| !**a)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// First neighborhood of `n` (empty for inactive nodes).
    pub fn neighbors(&self, n: NodeId) -> &BTreeSet<NodeId> {
        &self.adj[n.index()]
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adj[n.index()].len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        a.index() < self.adj.len() && self.adj[a.index()].contains(&b)
    }

    /// Adds the undirected edge `(a, b)`. Returns `false` if it already
    /// existed. Both endpoints must be active; self-loops are rejected.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<bool, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        self.check_active(a)?;
        self.check_active(b)?;
        let inserted = self.adj[a.index()].insert(b);
        self.adj[b.index()].insert(a);
        Ok(inserted)
    }

    /// Removes the undirected edge `(a, b)`. Returns `false` if it was absent.
    pub fn remove_edge(&mut self, a: NodeId, b: NodeId) -> Result<bool, GraphError> {
        self.check_bounds(a)?;
        self.check_bounds(b)?;
        let removed = self.adj[a.index()].remove(&b);
        self.adj[b.index()].remove(&a);
        Ok(removed)
    }

    /// Activates an inactive slot; it starts with an empty neighborhood.
    pub fn activate_node(&mut self, n: NodeId) -> Result<(), GraphError> {
        self.check_bounds(n)?;
        if self.active[n.index()] {
            return Err(GraphError::AlreadyActive(n));
        }
        self.active[n.index()] = true;
        debug_assert!(self.adj[n.index()].is_empty());
        Ok(())
    }

    /// Deactivates `f`, removing its whole star. Returns the former
    /// neighborhood in ascending order.
    pub fn fail_node(&mut self, f: NodeId) -> Result<Vec<NodeId>, GraphError> {
        self.check_active(f)?;
        let former: Vec<NodeId> = self.adj[f.index()].iter().copied().collect();
        for &m in &former {
            self.adj[m.index()].remove(&f);
        }
        self.adj[f.index()].clear();
        self.active[f.index()] = false;
        Ok(former)
    }

    /// Second neighbors of `n` known through `m`: members of `m`'s
    /// neighborhood that are neither `n` itself nor first neighbors of `n`.
    pub fn second_neighbors_via(&self, n: NodeId, m: NodeId) -> BTreeSet<NodeId> {
        let pi_n = &self.adj[n.index()];
        self.adj[m.index()]
            .iter()
            .copied()
            .filter(|p| *p != n && !pi_n.contains(p))
            .collect()
    }

    /// Full second neighborhood of `n`: union of `second_neighbors_via(n, k)`
    /// over all first neighbors `k`, minus the first neighborhood and `n`.
    pub fn second_neighbors(&self, n: NodeId) -> BTreeSet<NodeId> {
        let pi_n = &self.adj[n.index()];
        let mut out = BTreeSet::new();
        for &k in pi_n {
            for &p in &self.adj[k.index()] {
                if p != n && !pi_n.contains(&p) {
                    out.insert(p);
                }
            }
        }
        out
    }

    /// Number of common neighbors of `n` and `m` (triangles on the edge when
    /// `(n, m)` is an edge).
    pub fn triangle_count(&self, n: NodeId, m: NodeId) -> usize {
        let (small, large) = if self.degree(n) <= self.degree(m) {
            (n, m)
        } else {
            (m, n)
        };
        let large_adj = &self.adj[large.index()];
        self.adj[small.index()]
            .iter()
            .filter(|c| large_adj.contains(c))
            .count()
    }

    /// Edge clustering coefficient of `(n, m)`:
    /// `triangles / min(|Π_n| - 1, |Π_m| - 1)`, and 0 when that denominator
    /// is 0 (either endpoint has degree <= 1).
    pub fn ecc(&self, n: NodeId, m: NodeId) -> f64 {
        let dn = self.degree(n);
        let dm = self.degree(m);
        let denom = dn.min(dm).saturating_sub(1);
        if denom == 0 {
            return 0.0;
        }
        self.triangle_count(n, m) as f64 / denom as f64
    }

    /// All edges as `(u, v)` pairs with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (i, set) in self.adj.iter().enumerate() {
            let u = NodeId(i as u32);
            for &v in set.iter() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Edge list as text: one `u v` line per edge with `u < v` numerically,
    /// lines sorted lexicographically (as strings), `\n` endings.
    pub fn export_edge_list(&self) -> String {
        let mut lines: Vec<String> = self
            .edges()
            .iter()
            .map(|(u, v)| format!("{} {}", u, v))
            .collect();
        lines.sort();
        let mut out = String::new();
        for line in lines {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}
