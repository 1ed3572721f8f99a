//! Self-healing protocols.
//!
//! When a node fails, each surviving neighbor computes the set of former
//! two-hop contacts that became unreachable within two hops (its "lost set")
//! and tries to re-link to them directly. The basic protocol always heals;
//! the ECC-gated variant first draws a uniform sample per neighbor and only
//! participates when the sample exceeds the edge clustering coefficient of
//! its link to the failed node, so redundant (triangle-rich) regions heal
//! less aggressively. An optional periodic link-reduction pass prunes
//! high-ECC links from nodes that grew past their moving-average targets.
//!
//! Message-passing contention is emulated by giving every pending link
//! intent an independent uniform timestamp and executing intents in
//! timestamp order against the live graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::graph::{GraphError, NodeId, OverlayGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ProtocolKind {
    /// No healing at all.
    None,
    /// Second-neighborhood healing.
    P2n,
    /// Second-neighborhood healing gated per neighbor by edge clustering.
    PEcc,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProtocolKind::None => "none",
            ProtocolKind::P2n => "p2n",
            ProtocolKind::PEcc => "pecc",
        };
        f.write_str(s)
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ProtocolKind::None),
            "p2n" => Ok(ProtocolKind::P2n),
            "pecc" => Ok(ProtocolKind::PEcc),
            other => Err(format!(
                "unknown protocol `{other}` (expected none, p2n or pecc)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    /// A node stops issuing link requests above this degree, and refuses
    /// incoming ones; the resulting hard cap is `threshold_degree + 1`.
    pub threshold_degree: usize,
    /// Enables the periodic link-reduction pass.
    pub link_reduction: bool,
    /// Only links with ECC strictly above this are candidates for removal.
    pub t_ecc: f64,
    /// Maximum links removed per reduction invocation.
    pub r: usize,
    /// Link reduction runs every `check_period` steps.
    pub check_period: u32,
    /// Moving-average window (in samples) for the reduction targets.
    pub target_window: usize,
    /// Reduction triggers only when degree and neighborhood links exceed
    /// their targets by this factor.
    pub excess_factor: f64,
}

impl ProtocolConfig {
    pub fn new(kind: ProtocolKind) -> Self {
        ProtocolConfig {
            kind,
            threshold_degree: 100,
            link_reduction: false,
            t_ecc: 0.5,
            r: 1,
            check_period: 10,
            target_window: 10,
            excess_factor: 1.5,
        }
    }
}

/// Former two-hop contacts of `n` through `f` that no other neighbor of `n`
/// can still reach in one hop: the nodes `n` actually loses when `f` fails.
/// Evaluated on the graph *before* the failure; `f` must be a neighbor of `n`.
pub fn compute_lost_set(
    g: &OverlayGraph,
    n: NodeId,
    f: NodeId,
) -> Result<BTreeSet<NodeId>, GraphError> {
    if !g.has_edge(n, f) {
        return Err(GraphError::NotANeighbor(n, f));
    }
    let mut lost = BTreeSet::new();
    'candidates: for p in g.second_neighbors_via(n, f) {
        for &q in g.neighbors(n) {
            if q != f && g.neighbors(q).contains(&p) {
                continue 'candidates;
            }
        }
        lost.insert(p);
    }
    Ok(lost)
}

/// Everything the healing pass needs from the moment just before a failure:
/// the victim's neighborhood, per-neighbor ECC toward the victim, and each
/// neighbor's lost set.
#[derive(Clone, Debug, PartialEq)]
pub struct FailureSnapshot {
    pub failed: NodeId,
    pub former_neighbors: Vec<NodeId>,
    pub ecc_to_failed: BTreeMap<NodeId, f64>,
    pub lost_sets: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl FailureSnapshot {
    /// Captures the snapshot; `f` must still be alive and wired.
    pub fn capture(g: &OverlayGraph, f: NodeId) -> Result<Self, GraphError> {
        if !g.is_active(f) {
            return Err(GraphError::Inactive(f));
        }
        let former_neighbors: Vec<NodeId> = g.neighbors(f).iter().copied().collect();
        let mut ecc_to_failed = BTreeMap::new();
        let mut lost_sets = BTreeMap::new();
        for &n in &former_neighbors {
            ecc_to_failed.insert(n, g.ecc(n, f));
            lost_sets.insert(n, compute_lost_set(g, n, f)?);
        }
        Ok(FailureSnapshot {
            failed: f,
            former_neighbors,
            ecc_to_failed,
            lost_sets,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HealReport {
    pub links_created: usize,
    pub refused: usize,
    pub skipped: usize,
    /// Edges added, in execution order.
    pub created: Vec<(NodeId, NodeId)>,
    /// ECC-gate outcome per former neighbor (ascending), gated variant only.
    pub gate_results: Vec<(NodeId, bool)>,
}

/// Runs the healing pass for one failure. The failure must already be
/// applied to `g` and `snapshot` captured beforehand.
pub fn heal_failure<R: Rng>(
    g: &mut OverlayGraph,
    snapshot: &FailureSnapshot,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<HealReport, GraphError> {
    let mut report = HealReport::default();
    if cfg.kind == ProtocolKind::None {
        return Ok(report);
    }

    // The gated variant draws once per surviving neighbor, in ascending node
    // order, against the pre-failure ECC of its link to the victim.
    let mut participants: Vec<NodeId> = Vec::new();
    for &n in &snapshot.former_neighbors {
        if !g.is_active(n) {
            continue;
        }
        match cfg.kind {
            ProtocolKind::P2n => participants.push(n),
            ProtocolKind::PEcc => {
                let ecc = snapshot.ecc_to_failed[&n];
                let pass = rng.random::<f64>() > ecc;
                report.gate_results.push((n, pass));
                if pass {
                    participants.push(n);
                }
            }
            ProtocolKind::None => unreachable!(),
        }
    }

    // One uniform timestamp per pending intent emulates each node waiting a
    // random time before every request; ties cannot realistically occur but
    // are broken by (owner, target) for a total order.
    let mut timed: Vec<(f64, NodeId, NodeId)> = Vec::new();
    for &n in &participants {
        for &p in &snapshot.lost_sets[&n] {
            timed.push((rng.random::<f64>(), n, p));
        }
    }
    timed.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let order: Vec<(NodeId, NodeId)> = timed.into_iter().map(|(_, n, p)| (n, p)).collect();

    execute_intents(g, snapshot, cfg, &participants, &order, &mut report)?;
    Ok(report)
}

/// Healing pass with an explicit participant set and intent order; the
/// randomized entry point reduces to this. Exposed so contention orders can
/// be enumerated exhaustively.
pub fn heal_failure_ordered(
    g: &mut OverlayGraph,
    snapshot: &FailureSnapshot,
    cfg: &ProtocolConfig,
    participants: &[NodeId],
    order: &[(NodeId, NodeId)],
) -> Result<HealReport, GraphError> {
    let mut report = HealReport::default();
    execute_intents(g, snapshot, cfg, participants, order, &mut report)?;
    Ok(report)
}

fn execute_intents(
    g: &mut OverlayGraph,
    snapshot: &FailureSnapshot,
    cfg: &ProtocolConfig,
    participants: &[NodeId],
    order: &[(NodeId, NodeId)],
    report: &mut HealReport,
) -> Result<(), GraphError> {
    let mut pending: BTreeMap<NodeId, BTreeSet<NodeId>> = participants
        .iter()
        .map(|n| (*n, snapshot.lost_sets[n].clone()))
        .collect();

    for &(n, p) in order {
        // Withdrawn by an earlier link notification (or already consumed).
        let live = pending.get_mut(&n).map(|s| s.remove(&p)).unwrap_or(false);
        if !live {
            report.skipped += 1;
            continue;
        }
        if g.degree(n) > cfg.threshold_degree {
            report.skipped += 1;
            continue;
        }
        // The target refuses when the requester is already within two hops
        // or the target itself is saturated.
        if g.has_edge(n, p) || g.triangle_count(n, p) > 0 {
            report.refused += 1;
            continue;
        }
        if g.degree(p) > cfg.threshold_degree {
            report.refused += 1;
            continue;
        }
        g.add_edge(n, p)?;
        report.links_created += 1;
        report.created.push((n, p));
        // Both endpoints announce the new link; neighbors drop the other
        // endpoint from their own pending sets.
        let around_n: Vec<NodeId> = g.neighbors(n).iter().copied().collect();
        for q in around_n {
            if let Some(s) = pending.get_mut(&q) {
                s.remove(&p);
            }
        }
        let around_p: Vec<NodeId> = g.neighbors(p).iter().copied().collect();
        for q in around_p {
            if let Some(s) = pending.get_mut(&q) {
                s.remove(&n);
            }
        }
    }
    Ok(())
}

/// Moving-average targets for the link-reduction trigger.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeTargets {
    degrees: VecDeque<usize>,
    links: VecDeque<usize>,
    window: usize,
}

impl NodeTargets {
    pub fn new(window: usize) -> Self {
        NodeTargets {
            degrees: VecDeque::new(),
            links: VecDeque::new(),
            window: window.max(1),
        }
    }

    pub fn push(&mut self, degree: usize, links: usize) {
        if self.degrees.len() == self.window {
            self.degrees.pop_front();
            self.links.pop_front();
        }
        self.degrees.push_back(degree);
        self.links.push_back(links);
    }

    pub fn ready(&self) -> bool {
        !self.degrees.is_empty()
    }

    pub fn target_degree(&self) -> f64 {
        mean_usize(&self.degrees)
    }

    pub fn target_links(&self) -> f64 {
        mean_usize(&self.links)
    }
}

fn mean_usize(values: &VecDeque<usize>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<usize>() as f64 / values.len() as f64
}

/// `L_n`: the number of distinct edges with at least one endpoint in
/// `Π_n ∪ {n}`.
pub fn neighborhood_links(g: &OverlayGraph, n: NodeId) -> usize {
    let mut scope: BTreeSet<NodeId> = g.neighbors(n).clone();
    scope.insert(n);
    let mut edges: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for &u in &scope {
        for &v in g.neighbors(u) {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    edges.len()
}

/// Records the current `(degree, L_n)` sample into the node's targets.
pub fn update_targets(g: &OverlayGraph, n: NodeId, targets: &mut NodeTargets) {
    targets.push(g.degree(n), neighborhood_links(g, n));
}

/// Removes up to `cfg.r` links of `n` whose ECC exceeds `cfg.t_ecc`, highest
/// ECC first (ties toward the smallest neighbor id), but only when both the
/// degree and the neighborhood link count exceed their moving-average targets
/// by `cfg.excess_factor`. Returns the removed edges.
pub fn periodic_link_reduction(
    g: &mut OverlayGraph,
    n: NodeId,
    targets: &NodeTargets,
    cfg: &ProtocolConfig,
) -> Result<Vec<(NodeId, NodeId)>, GraphError> {
    if !targets.ready() {
        return Ok(Vec::new());
    }
    let degree = g.degree(n) as f64;
    let links = neighborhood_links(g, n) as f64;
    if degree <= cfg.excess_factor * targets.target_degree()
        || links <= cfg.excess_factor * targets.target_links()
    {
        return Ok(Vec::new());
    }
    let mut candidates: Vec<(f64, NodeId)> = g
        .neighbors(n)
        .iter()
        .map(|&m| (g.ecc(n, m), m))
        .filter(|(e, _)| *e > cfg.t_ecc)
        .collect();
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut removed = Vec::new();
    for (_, m) in candidates.into_iter().take(cfg.r) {
        g.remove_edge(n, m)?;
        removed.push((n, m));
    }
    Ok(removed)
}
