//! Per-step network metrics: component structure, neighborhood sizes,
//! clustering, diameter, betweenness centrality and degree drift.
//!
//! All functions operate on the active subgraph only. Traversals run on a
//! compact snapshot of the adjacency so the per-step cost stays close to
//! plain BFS over `Vec<u32>` lists.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::{NodeId, OverlayGraph};

/// One row of the per-step metrics trace. `step` 0 is the pre-churn baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub step: u32,
    pub main_component_size: usize,
    pub main_component_fraction: f64,
    pub isolated_count: usize,
    pub avg_deg1: f64,
    pub avg_deg2: f64,
    pub clustering: f64,
    pub diameter: usize,
    pub mean_degree_gap: f64,
    /// True when the row was measured with zero active nodes; every metric
    /// is then reported as 0.
    pub no_active: bool,
}

impl MetricsRow {
    fn empty(step: u32) -> Self {
        MetricsRow {
            step,
            main_component_size: 0,
            main_component_fraction: 0.0,
            isolated_count: 0,
            avg_deg1: 0.0,
            avg_deg2: 0.0,
            clustering: 0.0,
            diameter: 0,
            mean_degree_gap: 0.0,
            no_active: true,
        }
    }

    /// Metric columns in trace order (everything except `step`).
    pub fn values(&self) -> [f64; 8] {
        [
            self.main_component_size as f64,
            self.main_component_fraction,
            self.isolated_count as f64,
            self.avg_deg1,
            self.avg_deg2,
            self.clustering,
            self.diameter as f64,
            self.mean_degree_gap,
        ]
    }
}

/// Compact index-space snapshot of the active subgraph.
struct Compact {
    ids: Vec<NodeId>,
    adj: Vec<Vec<u32>>,
}

impl Compact {
    fn build(g: &OverlayGraph) -> Self {
        let ids: Vec<NodeId> = g.active_nodes().collect();
        let mut pos = vec![u32::MAX; g.capacity()];
        for (i, id) in ids.iter().enumerate() {
            pos[id.index()] = i as u32;
        }
        let adj = ids
            .iter()
            .map(|id| g.neighbors(*id).iter().map(|m| pos[m.index()]).collect())
            .collect();
        Compact { ids, adj }
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    /// Component label per node plus component sizes, labels assigned in
    /// ascending order of each component's smallest node.
    fn components(&self) -> (Vec<u32>, Vec<usize>) {
        let n = self.len();
        let mut label = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != u32::MAX {
                continue;
            }
            let comp = sizes.len() as u32;
            let mut size = 0usize;
            label[start] = comp;
            queue.push_back(start as u32);
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &w in &self.adj[v as usize] {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = comp;
                        queue.push_back(w);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    /// BFS distances from `src`; `u32::MAX` marks unreachable nodes.
    fn bfs(&self, src: u32, dist: &mut [u32], queue: &mut VecDeque<u32>) {
        dist.fill(u32::MAX);
        dist[src as usize] = 0;
        queue.clear();
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize];
            for &w in &self.adj[v as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dv + 1;
                    queue.push_back(w);
                }
            }
        }
    }
}

/// Largest connected component among active nodes; ties go to the component
/// containing the smallest node id.
pub fn main_component(g: &OverlayGraph) -> BTreeSet<NodeId> {
    let c = Compact::build(g);
    if c.len() == 0 {
        return BTreeSet::new();
    }
    let (label, sizes) = c.components();
    // Components are labeled in ascending order of smallest member, so the
    // first label attaining the maximum size wins ties.
    let mut best = 0u32;
    for (i, s) in sizes.iter().enumerate() {
        if *s > sizes[best as usize] {
            best = i as u32;
        }
    }
    label
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == best)
        .map(|(i, _)| c.ids[i])
        .collect()
}

/// Number of active nodes with no neighbors.
pub fn isolated_count(g: &OverlayGraph) -> usize {
    g.active_nodes().filter(|n| g.degree(*n) == 0).count()
}

/// Mean first- and second-neighborhood sizes over active nodes.
pub fn average_neighborhood_sizes(g: &OverlayGraph) -> (f64, f64) {
    let mut count = 0usize;
    let mut sum1 = 0usize;
    let mut sum2 = 0usize;
    for n in g.active_nodes() {
        count += 1;
        sum1 += g.degree(n);
        sum2 += g.second_neighbors(n).len();
    }
    if count == 0 {
        (0.0, 0.0)
    } else {
        (sum1 as f64 / count as f64, sum2 as f64 / count as f64)
    }
}

/// Mean local clustering coefficient over active nodes
/// (`2 * links_among_neighbors / (deg * (deg - 1))`, 0 for degree < 2).
pub fn mean_clustering(g: &OverlayGraph) -> f64 {
    let mut count = 0usize;
    let mut sum = 0.0f64;
    for n in g.active_nodes() {
        count += 1;
        sum += local_clustering(g, n);
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn local_clustering(g: &OverlayGraph, n: NodeId) -> f64 {
    let d = g.degree(n);
    if d < 2 {
        return 0.0;
    }
    // Sum of |Π_n ∩ Π_m| over m ∈ Π_n counts each link among neighbors twice.
    let twice_links: usize = g
        .neighbors(n)
        .iter()
        .map(|m| g.triangle_count(n, *m))
        .sum();
    twice_links as f64 / (d * (d - 1)) as f64
}

/// Diameter of the main component: maximum eccentricity over its members,
/// by BFS from every member. 0 for an empty graph or a singleton component.
pub fn diameter(g: &OverlayGraph) -> usize {
    let c = Compact::build(g);
    if c.len() == 0 {
        return 0;
    }
    let (label, sizes) = c.components();
    let mut best = 0u32;
    for (i, s) in sizes.iter().enumerate() {
        if *s > sizes[best as usize] {
            best = i as u32;
        }
    }
    let mut dist = vec![u32::MAX; c.len()];
    let mut queue = VecDeque::new();
    let mut max = 0u32;
    for v in 0..c.len() as u32 {
        if label[v as usize] != best {
            continue;
        }
        c.bfs(v, &mut dist, &mut queue);
        for w in 0..c.len() {
            if label[w] == best && dist[w] != u32::MAX && dist[w] > max {
                max = dist[w];
            }
        }
    }
    max as usize
}

/// Betweenness centrality of every active node: over unordered pairs of
/// distinct active nodes, the fraction of shortest paths passing through the
/// node as an interior vertex. Unnormalized.
pub fn betweenness(g: &OverlayGraph) -> BTreeMap<NodeId, f64> {
    let c = Compact::build(g);
    let n = c.len();
    let mut bc = vec![0.0f64; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![u32::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    for s in 0..n as u32 {
        sigma.fill(0.0);
        dist.fill(u32::MAX);
        delta.fill(0.0);
        order.clear();
        sigma[s as usize] = 1.0;
        dist[s as usize] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let dv = dist[v as usize];
            for &w in &c.adj[v as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dv + 1;
                    queue.push_back(w);
                }
                if dist[w as usize] == dv + 1 {
                    sigma[w as usize] += sigma[v as usize];
                }
            }
        }
        // Dependency accumulation in reverse BFS order.
        for &w in order.iter().rev() {
            let dw = dist[w as usize];
            for &v in &c.adj[w as usize] {
                if dist[v as usize] + 1 == dw {
                    delta[v as usize] +=
                        sigma[v as usize] / sigma[w as usize] * (1.0 + delta[w as usize]);
                }
            }
            if w != s {
                bc[w as usize] += delta[w as usize];
            }
        }
    }
    // Each unordered pair was accumulated from both endpoints.
    c.ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, bc[i] / 2.0))
        .collect()
}

/// Mean absolute difference between current and initial degree, averaged over
/// active nodes whose degree changed; 0 when none changed. Nodes absent from
/// `initial` are ignored.
pub fn mean_degree_gap(g: &OverlayGraph, initial: &BTreeMap<NodeId, usize>) -> f64 {
    let mut changed = 0usize;
    let mut total = 0usize;
    for n in g.active_nodes() {
        if let Some(&d0) = initial.get(&n) {
            let d = g.degree(n);
            if d != d0 {
                changed += 1;
                total += d.abs_diff(d0);
            }
        }
    }
    if changed == 0 {
        0.0
    } else {
        total as f64 / changed as f64
    }
}

/// Number of neighbors of `n` lying in a different cluster, per the
/// `cluster_of` assignment (indexed by node id).
pub fn inter_cluster_degree(g: &OverlayGraph, cluster_of: &[u32], n: NodeId) -> usize {
    let own = cluster_of[n.index()];
    g.neighbors(n)
        .iter()
        .filter(|m| cluster_of[m.index()] != own)
        .count()
}

/// Computes the full metrics row for the current graph state.
pub fn collect_metrics(
    g: &OverlayGraph,
    initial_degrees: &BTreeMap<NodeId, usize>,
    step: u32,
) -> MetricsRow {
    let c = Compact::build(g);
    let active = c.len();
    if active == 0 {
        return MetricsRow::empty(step);
    }

    let (label, sizes) = c.components();
    let mut best = 0u32;
    for (i, s) in sizes.iter().enumerate() {
        if *s > sizes[best as usize] {
            best = i as u32;
        }
    }
    let main_size = sizes[best as usize];

    let mut isolated = 0usize;
    let mut sum_deg1 = 0usize;
    let mut sum_deg2 = 0usize;
    let mut sum_clustering = 0.0f64;

    // Stamped scan for second-neighborhood sizes, one epoch per node.
    let mut stamp = vec![u32::MAX; active];
    for v in 0..active {
        let d = c.adj[v].len();
        sum_deg1 += d;
        if d == 0 {
            isolated += 1;
        }
        let epoch = v as u32;
        stamp[v] = epoch;
        for &k in &c.adj[v] {
            stamp[k as usize] = epoch;
        }
        for &k in &c.adj[v] {
            for &p in &c.adj[k as usize] {
                if stamp[p as usize] != epoch {
                    stamp[p as usize] = epoch;
                    sum_deg2 += 1;
                }
            }
        }
        if d >= 2 {
            // Each link among neighbors is seen from both endpoints.
            let mut twice_links = 0usize;
            for &k in &c.adj[v] {
                twice_links += sorted_intersection_len(&c.adj[v], &c.adj[k as usize]);
            }
            sum_clustering += twice_links as f64 / (d * (d - 1)) as f64;
        }
    }

    // Diameter of the main component.
    let mut dist = vec![u32::MAX; active];
    let mut queue = VecDeque::new();
    let mut max_dist = 0u32;
    for v in 0..active as u32 {
        if label[v as usize] != best {
            continue;
        }
        c.bfs(v, &mut dist, &mut queue);
        for w in 0..active {
            if label[w] == best && dist[w] != u32::MAX && dist[w] > max_dist {
                max_dist = dist[w];
            }
        }
    }

    MetricsRow {
        step,
        main_component_size: main_size,
        main_component_fraction: main_size as f64 / active as f64,
        isolated_count: isolated,
        avg_deg1: sum_deg1 as f64 / active as f64,
        avg_deg2: sum_deg2 as f64 / active as f64,
        clustering: sum_clustering / active as f64,
        diameter: max_dist as usize,
        mean_degree_gap: mean_degree_gap(g, initial_degrees),
        no_active: false,
    }
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let mut i = 0;
    let mut j = 0;
    let mut count = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_from(n: usize, edges: &[(u32, u32)]) -> OverlayGraph {
        let mut g = OverlayGraph::with_active(n);
        for &(a, b) in edges {
            g.add_edge(NodeId(a), NodeId(b)).unwrap();
        }
        g
    }

    // ---- brute-force oracles -------------------------------------------

    /// All-pairs distances by Floyd-Warshall over the active subgraph.
    fn oracle_distances(g: &OverlayGraph) -> BTreeMap<(NodeId, NodeId), usize> {
        let ids: Vec<NodeId> = g.active_nodes().collect();
        let n = ids.len();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, a) in ids.iter().enumerate() {
            d[i][i] = 0;
            for (j, b) in ids.iter().enumerate() {
                if g.has_edge(*a, *b) {
                    d[i][j] = 1;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                if d[i][j] < inf {
                    out.insert((ids[i], ids[j]), d[i][j]);
                }
            }
        }
        out
    }

    /// Shortest-path counts via adjacency-matrix powers: a length-L walk
    /// between nodes at distance L cannot repeat a vertex, so the walk count
    /// equals the shortest-path count.
    pub(crate) fn oracle_betweenness(g: &OverlayGraph) -> BTreeMap<NodeId, f64> {
        let ids: Vec<NodeId> = g.active_nodes().collect();
        let n = ids.len();
        let mut adj = vec![vec![0u128; n]; n];
        for i in 0..n {
            for j in 0..n {
                if g.has_edge(ids[i], ids[j]) {
                    adj[i][j] = 1;
                }
            }
        }
        let dist_map = oracle_distances(g);
        let dist = |i: usize, j: usize| dist_map.get(&(ids[i], ids[j])).copied();
        let max_dist = dist_map.values().copied().max().unwrap_or(0);

        // powers[l][i][j] = number of walks of length l from i to j.
        let mut powers = Vec::with_capacity(max_dist + 1);
        let mut ident = vec![vec![0u128; n]; n];
        for (i, row) in ident.iter_mut().enumerate() {
            row[i] = 1;
        }
        powers.push(ident);
        for l in 1..=max_dist {
            let prev = &powers[l - 1];
            let mut next = vec![vec![0u128; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if prev[i][k] == 0 {
                        continue;
                    }
                    for j in 0..n {
                        next[i][j] += prev[i][k] * adj[k][j];
                    }
                }
            }
            powers.push(next);
        }
        let paths = |i: usize, j: usize, l: usize| powers[l][i][j];

        let mut bet = vec![0.0f64; n];
        for m in 0..n {
            for p in (m + 1)..n {
                let Some(dmp) = dist(m, p) else { continue };
                if dmp == 0 {
                    continue;
                }
                let total = paths(m, p, dmp);
                for v in 0..n {
                    if v == m || v == p {
                        continue;
                    }
                    let (Some(d1), Some(d2)) = (dist(m, v), dist(v, p)) else {
                        continue;
                    };
                    if d1 + d2 == dmp {
                        let through = paths(m, v, d1) * paths(v, p, d2);
                        bet[v] += through as f64 / total as f64;
                    }
                }
            }
        }
        ids.iter().enumerate().map(|(i, id)| (*id, bet[i])).collect()
    }

    // ---- unit tests -----------------------------------------------------

    #[test]
    fn averages_on_path() {
        // Path 1 - 2 - 3: the oracle is direct enumeration. deg1: (1+2+1)/3;
        // Π²: {3}, {}, {1} → (1+0+1)/3.
        let g = graph_from(4, &[(1, 2), (2, 3)]);
        let mut g2 = g.clone();
        g2.fail_node(NodeId(0)).unwrap();
        let (d1, d2) = average_neighborhood_sizes(&g2);
        assert!((d1 - 4.0 / 3.0).abs() < 1e-12);
        assert!((d2 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn averages_on_star() {
        // Star with 4 leaves: deg1 = (4 + 4*1)/5 = 8/5, deg2 = (0 + 4*3)/5 = 12/5.
        let g = graph_from(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let (d1, d2) = average_neighborhood_sizes(&g);
        assert!((d1 - 8.0 / 5.0).abs() < 1e-12);
        assert!((d2 - 12.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn clustering_square_with_chord() {
        // C_1 = C_3 = 2/3, C_2 = C_4 = 1 → mean 5/6.
        let g = graph_from(5, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]);
        let mut g = g;
        g.fail_node(NodeId(0)).unwrap();
        assert!((mean_clustering(&g) - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn clustering_degenerate() {
        let g = graph_from(3, &[(0, 1)]);
        // deg < 2 everywhere → all local coefficients 0.
        assert_eq!(mean_clustering(&g), 0.0);
    }

    #[test]
    fn main_component_and_ties() {
        // K3 on {0,1,2} plus edge (3,4): main component is the K3.
        let g = graph_from(5, &[(0, 1), (0, 2), (1, 2), (3, 4)]);
        let main: Vec<NodeId> = main_component(&g).into_iter().collect();
        assert_eq!(main, vec![NodeId(0), NodeId(1), NodeId(2)]);

        // Two K2s: tie broken toward the component with the smallest id.
        let g = graph_from(4, &[(2, 3), (0, 1)]);
        let main: Vec<NodeId> = main_component(&g).into_iter().collect();
        assert_eq!(main, vec![NodeId(0), NodeId(1)]);
    }

    #[test]
    fn diameter_ignores_other_components() {
        // Path of 4 plus separate K2 → diameter of the path = 3.
        let g = graph_from(6, &[(0, 1), (1, 2), (2, 3), (4, 5)]);
        assert_eq!(diameter(&g), 3);
        // K3 + K2: main is K3 with diameter 1.
        let g = graph_from(5, &[(0, 1), (0, 2), (1, 2), (3, 4)]);
        assert_eq!(diameter(&g), 1);
    }

    #[test]
    fn diameter_singleton_and_empty() {
        let g = OverlayGraph::with_active(3);
        assert_eq!(diameter(&g), 0);
        let g = OverlayGraph::with_active(0);
        assert_eq!(diameter(&g), 0);
    }

    #[test]
    fn betweenness_square() {
        // 4-cycle: each node carries half of the one crossing pair.
        let g = graph_from(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let oracle = oracle_betweenness(&g);
        let got = betweenness(&g);
        for n in 0..4u32 {
            let id = NodeId(n);
            assert!((got[&id] - 0.5).abs() < 1e-12);
            assert!((got[&id] - oracle[&id]).abs() < 1e-12);
        }
    }

    #[test]
    fn betweenness_path() {
        // Path 0-1-2: the middle node carries the single (0,2) pair.
        let g = graph_from(3, &[(0, 1), (1, 2)]);
        let got = betweenness(&g);
        assert!((got[&NodeId(1)] - 1.0).abs() < 1e-12);
        assert_eq!(got[&NodeId(0)], 0.0);
        assert_eq!(got[&NodeId(2)], 0.0);
    }

    #[test]
    fn betweenness_matches_oracle_on_random_graphs() {
        use crate::graph::NodeId;
        use rand::Rng;
        use rand::SeedableRng;
        use rand_chacha::ChaCha12Rng;
        for seed in 0..30u64 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let n = rng.random_range(3..14usize);
            let p = rng.random_range(0.15..0.7f64);
            let mut g = OverlayGraph::with_active(n);
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.random_bool(p) {
                        g.add_edge(NodeId(a as u32), NodeId(b as u32)).unwrap();
                    }
                }
            }
            let oracle = oracle_betweenness(&g);
            let got = betweenness(&g);
            assert_eq!(oracle.len(), got.len());
            for (id, b) in &oracle {
                assert!(
                    (got[id] - b).abs() < 1e-9,
                    "seed {seed} node {id}: {} vs oracle {}",
                    got[id],
                    b
                );
            }
        }
    }

    #[test]
    fn degree_gap_cases() {
        let g = graph_from(3, &[(0, 1), (1, 2)]);
        let mut initial = BTreeMap::new();
        initial.insert(NodeId(0), 1usize);
        initial.insert(NodeId(1), 2usize);
        initial.insert(NodeId(2), 3usize);
        // Only node 2 changed: |1 - 3| = 2.
        assert_eq!(mean_degree_gap(&g, &initial), 2.0);

        let mut unchanged = BTreeMap::new();
        unchanged.insert(NodeId(0), 1usize);
        unchanged.insert(NodeId(1), 2usize);
        unchanged.insert(NodeId(2), 1usize);
        assert_eq!(mean_degree_gap(&g, &unchanged), 0.0);
    }

    #[test]
    fn inter_cluster_degree_counts() {
        let g = graph_from(4, &[(0, 1), (0, 2), (0, 3)]);
        let clusters = vec![0u32, 0, 1, 1];
        assert_eq!(inter_cluster_degree(&g, &clusters, NodeId(0)), 2);
        assert_eq!(inter_cluster_degree(&g, &clusters, NodeId(2)), 1);
        assert_eq!(inter_cluster_degree(&g, &clusters, NodeId(1)), 0);
    }

    #[test]
    fn collect_metrics_k4() {
        let g = graph_from(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let initial: BTreeMap<NodeId, usize> =
            g.active_nodes().map(|n| (n, g.degree(n))).collect();
        let row = collect_metrics(&g, &initial, 7);
        assert_eq!(row.step, 7);
        assert_eq!(row.main_component_size, 4);
        assert_eq!(row.main_component_fraction, 1.0);
        assert_eq!(row.isolated_count, 0);
        assert_eq!(row.avg_deg1, 3.0);
        assert_eq!(row.avg_deg2, 0.0);
        assert_eq!(row.clustering, 1.0);
        assert_eq!(row.diameter, 1);
        assert_eq!(row.mean_degree_gap, 0.0);
        assert!(!row.no_active);
    }

    #[test]
    fn collect_metrics_matches_single_functions() {
        use rand::Rng;
        use rand::SeedableRng;
        use rand_chacha::ChaCha12Rng;
        for seed in 0..20u64 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let n = rng.random_range(2..30usize);
            let p = rng.random_range(0.05..0.5f64);
            let mut g = OverlayGraph::with_active(n);
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.random_bool(p) {
                        g.add_edge(NodeId(a as u32), NodeId(b as u32)).unwrap();
                    }
                }
            }
            let initial: BTreeMap<NodeId, usize> =
                g.active_nodes().map(|v| (v, g.degree(v))).collect();
            let row = collect_metrics(&g, &initial, 0);
            assert_eq!(row.main_component_size, main_component(&g).len());
            assert_eq!(row.isolated_count, isolated_count(&g));
            let (d1, d2) = average_neighborhood_sizes(&g);
            assert!((row.avg_deg1 - d1).abs() < 1e-12);
            assert!((row.avg_deg2 - d2).abs() < 1e-12);
            assert!((row.clustering - mean_clustering(&g)).abs() < 1e-12);
            assert_eq!(row.diameter, diameter(&g));
        }
    }

    #[test]
    fn collect_metrics_no_active() {
        let mut g = OverlayGraph::with_active(2);
        g.fail_node(NodeId(0)).unwrap();
        g.fail_node(NodeId(1)).unwrap();
        let row = collect_metrics(&g, &BTreeMap::new(), 3);
        assert!(row.no_active);
        assert_eq!(row.main_component_size, 0);
        assert_eq!(row.values(), [0.0; 8]);
    }

    #[test]
    fn all_isolated_nodes() {
        let g = OverlayGraph::with_active(3);
        let row = collect_metrics(&g, &BTreeMap::new(), 0);
        assert_eq!(row.isolated_count, 3);
        assert_eq!(row.main_component_size, 1);
        assert!((row.main_component_fraction - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(row.diameter, 0);
    }
}
