//! The minimum-spanning-tree partition scheme over tomonoid edge weights.
//!
//! Edge weights live in ℝ* × ℕ₀^{E_n}: the β-free pair energy plus an
//! indicator of the edge's canonical position. The order is lexicographic
//! with the real part first and the indicator coordinates prioritized left
//! to right, which makes every spanning-tree weight sum distinct
//! (admissibility) and the minimum spanning tree of a connected graph
//! unique. The interval-top map M sends a tree τ to the graph of all edges
//! at least as heavy as every edge on their τ-path; the intervals
//! [τ, M(τ)] partition the connected graphs on [n], which
//! [`verify_partition`] checks exhaustively.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::exec;
use crate::graphs::{
    self, edge_count, endpoint_table, subset_connected, EdgeSet, LabeledGraph, Tree,
};
use crate::potentials::{pair_energy, Configuration, Energy, PairPotential, PotentialError};

#[derive(Debug, Error, PartialEq)]
pub enum SchemeError {
    #[error("graph is disconnected; no spanning tree exists")]
    Disconnected,
    #[error("n = {n} out of range [2, {max}]")]
    NOutOfRange { n: usize, max: usize },
    #[error("weight table covers n = {0}, operation got n = {1}")]
    SizeMismatch(usize, usize),
    #[error("two spanning trees compared equal; the weight order is broken")]
    AdmissibilityViolated,
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Which canonical edge ordering supplies the tie-break coordinates. The
/// reverse order exists to test that observable totals do not depend on this
/// bookkeeping choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeOrder {
    #[default]
    Lexicographic,
    ReverseLexicographic,
}

/// Weight of a single edge: the pair energy and the edge's tie-break
/// position (1 = highest priority coordinate).
///
/// Total order: w > w′ iff value > value′, or the values tie and the
/// position is *smaller* — the earlier coordinate carrying the 1 wins the
/// left-to-right lexicographic comparison. Distinct edges never compare
/// equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TomonoidWeight {
    pub value: Energy,
    pub tiebreak_position: usize,
}

impl PartialOrd for TomonoidWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TomonoidWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .cmp(&other.value)
            .then_with(|| other.tiebreak_position.cmp(&self.tiebreak_position))
    }
}

/// Sum of edge weights over an edge set: the real part plus the full 0/1
/// indicator vector. Distinct edge sets have distinct indicators, so sums
/// never tie — exactly the admissibility property.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TomonoidSum {
    pub real_sum: Energy,
    pub indicator: EdgeSet,
}

/// β-free edge weights V(x_i − x_j) for every edge of K_n, plus the
/// tie-break order. All scheme operations read weights from here.
#[derive(Clone, Debug)]
pub struct WeightTable {
    n: usize,
    values: Vec<Energy>,
    order: EdgeOrder,
}

impl WeightTable {
    pub fn from_configuration(
        p: &PairPotential,
        c: &Configuration,
    ) -> Result<Self, SchemeError> {
        let n = c.n();
        if n < 2 {
            return Err(SchemeError::NOutOfRange { n, max: 11 });
        }
        let mut values = Vec::with_capacity(edge_count(n));
        for e in 0..edge_count(n) {
            let (i, j) = graphs::edge_endpoints(n, e);
            values.push(pair_energy(p, c, i, j)?);
        }
        Ok(WeightTable {
            n,
            values,
            order: EdgeOrder::Lexicographic,
        })
    }

    /// Raw values in canonical edge order, for synthetic test weights.
    pub fn from_values(n: usize, values: Vec<Energy>) -> Self {
        assert_eq!(values.len(), edge_count(n));
        WeightTable {
            n,
            values,
            order: EdgeOrder::Lexicographic,
        }
    }

    pub fn with_order(mut self, order: EdgeOrder) -> Self {
        self.order = order;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> EdgeOrder {
        self.order
    }

    pub fn value(&self, e: usize) -> Energy {
        self.values[e]
    }

    /// Tie-break position of edge `e`, 1-based; position 1 is the most
    /// significant indicator coordinate.
    pub fn position(&self, e: usize) -> usize {
        match self.order {
            EdgeOrder::Lexicographic => e + 1,
            EdgeOrder::ReverseLexicographic => self.values.len() - e,
        }
    }

    pub fn weight(&self, e: usize) -> TomonoidWeight {
        TomonoidWeight {
            value: self.values[e],
            tiebreak_position: self.position(e),
        }
    }

    /// Strict total order on edges: energy first, then earlier position is
    /// greater.
    pub fn cmp_edges(&self, a: usize, b: usize) -> Ordering {
        self.values[a]
            .cmp(&self.values[b])
            .then_with(|| self.position(b).cmp(&self.position(a)))
    }

    pub fn tree_sum(&self, edges: &EdgeSet) -> TomonoidSum {
        let mut real_sum = Energy::Finite(0.0);
        for e in edges.indices() {
            real_sum = real_sum + self.values[e];
        }
        TomonoidSum {
            real_sum,
            indicator: *edges,
        }
    }

    /// Order on edge-set sums: real part first; two +∞ real parts (hard-core
    /// ties) fall through to the indicator, compared coordinate-wise in
    /// position order with bit 1 > bit 0.
    pub fn cmp_sums(&self, a: &TomonoidSum, b: &TomonoidSum) -> Ordering {
        match a.real_sum.cmp(&b.real_sum) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let d = a.indicator.bits() ^ b.indicator.bits();
        if d == 0 {
            return Ordering::Equal;
        }
        let lead = match self.order {
            EdgeOrder::Lexicographic => d.trailing_zeros(),
            EdgeOrder::ReverseLexicographic => 63 - d.leading_zeros(),
        };
        if a.indicator.bits() >> lead & 1 == 1 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            self.parent[ra] = rb;
            true
        }
    }
}

/// The unique minimum spanning tree of a connected graph under the tomonoid
/// order, by Kruskal's algorithm on the edge-level total order. Greedy
/// selection minimizes the weight sum because the order is translation
/// invariant, so the usual exchange argument applies; [`mst_oracle`]
/// cross-checks this.
pub fn mst(g: &LabeledGraph, table: &WeightTable) -> Result<Tree, SchemeError> {
    if g.n != table.n() {
        return Err(SchemeError::SizeMismatch(table.n(), g.n));
    }
    let mut idxs: Vec<usize> = g.edges.indices().collect();
    idxs.sort_unstable_by(|&a, &b| table.cmp_edges(a, b));
    let mut uf = UnionFind::new(g.n);
    let mut edges = EdgeSet::empty(g.n);
    let mut picked = 0;
    for e in idxs {
        let (i, j) = graphs::edge_endpoints(g.n, e);
        if uf.union(i, j) {
            edges.insert_index(e);
            picked += 1;
            if picked == g.n - 1 {
                break;
            }
        }
    }
    if picked != g.n - 1 {
        return Err(SchemeError::Disconnected);
    }
    Ok(Tree::from_edge_set(edges).expect("Kruskal output is a spanning tree"))
}

/// Brute-force minimizer: enumerate every spanning tree of `g`, compare full
/// tomonoid sums, return the unique minimum. Independent oracle for [`mst`].
pub fn mst_oracle(g: &LabeledGraph, table: &WeightTable) -> Result<Tree, SchemeError> {
    if g.n != table.n() {
        return Err(SchemeError::SizeMismatch(table.n(), g.n));
    }
    if g.n > 6 {
        return Err(SchemeError::NOutOfRange { n: g.n, max: 6 });
    }
    let mut best: Option<(Tree, TomonoidSum)> = None;
    let mut found = false;
    for t in graphs::trees(g.n).expect("n within tree cap") {
        if !t.edge_set().is_subset_of(&g.edges) {
            continue;
        }
        found = true;
        let sum = table.tree_sum(&t.edge_set());
        match &best {
            None => best = Some((t, sum)),
            Some((_, cur)) => match table.cmp_sums(&sum, cur) {
                Ordering::Less => best = Some((t, sum)),
                Ordering::Equal => return Err(SchemeError::AdmissibilityViolated),
                Ordering::Greater => {}
            },
        }
    }
    if !found {
        return Err(SchemeError::Disconnected);
    }
    Ok(best.unwrap().0)
}

/// For each ordered pair (i, j), the index of the heaviest edge on the
/// τ-path from i to j. 12×12 covers the n ≤ 9 caps.
fn path_max_table(tree: &Tree, table: &WeightTable) -> [[usize; 12]; 12] {
    let n = tree.n();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for e in tree.edge_set().indices() {
        let (i, j) = graphs::edge_endpoints(n, e);
        adj[i].push((j, e));
        adj[j].push((i, e));
    }
    let mut pm = [[usize::MAX; 12]; 12];
    for root in 0..n {
        // DFS; max edge accumulates along the walk down
        let mut stack = vec![root];
        let mut seen = [false; 12];
        seen[root] = true;
        while let Some(u) = stack.pop() {
            for &(v, e) in &adj[u] {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                pm[root][v] = if u == root {
                    e
                } else {
                    let up = pm[root][u];
                    if table.cmp_edges(e, up) == Ordering::Greater {
                        e
                    } else {
                        up
                    }
                };
                stack.push(v);
            }
        }
    }
    pm
}

/// The interval top M(τ): all edges whose weight is ≥ every edge on their
/// τ-path. Contains τ itself by construction.
pub fn build_m(tree: &Tree, table: &WeightTable) -> LabeledGraph {
    assert_eq!(tree.n(), table.n());
    let n = tree.n();
    let pm = path_max_table(tree, table);
    let mut edges = tree.edge_set();
    for e in 0..edge_count(n) {
        if edges.contains_index(e) {
            continue;
        }
        let (i, j) = graphs::edge_endpoints(n, e);
        if table.cmp_edges(e, pm[i][j]) == Ordering::Greater {
            edges.insert_index(e);
        }
    }
    LabeledGraph::new(edges)
}

/// E_τ⁺: tree edges with non-negative energy (+∞ included).
pub fn positive_edges(tree: &Tree, table: &WeightTable) -> EdgeSet {
    let mut out = EdgeSet::empty(tree.n());
    for e in tree.edge_set().indices() {
        if table.value(e).is_nonnegative() {
            out.insert_index(e);
        }
    }
    out
}

/// Σ V over E_{M(τ)} \ E_τ⁺ — the non-tree edges of M(τ) plus the
/// negative-energy tree edges — and whether the stability floor −B·n holds.
/// The sum may be +∞ (hard-core edge inside M), which satisfies any floor.
pub fn stability_gap(tree: &Tree, table: &WeightTable, b: f64) -> (f64, bool) {
    let m = build_m(tree, table);
    let plus = positive_edges(tree, table);
    let mut sum = Energy::Finite(0.0);
    for e in m.edges.difference(&plus).indices() {
        sum = sum + table.value(e);
    }
    let s = sum.as_f64();
    (s, s >= -b * tree.n() as f64)
}

/// First failing graph of the exhaustive partition check, if any.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Counterexample {
    pub graph: Vec<[usize; 2]>,
    pub tree: Vec<[usize; 2]>,
    pub m_graph: Vec<[usize; 2]>,
    pub reason: String,
}

/// Outcome of [`verify_partition`].
#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub n: usize,
    /// |G_n|, counted during the graph sweep.
    pub graph_count: u64,
    /// Σ over trees of the interval size 2^{|E_{M(τ)}| − (n−1)}.
    pub interval_total: u64,
    /// interval size → number of trees with that size.
    pub histogram: BTreeMap<u64, u64>,
    pub counterexample: Option<Counterexample>,
    pub passed: bool,
}

/// Exhaustively verify the partition property for the given weights:
/// every connected graph g contains its MST τ and is contained in M(τ),
/// and Σ_τ |[τ, M(τ)]| = |G_n| — together: each g lies in exactly one
/// interval.
pub fn verify_partition(n: usize, table: &WeightTable) -> Result<PartitionReport, SchemeError> {
    if !(2..=7).contains(&n) {
        return Err(SchemeError::NOutOfRange { n, max: 7 });
    }
    if n != table.n() {
        return Err(SchemeError::SizeMismatch(table.n(), n));
    }
    let endpoints = endpoint_table(n);
    let top = EdgeSet::complete(n).bits();

    struct Sweep {
        connected: u64,
        failure: Option<Counterexample>,
    }
    let sweeps = exec::chunked(top, |range| {
        let mut out = Sweep {
            connected: 0,
            failure: None,
        };
        let mut m_cache: HashMap<u64, u64> = HashMap::new();
        for idx in range {
            let bits = idx + 1;
            if !subset_connected(n, bits, &endpoints) {
                continue;
            }
            out.connected += 1;
            if out.failure.is_some() {
                continue; // keep counting; first counterexample already held
            }
            let g = LabeledGraph::new(EdgeSet::from_bits(n, bits));
            let tau = mst(&g, table).expect("connected graph has an MST");
            let m_bits = *m_cache
                .entry(tau.edge_set().bits())
                .or_insert_with(|| build_m(&tau, table).edges.bits());
            let tree_ok = tau.edge_set().is_subset_of(&g.edges);
            let top_ok = g.edges.bits() & !m_bits == 0;
            if !tree_ok || !top_ok {
                out.failure = Some(Counterexample {
                    graph: g.edges.edge_pairs(),
                    tree: tau.edge_set().edge_pairs(),
                    m_graph: EdgeSet::from_bits(n, m_bits).edge_pairs(),
                    reason: if !tree_ok {
                        "MST is not a subgraph".into()
                    } else {
                        "graph exceeds the interval top M(tree)".into()
                    },
                });
            }
        }
        out
    });
    let graph_count: u64 = sweeps.iter().map(|s| s.connected).sum();
    let counterexample = sweeps.into_iter().find_map(|s| s.failure);

    let tree_sweeps = exec::chunked(graphs::tree_count(n), |range| {
        let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
        let mut total = 0u64;
        for idx in range {
            let tau = graphs::tree_from_index(n, idx);
            let m = build_m(&tau, table);
            let size = graphs::interval_size(&tau, &m).expect("τ ⊆ M(τ)");
            *hist.entry(size).or_insert(0) += 1;
            total += size;
        }
        (hist, total)
    });
    let mut histogram = BTreeMap::new();
    let mut interval_total = 0u64;
    for (hist, total) in tree_sweeps {
        for (k, v) in hist {
            *histogram.entry(k).or_insert(0) += v;
        }
        interval_total += total;
    }

    let passed = counterexample.is_none() && interval_total == graph_count;
    Ok(PartitionReport {
        n,
        graph_count,
        interval_total,
        histogram,
        counterexample,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::edge_index;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fin(v: f64) -> Energy {
        Energy::Finite(v)
    }

    fn triangle_weights(v01: Energy, v02: Energy, v12: Energy) -> WeightTable {
        WeightTable::from_values(3, vec![v01, v02, v12])
    }

    #[test]
    fn tiebreak_earlier_edge_is_heavier() {
        let t = triangle_weights(fin(1.0), fin(1.0), fin(0.0));
        assert_eq!(t.cmp_edges(0, 1), Ordering::Greater);
        assert_eq!(t.cmp_edges(1, 0), Ordering::Less);
        assert!(t.weight(0) > t.weight(1));
        // value dominates the position
        assert!(t.weight(2) < t.weight(1));
        assert_eq!(t.cmp_edges(2, 2), Ordering::Equal);
    }

    #[test]
    fn hard_core_weight_tops_everything_finite() {
        let t = triangle_weights(Energy::Infinite, fin(1e12), Energy::Infinite);
        assert!(t.weight(0) > t.weight(1));
        // two hard-core edges: the earlier one is heavier
        assert!(t.weight(0) > t.weight(2));
    }

    #[test]
    fn mst_triangle_distinct_values() {
        let t = triangle_weights(fin(-1.0), fin(0.0), fin(1.0));
        let g = LabeledGraph::complete(3);
        let tree = mst(&g, &t).unwrap();
        assert_eq!(
            tree.edge_set(),
            EdgeSet::from_edges(3, &[(0, 1), (0, 2)]).unwrap()
        );
        assert_eq!(mst_oracle(&g, &t).unwrap().edge_set(), tree.edge_set());
    }

    #[test]
    fn mst_triangle_all_ties_avoids_earliest_edge() {
        let t = triangle_weights(fin(0.5), fin(0.5), fin(0.5));
        let tree = mst(&LabeledGraph::complete(3), &t).unwrap();
        // edge (0,1) is the heaviest, so the MST keeps the other two
        assert_eq!(
            tree.edge_set(),
            EdgeSet::from_edges(3, &[(0, 2), (1, 2)]).unwrap()
        );
        assert_eq!(
            mst_oracle(&LabeledGraph::complete(3), &t).unwrap().edge_set(),
            tree.edge_set()
        );
    }

    #[test]
    fn mst_of_a_tree_is_itself() {
        for n in 2..=6 {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let values = (0..edge_count(n))
                .map(|_| fin(rng.random_range(-1.0..1.0)))
                .collect();
            let table = WeightTable::from_values(n, values);
            for tree in graphs::trees(n).unwrap() {
                let back = mst(&tree.graph(), &table).unwrap();
                assert_eq!(back.edge_set(), tree.edge_set());
            }
        }
    }

    #[test]
    fn mst_matches_oracle_on_all_connected_graphs() {
        for n in 2..=4 {
            for seed in 0..3u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let values: Vec<Energy> = (0..edge_count(n))
                    .map(|_| fin(rng.random_range(-1.0..1.0)))
                    .collect();
                let table = WeightTable::from_values(n, values);
                for g in graphs::connected_graphs(n).unwrap() {
                    assert_eq!(
                        mst(&g, &table).unwrap().edge_set(),
                        mst_oracle(&g, &table).unwrap().edge_set()
                    );
                }
            }
            // pure tie-break regime
            let table = WeightTable::from_values(n, vec![fin(0.0); edge_count(n)]);
            for g in graphs::connected_graphs(n).unwrap() {
                assert_eq!(
                    mst(&g, &table).unwrap().edge_set(),
                    mst_oracle(&g, &table).unwrap().edge_set()
                );
            }
        }
    }

    #[test]
    fn mst_rejects_disconnected() {
        let g = LabeledGraph::new(EdgeSet::from_edges(4, &[(0, 1), (2, 3)]).unwrap());
        let table = WeightTable::from_values(4, vec![fin(0.0); 6]);
        assert_eq!(mst(&g, &table), Err(SchemeError::Disconnected));
        assert_eq!(mst_oracle(&g, &table), Err(SchemeError::Disconnected));
    }

    #[test]
    fn build_m_tie_example() {
        // all-equal values on K₃
        let t = triangle_weights(fin(0.5), fin(0.5), fin(0.5));
        let tau = Tree::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(
            build_m(&tau, &t).edges,
            EdgeSet::complete(3),
            "edge (0,1) is heaviest, so it joins M"
        );
        let tau2 = Tree::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(
            build_m(&tau2, &t).edges,
            tau2.edge_set(),
            "edge (1,2) is lighter than the path edge (0,1)"
        );
    }

    #[test]
    fn build_m_all_non_tree_heavier_gives_complete_graph() {
        let n = 5;
        let star = Tree::from_edges(n, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let mut values = vec![fin(1.0); edge_count(n)];
        for e in star.edge_set().indices() {
            values[e] = fin(-1.0);
        }
        let table = WeightTable::from_values(n, values);
        assert_eq!(build_m(&star, &table).edges, EdgeSet::complete(n));
    }

    #[test]
    fn tau_subset_of_m_always() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 2..=6 {
            for _ in 0..5 {
                let values: Vec<Energy> = (0..edge_count(n))
                    .map(|_| fin(rng.random_range(-2.0..2.0)))
                    .collect();
                let table = WeightTable::from_values(n, values);
                for tau in graphs::trees(n).unwrap() {
                    assert!(tau.edge_set().is_subset_of(&build_m(&tau, &table).edges));
                }
            }
        }
    }

    #[test]
    fn admissibility_all_tree_sums_distinct() {
        for n in 2..=5 {
            // the all-tie configuration is the hardest case: every real sum
            // is equal and only the indicators separate the trees
            let table = WeightTable::from_values(n, vec![fin(0.25); edge_count(n)]);
            let sums: Vec<TomonoidSum> = graphs::trees(n)
                .unwrap()
                .map(|t| table.tree_sum(&t.edge_set()))
                .collect();
            for a in 0..sums.len() {
                for b in (a + 1)..sums.len() {
                    assert_ne!(
                        table.cmp_sums(&sums[a], &sums[b]),
                        Ordering::Equal,
                        "n={n}: trees {a} and {b} tie"
                    );
                }
            }
        }
    }

    #[test]
    fn infinite_tie_falls_through_to_indicator() {
        // two trees of all-infinite weight: the real parts tie at +∞ and the
        // indicator order must decide
        let table = triangle_weights(Energy::Infinite, Energy::Infinite, Energy::Infinite);
        let a = table.tree_sum(&EdgeSet::from_edges(3, &[(0, 1), (0, 2)]).unwrap());
        let b = table.tree_sum(&EdgeSet::from_edges(3, &[(0, 2), (1, 2)]).unwrap());
        assert_eq!(a.real_sum, Energy::Infinite);
        assert_eq!(b.real_sum, Energy::Infinite);
        // a holds edge 0 (position 1) which b lacks → a is greater
        assert_eq!(table.cmp_sums(&a, &b), Ordering::Greater);
    }

    #[test]
    fn positive_edges_boundaries() {
        let tau = Tree::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let all_neg = triangle_weights(fin(-1.0), fin(0.0), fin(-0.5));
        assert_eq!(positive_edges(&tau, &all_neg).len(), 0);
        let zeros = triangle_weights(fin(0.0), fin(0.0), fin(0.0));
        assert_eq!(positive_edges(&tau, &zeros), tau.edge_set());
        let with_core = triangle_weights(Energy::Infinite, fin(1.0), fin(-1.0));
        let pos = positive_edges(&tau, &with_core);
        assert!(pos.contains(0, 1) && !pos.contains(1, 2));
    }

    #[test]
    fn stability_gap_nonnegative_potential_is_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let values: Vec<Energy> = (0..edge_count(5))
                .map(|_| fin(rng.random_range(0.0..3.0)))
                .collect();
            let table = WeightTable::from_values(5, values);
            for tau in graphs::trees(5).unwrap() {
                let (s, ok) = stability_gap(&tau, &table, 0.0);
                assert!(s >= 0.0 && ok, "gap {s}");
            }
        }
    }

    #[test]
    fn stability_gap_n2_single_edge() {
        let table = WeightTable::from_values(2, vec![fin(-1.7)]);
        let tau = Tree::from_edges(2, &[(0, 1)]).unwrap();
        let (s, ok) = stability_gap(&tau, &table, 1.0);
        assert_eq!(s, -1.7);
        assert!(ok, "V ≥ −2B holds at B = 1");
        let (_, bad) = stability_gap(&tau, &table, 0.5);
        assert!(!bad, "V = −1.7 < −1.0 violates B = 0.5");
    }

    #[test]
    fn verify_partition_n3_tie_histogram() {
        let table = triangle_weights(fin(0.5), fin(0.5), fin(0.5));
        let report = verify_partition(3, &table).unwrap();
        assert!(report.passed);
        assert_eq!(report.graph_count, 4);
        assert_eq!(report.interval_total, 4);
        assert_eq!(report.histogram, BTreeMap::from([(1, 2), (2, 1)]));
        assert!(report.counterexample.is_none());
    }

    #[test]
    fn verify_partition_n2_single_interval() {
        let table = WeightTable::from_values(2, vec![fin(-1.0)]);
        let report = verify_partition(2, &table).unwrap();
        assert!(report.passed);
        assert_eq!(report.graph_count, 1);
        assert_eq!(report.histogram, BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn verify_partition_lj_and_degenerate_configs() {
        let lj = PairPotential::lennard_jones();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 2..=5 {
            for _ in 0..4 {
                let c = Configuration::random_in_box(n, 3, 2.0, &mut rng);
                let table = WeightTable::from_configuration(&lj, &c).unwrap();
                let report = verify_partition(n, &table).unwrap();
                assert!(report.passed, "n={n}: {:?}", report.counterexample);
            }
            let co = Configuration::coincident(n, 3);
            let table = WeightTable::from_configuration(&lj, &co).unwrap();
            assert!(verify_partition(n, &table).unwrap().passed);
            let lat = Configuration::square_lattice(n, 1.0);
            let table = WeightTable::from_configuration(&lj, &lat).unwrap();
            assert!(verify_partition(n, &table).unwrap().passed);
        }
    }

    #[test]
    fn verify_partition_range_check() {
        let table = WeightTable::from_values(2, vec![fin(0.0)]);
        assert!(matches!(
            verify_partition(8, &table),
            Err(SchemeError::NOutOfRange { .. })
        ));
        assert!(matches!(
            verify_partition(3, &table),
            Err(SchemeError::SizeMismatch(..))
        ));
    }

    #[test]
    fn reverse_order_flips_tiebreak() {
        let lex = triangle_weights(fin(0.5), fin(0.5), fin(0.5));
        let rev = lex.clone().with_order(EdgeOrder::ReverseLexicographic);
        // under the reverse order the LAST edge has position 1 and is heaviest
        assert_eq!(rev.cmp_edges(2, 0), Ordering::Greater);
        let tree = mst(&LabeledGraph::complete(3), &rev).unwrap();
        assert_eq!(
            tree.edge_set(),
            EdgeSet::from_edges(3, &[(0, 1), (0, 2)]).unwrap()
        );
        // both orders still produce a valid partition
        assert!(verify_partition(3, &rev).unwrap().passed);
    }

    #[test]
    fn weight_table_from_configuration_reads_pair_energies() {
        let lj = PairPotential::lennard_jones();
        let c = Configuration::new(vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let table = WeightTable::from_configuration(&lj, &c).unwrap();
        assert_eq!(table.value(edge_index(3, 0, 1)), fin(-1.0));
        assert_eq!(table.value(edge_index(3, 0, 2)), Energy::Infinite);
    }
}
