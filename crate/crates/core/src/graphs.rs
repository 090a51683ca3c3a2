//! Labeled graphs on [n] with bit-vector edge sets.
//!
//! Edges of the complete graph are numbered by the canonical lexicographic
//! order: {i,j} < {i',j'} iff i < i', or i = i' and j < j' (vertices are
//! 0-based, i < j). That numbering is the single source of truth — the
//! tie-break order of the spanning-tree scheme reuses it.
//!
//! Enumeration caps: connected graphs up to n = 8 (|G₈| ≈ 2.5×10⁸), trees up
//! to n = 9 via the Prüfer bijection.

use std::fmt;

use thiserror::Error;

pub const MAX_CONNECTED_N: usize = 8;
pub const MAX_TREE_N: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("n = {n} out of range [2, {max}]")]
    NOutOfRange { n: usize, max: usize },
    #[error("edge set is not a spanning tree")]
    NotSpanningTree,
    #[error("edge set is not contained in the reference graph")]
    NotSubset,
    #[error("vertex index out of range")]
    VertexOutOfRange,
    #[error("graph sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

/// Number of edges of the complete graph on [n].
pub fn edge_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Canonical index of edge {i,j}, i < j, in lexicographic order.
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Endpoints (i, j) of the edge with canonical index `idx`.
pub fn edge_endpoints(n: usize, idx: usize) -> (usize, usize) {
    debug_assert!(idx < edge_count(n));
    let mut i = 0;
    let mut base = 0;
    while base + (n - 1 - i) <= idx {
        base += n - 1 - i;
        i += 1;
    }
    (i, i + 1 + idx - base)
}

pub(crate) fn endpoint_table(n: usize) -> Vec<(usize, usize)> {
    (0..edge_count(n)).map(|e| edge_endpoints(n, e)).collect()
}

/// Subset of the edges of K_n, stored as one bit per canonical edge index.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    n: usize,
    bits: u64,
}

impl EdgeSet {
    pub fn empty(n: usize) -> Self {
        debug_assert!((2..=11).contains(&n), "bit width: n(n-1)/2 <= 64");
        EdgeSet { n, bits: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let m = edge_count(n);
        EdgeSet {
            n,
            bits: if m == 64 { u64::MAX } else { (1u64 << m) - 1 },
        }
    }

    pub fn from_bits(n: usize, bits: u64) -> Self {
        debug_assert_eq!(bits & !EdgeSet::complete(n).bits, 0);
        EdgeSet { n, bits }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut s = EdgeSet::empty(n);
        for &(i, j) in edges {
            if i == j || i >= n || j >= n {
                return Err(GraphError::VertexOutOfRange);
            }
            s.insert(i.min(j), i.max(j));
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.bits >> edge_index(self.n, i.min(j), i.max(j)) & 1 == 1
    }

    pub fn contains_index(&self, e: usize) -> bool {
        self.bits >> e & 1 == 1
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.bits |= 1 << edge_index(self.n, i.min(j), i.max(j));
    }

    pub fn insert_index(&mut self, e: usize) {
        self.bits |= 1 << e;
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        self.bits & !other.bits == 0
    }

    /// Edges in `self` but not in `other`.
    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet {
            n: self.n,
            bits: self.bits & !other.bits,
        }
    }

    /// Canonical indices of the member edges, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    /// Member edges as (i, j) pairs with i < j, ascending by index.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.indices().map(move |e| edge_endpoints(n, e))
    }

    pub fn edge_pairs(&self) -> Vec<[usize; 2]> {
        self.edges().map(|(i, j)| [i, j]).collect()
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeSet(n={}, {{", self.n)?;
        for (k, (i, j)) in self.edges().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({i},{j})")?;
        }
        write!(f, "}})")
    }
}

/// A graph on the full vertex set [n]; isolated vertices are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    pub n: usize,
    pub edges: EdgeSet,
}

impl LabeledGraph {
    pub fn new(edges: EdgeSet) -> Self {
        LabeledGraph { n: edges.n(), edges }
    }

    pub fn complete(n: usize) -> Self {
        LabeledGraph {
            n,
            edges: EdgeSet::complete(n),
        }
    }
}

/// True iff all n vertices lie in a single component.
pub fn is_connected(g: &LabeledGraph) -> bool {
    let mut adj = [0u16; 12];
    for (i, j) in g.edges.edges() {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    connected_by_adjacency(g.n, &adj)
}

fn connected_by_adjacency(n: usize, adj: &[u16; 12]) -> bool {
    let all = (1u16 << n) - 1;
    let mut seen = 1u16;
    let mut frontier = 1u16;
    while frontier != 0 {
        let mut next = 0u16;
        let mut v = frontier;
        while v != 0 {
            let k = v.trailing_zeros() as usize;
            v &= v - 1;
            next |= adj[k];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == all
}

/// Connectivity of the subset `bits` of K_n edges, with a caller-provided
/// endpoint table (hot path of the enumeration loops).
pub(crate) fn subset_connected(n: usize, bits: u64, endpoints: &[(usize, usize)]) -> bool {
    if (bits.count_ones() as usize) < n - 1 {
        return false;
    }
    let mut adj = [0u16; 12];
    let mut b = bits;
    while b != 0 {
        let e = b.trailing_zeros() as usize;
        b &= b - 1;
        let (i, j) = endpoints[e];
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    connected_by_adjacency(n, &adj)
}

/// All connected graphs on [n], ordered by the numeric value of the edge bit
/// vector (reproducible stream order).
pub fn connected_graphs(n: usize) -> Result<impl Iterator<Item = LabeledGraph>, GraphError> {
    if !(2..=MAX_CONNECTED_N).contains(&n) {
        return Err(GraphError::NOutOfRange {
            n,
            max: MAX_CONNECTED_N,
        });
    }
    let endpoints = endpoint_table(n);
    let top = EdgeSet::complete(n).bits();
    Ok((1..=top)
        .filter(move |&bits| subset_connected(n, bits, &endpoints))
        .map(move |bits| LabeledGraph::new(EdgeSet::from_bits(n, bits))))
}

/// A spanning tree of K_n: connected, n−1 edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    n: usize,
    edges: EdgeSet,
}

impl Tree {
    pub fn from_edge_set(edges: EdgeSet) -> Result<Self, GraphError> {
        let n = edges.n();
        if edges.len() != n - 1 || !is_connected(&LabeledGraph::new(edges)) {
            return Err(GraphError::NotSpanningTree);
        }
        Ok(Tree { n, edges })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Tree::from_edge_set(EdgeSet::from_edges(n, edges)?)
    }

    /// Decode a Prüfer sequence over [n] of length n−2.
    pub fn from_prufer(n: usize, seq: &[usize]) -> Result<Self, GraphError> {
        if !(2..=MAX_TREE_N).contains(&n) {
            return Err(GraphError::NOutOfRange { n, max: MAX_TREE_N });
        }
        if seq.len() != n - 2 || seq.iter().any(|&v| v >= n) {
            return Err(GraphError::VertexOutOfRange);
        }
        let mut degree = [1usize; 12];
        for &s in seq {
            degree[s] += 1;
        }
        let mut edges = EdgeSet::empty(n);
        for &s in seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf remains");
            edges.insert(leaf, s);
            degree[leaf] = 0;
            degree[s] -= 1;
        }
        let mut last = (0..n).filter(|&v| degree[v] == 1);
        let (u, v) = (last.next().unwrap(), last.next().unwrap());
        edges.insert(u, v);
        Ok(Tree { n, edges })
    }

    /// Inverse of `from_prufer`: repeatedly strip the smallest leaf.
    pub fn prufer(&self) -> Vec<usize> {
        let n = self.n;
        let mut adj = vec![Vec::new(); n];
        for (i, j) in self.edges.edges() {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
        let mut alive = vec![true; n];
        let mut seq = Vec::with_capacity(n.saturating_sub(2));
        for _ in 0..n.saturating_sub(2) {
            let leaf = (0..n)
                .find(|&v| alive[v] && degree[v] == 1)
                .expect("a leaf remains");
            let nb = *adj[leaf]
                .iter()
                .find(|&&u| alive[u])
                .expect("leaf neighbour");
            seq.push(nb);
            alive[leaf] = false;
            degree[nb] -= 1;
        }
        seq
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges
    }

    pub fn graph(&self) -> LabeledGraph {
        LabeledGraph::new(self.edges)
    }

    /// Edges of the unique path from i to j, in path order.
    pub fn path_edges(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        assert!(i != j && i < self.n && j < self.n);
        let mut adj = vec![Vec::new(); self.n];
        for (a, b) in self.edges.edges() {
            adj[a].push(b);
            adj[b].push(a);
        }
        // BFS parents from i, walk back from j
        let mut parent = vec![usize::MAX; self.n];
        parent[i] = i;
        let mut queue = std::collections::VecDeque::from([i]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    queue.push_back(u);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = j;
        while v != i {
            path.push((parent[v].min(v), parent[v].max(v)));
            v = parent[v];
        }
        path.reverse();
        path
    }
}

/// |T_n| = n^{n−2} (Cayley).
pub fn tree_count(n: usize) -> u64 {
    (n as u64).pow(n as u32 - 2)
}

/// Decode tree number `idx` ∈ [0, n^{n−2}): digits of idx base n form the
/// Prüfer sequence. Stream order for `trees` and the chunked tree loops.
pub(crate) fn tree_from_index(n: usize, idx: u64) -> Tree {
    let mut seq = [0usize; 12];
    let mut v = idx;
    for s in seq.iter_mut().take(n - 2) {
        *s = (v % n as u64) as usize;
        v /= n as u64;
    }
    Tree::from_prufer(n, &seq[..n - 2]).expect("valid Prüfer digits")
}

/// All labeled trees on [n], each exactly once, in Prüfer-index order.
pub fn trees(n: usize) -> Result<impl Iterator<Item = Tree>, GraphError> {
    if !(2..=MAX_TREE_N).contains(&n) {
        return Err(GraphError::NOutOfRange { n, max: MAX_TREE_N });
    }
    Ok((0..tree_count(n)).map(move |idx| tree_from_index(n, idx)))
}

/// Number of graphs g with τ ⊆ g ⊆ g_top: 2^{|E_top| − (n−1)}.
pub fn interval_size(tree: &Tree, g_top: &LabeledGraph) -> Result<u64, GraphError> {
    if tree.n() != g_top.n {
        return Err(GraphError::SizeMismatch(tree.n(), g_top.n));
    }
    if !tree.edge_set().is_subset_of(&g_top.edges) {
        return Err(GraphError::NotSubset);
    }
    Ok(1u64 << (g_top.edges.len() - (tree.n() - 1)))
}
