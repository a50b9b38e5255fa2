//! Immutable weighted digraph, live-edge graphs and reachability.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::rng::bernoulli;

/// Dense node index in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    #[inline]
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Directed graph with one propagation probability per edge.
///
/// Edges keep their insertion order; `out_edges` and `in_edges` return
/// edge indices into that order.
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    n: usize,
    src: Vec<NodeId>,
    dst: Vec<NodeId>,
    prob: Vec<f64>,
    out_off: Vec<usize>,
    out_idx: Vec<u32>,
    in_off: Vec<usize>,
    in_idx: Vec<u32>,
}

impl DirectedGraph {
    /// Builds from `(src, dst, p)` triples that are already validated.
    /// Use [`GraphBuilder`] for untrusted input.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Self> {
        let mut b = GraphBuilder::with_nodes(n);
        for &(u, v, p) in edges {
            b.add_edge(u, v, Some(p));
        }
        b.build(false).map(|built| built.graph)
    }

    fn assemble(n: usize, src: Vec<NodeId>, dst: Vec<NodeId>, prob: Vec<f64>) -> Self {
        let (out_off, out_idx) = csr(n, &src);
        let (in_off, in_idx) = csr(n, &dst);
        DirectedGraph {
            n,
            src,
            dst,
            prob,
            out_off,
            out_idx,
            in_off,
            in_idx,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.src.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n).map(NodeId::from)
    }

    #[inline]
    pub fn source(&self, e: usize) -> NodeId {
        self.src[e]
    }

    #[inline]
    pub fn target(&self, e: usize) -> NodeId {
        self.dst[e]
    }

    #[inline]
    pub fn prob(&self, e: usize) -> f64 {
        self.prob[e]
    }

    pub fn edge(&self, e: usize) -> (NodeId, NodeId, f64) {
        (self.src[e], self.dst[e], self.prob[e])
    }

    #[inline]
    pub fn out_edges(&self, v: NodeId) -> &[u32] {
        &self.out_idx[self.out_off[v.index()]..self.out_off[v.index() + 1]]
    }

    #[inline]
    pub fn in_edges(&self, v: NodeId) -> &[u32] {
        &self.in_idx[self.in_off[v.index()]..self.in_off[v.index() + 1]]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_edges(v).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_edges(v).len()
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v.index() < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v.0, n: self.n })
        }
    }
}

fn csr(n: usize, endpoint: &[NodeId]) -> (Vec<usize>, Vec<u32>) {
    let mut off = vec![0usize; n + 1];
    for v in endpoint {
        off[v.index() + 1] += 1;
    }
    for i in 0..n {
        off[i + 1] += off[i];
    }
    let mut fill = off.clone();
    let mut idx = vec![0u32; endpoint.len()];
    for (e, v) in endpoint.iter().enumerate() {
        idx[fill[v.index()]] = e as u32;
        fill[v.index()] += 1;
    }
    (off, idx)
}

/// Accumulates edge records, drops duplicates (first record wins) and
/// assigns probabilities.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    n: usize,
    edges: Vec<(NodeId, NodeId, Option<f64>)>,
}

#[derive(Debug, Clone)]
pub struct BuiltGraph {
    pub graph: DirectedGraph,
    /// Records dropped because an earlier record had the same `(u, v)`.
    pub duplicates: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reserves nodes `0..n` even if they never appear on an edge.
    pub fn with_nodes(n: usize) -> Self {
        GraphBuilder {
            n,
            edges: Vec::new(),
        }
    }

    pub fn ensure_node(&mut self, v: NodeId) {
        self.n = self.n.max(v.index() + 1);
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, p: Option<f64>) {
        self.ensure_node(u);
        self.ensure_node(v);
        self.edges.push((u, v, p));
    }

    /// Under weighted cascade every edge into `v` gets `1 / indeg(v)`
    /// (in-degree counted after de-duplication) and given probabilities are
    /// ignored.
    pub fn build(self, weighted_cascade: bool) -> Result<BuiltGraph> {
        let n = self.n;
        let mut first: BTreeMap<(NodeId, NodeId), ()> = BTreeMap::new();
        let mut duplicates = 0;
        let mut kept = Vec::with_capacity(self.edges.len());
        for (u, v, p) in self.edges {
            if first.insert((u, v), ()).is_some() {
                duplicates += 1;
                continue;
            }
            kept.push((u, v, p));
        }

        let mut indeg = vec![0usize; n];
        for &(_, v, _) in &kept {
            indeg[v.index()] += 1;
        }

        let mut src = Vec::with_capacity(kept.len());
        let mut dst = Vec::with_capacity(kept.len());
        let mut prob = Vec::with_capacity(kept.len());
        for (u, v, p) in kept {
            let p = if weighted_cascade {
                1.0 / indeg[v.index()] as f64
            } else {
                match p {
                    Some(p) if p > 0.0 && p <= 1.0 => p,
                    Some(p) => return Err(Error::InvalidProbability { src: u.0, dst: v.0, p }),
                    None => return Err(Error::MissingProbability { src: u.0, dst: v.0 }),
                }
            };
            src.push(u);
            dst.push(v);
            prob.push(p);
        }
        Ok(BuiltGraph {
            graph: DirectedGraph::assemble(n, src, dst, prob),
            duplicates,
        })
    }
}

/// Source of live/blocked statuses for edges.
///
/// This is where a general triggering model would plug in; the shipped
/// implementations are independent per-edge coins (IC), either pinned in a
/// [`LiveEdgeGraph`] or drawn on first touch by [`LazyLiveEdges`].
pub trait EdgeStatus {
    fn is_live(&mut self, g: &DirectedGraph, e: usize) -> bool;
}

/// One realization of every edge coin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveEdgeGraph {
    pub mask: Vec<bool>,
}

impl LiveEdgeGraph {
    pub fn all_live(g: &DirectedGraph) -> Self {
        LiveEdgeGraph {
            mask: vec![true; g.edge_count()],
        }
    }

    pub fn live_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

impl EdgeStatus for LiveEdgeGraph {
    #[inline]
    fn is_live(&mut self, _g: &DirectedGraph, e: usize) -> bool {
        self.mask[e]
    }
}

impl EdgeStatus for &LiveEdgeGraph {
    #[inline]
    fn is_live(&mut self, _g: &DirectedGraph, e: usize) -> bool {
        self.mask[e]
    }
}

/// Edge coins flipped on first query and remembered afterwards.
#[derive(Debug)]
pub struct LazyLiveEdges<'r, R: ?Sized> {
    // 0 = unknown, 1 = live, 2 = blocked
    memo: Vec<u8>,
    rng: &'r mut R,
}

impl<'r, R: Rng + ?Sized> LazyLiveEdges<'r, R> {
    pub fn new(g: &DirectedGraph, rng: &'r mut R) -> Self {
        LazyLiveEdges {
            memo: vec![0; g.edge_count()],
            rng,
        }
    }

    /// `Some(live)` if the edge has been revealed.
    pub fn revealed(&self, e: usize) -> Option<bool> {
        match self.memo[e] {
            1 => Some(true),
            2 => Some(false),
            _ => None,
        }
    }

    pub fn revealed_count(&self) -> usize {
        self.memo.iter().filter(|&&m| m != 0).count()
    }
}

impl<R: Rng + ?Sized> EdgeStatus for LazyLiveEdges<'_, R> {
    fn is_live(&mut self, g: &DirectedGraph, e: usize) -> bool {
        match self.memo[e] {
            1 => true,
            2 => false,
            _ => {
                let live = bernoulli(self.rng, g.prob(e));
                self.memo[e] = if live { 1 } else { 2 };
                live
            }
        }
    }
}

pub fn sample_live_edges<R: Rng + ?Sized>(g: &DirectedGraph, rng: &mut R) -> LiveEdgeGraph {
    LiveEdgeGraph {
        mask: (0..g.edge_count()).map(|e| bernoulli(rng, g.prob(e))).collect(),
    }
}

/// Nodes reachable from `seeds` along live edges (seeds included).
pub fn reach<L: EdgeStatus + ?Sized>(g: &DirectedGraph, live: &mut L, seeds: &[NodeId]) -> NodeSet {
    let mut seen = NodeSet::new(g.node_count());
    let mut queue = VecDeque::new();
    for &s in seeds {
        if seen.insert(s) {
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &e in g.out_edges(u) {
            let e = e as usize;
            let v = g.target(e);
            if !seen.contains(v) && live.is_live(g, e) {
                seen.insert(v);
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Nodes with a live path to `root` (root included).
pub fn reverse_reach<L: EdgeStatus + ?Sized>(g: &DirectedGraph, live: &mut L, root: NodeId) -> NodeSet {
    let mut seen = NodeSet::new(g.node_count());
    let mut queue = VecDeque::new();
    seen.insert(root);
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        for &e in g.in_edges(v) {
            let e = e as usize;
            let u = g.source(e);
            if !seen.contains(u) && live.is_live(g, e) {
                seen.insert(u);
                queue.push_back(u);
            }
        }
    }
    seen
}
