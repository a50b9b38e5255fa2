//! Self-activation independent cascade (SAIC).
//!
//! Every node `u` may start on its own with probability `q(u)` after a
//! self-delay `δ(u)`; live edges carry propagation delays. Seeds are boosted:
//! their `q` becomes 1 while they keep drawing `δ`. A node is credited to the
//! source whose total delay to it is earliest.
//!
//! Objectives: boosted spread `σ^B(S)` (all activations), preemptive spread
//! `ρ(A)` (nodes reached first from `A ∩ A_W`) and boosted preemptive
//! spread `ρ^B(S)`.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{reach, DirectedGraph, LiveEdgeGraph, NodeId};
use crate::mrt::{CountAccumulator, SpreadEstimate};
use crate::nodeset::NodeSet;
use crate::ris::{
    compute_params, imm_phase1, node_selection, CoverageSampler, ImmParams, ImmVariant, Phase1Outcome, Phase1Rule,
    RRStore, RrSampler,
};
use crate::rng::{bernoulli, exponential, stream, uniform_index};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayDist {
    Exponential { rate: f64 },
    Constant { value: f64 },
}

impl DelayDist {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DelayDist::Exponential { rate } if rate > 0.0 && rate.is_finite() => Ok(()),
            DelayDist::Constant { value } if value >= 0.0 && value.is_finite() => Ok(()),
            _ => Err(Error::InvalidParameter("delay needs rate > 0 or a finite value >= 0")),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DelayDist::Exponential { rate } => exponential(rng, rate),
            DelayDist::Constant { value } => value,
        }
    }
}

/// Per-node self-activation probability and self-delay distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfActivationProfile {
    pub q: Vec<f64>,
    pub delay: Vec<DelayDist>,
}

impl SelfActivationProfile {
    pub fn uniform(n: usize, q: f64, delay: DelayDist) -> Result<Self> {
        SelfActivationProfile::new(vec![q; n], vec![delay; n])
    }

    pub fn new(q: Vec<f64>, delay: Vec<DelayDist>) -> Result<Self> {
        if q.len() != delay.len() {
            return Err(Error::InvalidParameter("q and delay lengths differ"));
        }
        if q.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("self-activation probability outside [0,1]"));
        }
        delay.iter().try_for_each(DelayDist::validate)?;
        Ok(SelfActivationProfile { q, delay })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn check_for(&self, g: &DirectedGraph) -> Result<()> {
        if self.len() != g.node_count() {
            return Err(Error::InvalidParameter("profile length differs from node count"));
        }
        Ok(())
    }

    /// Same profile with `q = 1` on `seeds`.
    pub fn boosted(&self, seeds: &[NodeId]) -> Self {
        let mut p = self.clone();
        for s in seeds {
            p.q[s.index()] = 1.0;
        }
        p
    }
}

/// Generators for the self-activation probabilities used in experiments.
/// `β_u` is drawn from `U[0, c]`; `d⁺` is the out-degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QCase {
    /// `q = min(β_u, 1)`
    Uniform = 0,
    /// `q = min(β_u · d⁺, 1)`
    OutDegree = 1,
    /// `q = β_u / d⁺` (`d⁺ = 0` read as 1), capped at 1
    InverseOutDegree = 2,
    /// each node picks case 0 or case 1 by a fair coin
    MixedOutDegree = 3,
    /// each node picks case 0 or case 2 by a fair coin
    MixedInverse = 4,
}

impl QCase {
    pub fn from_index(i: u8) -> Option<Self> {
        Some(match i {
            0 => QCase::Uniform,
            1 => QCase::OutDegree,
            2 => QCase::InverseOutDegree,
            3 => QCase::MixedOutDegree,
            4 => QCase::MixedInverse,
            _ => return None,
        })
    }
}

/// Draws `q` for every node according to `case`; all nodes share `delay`.
pub fn q_case_profile<R: Rng + ?Sized>(
    g: &DirectedGraph,
    case: QCase,
    c: f64,
    delay: DelayDist,
    rng: &mut R,
) -> Result<SelfActivationProfile> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter("q base must be finite and non-negative"));
    }
    let q = g
        .nodes()
        .map(|v| {
            let beta = c * rng.gen::<f64>();
            let d = g.out_degree(v) as f64;
            let degree_case = match case {
                QCase::Uniform => 0,
                QCase::OutDegree => 1,
                QCase::InverseOutDegree => 2,
                QCase::MixedOutDegree => {
                    if rng.gen::<bool>() {
                        1
                    } else {
                        0
                    }
                }
                QCase::MixedInverse => {
                    if rng.gen::<bool>() {
                        2
                    } else {
                        0
                    }
                }
            };
            let q = match degree_case {
                0 => beta,
                1 => beta * d,
                _ => beta / d.max(1.0),
            };
            q.min(1.0)
        })
        .collect();
    SelfActivationProfile::new(q, vec![delay; g.node_count()])
}

/// One full SAIC realization `(A_W, δ_W, L_W, d_W)`. Self-delays are kept
/// for every node since boosted seeds use them; edge delays for every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct PossibleWorld {
    pub self_active: Vec<bool>,
    pub self_delay: Vec<f64>,
    pub live: Vec<bool>,
    pub edge_delay: Vec<f64>,
}

impl PossibleWorld {
    pub fn self_activated_set(&self) -> NodeSet {
        NodeSet::from_nodes(
            self.self_active.len(),
            (0..self.self_active.len()).filter(|&v| self.self_active[v]).map(NodeId::from),
        )
    }

    pub fn live_edges(&self) -> LiveEdgeGraph {
        LiveEdgeGraph { mask: self.live.clone() }
    }
}

pub fn sample_world<R: Rng + ?Sized>(
    g: &DirectedGraph,
    profile: &SelfActivationProfile,
    edge_delay: DelayDist,
    rng: &mut R,
) -> PossibleWorld {
    let n = g.node_count();
    let mut self_active = Vec::with_capacity(n);
    let mut self_delay = Vec::with_capacity(n);
    for v in 0..n {
        self_active.push(bernoulli(rng, profile.q[v]));
        self_delay.push(profile.delay[v].sample(rng));
    }
    let mut live = Vec::with_capacity(g.edge_count());
    let mut delays = Vec::with_capacity(g.edge_count());
    for e in 0..g.edge_count() {
        live.push(bernoulli(rng, g.prob(e)));
        delays.push(edge_delay.sample(rng));
    }
    PossibleWorld {
        self_active,
        self_delay,
        live,
        edge_delay: delays,
    }
}

/// `Φ^B_W(S) = reach(L_W, S ∪ A_W)`.
pub fn boosted_active_set(g: &DirectedGraph, world: &PossibleWorld, seeds: &[NodeId]) -> NodeSet {
    let mut sources: Vec<NodeId> = seeds.to_vec();
    sources.extend((0..g.node_count()).filter(|&v| world.self_active[v]).map(NodeId::from));
    reach(g, &mut world.live_edges(), &sources)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    delay: f64,
    shadow: bool,
    node: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.delay
            .total_cmp(&other.delay)
            .then(self.shadow.cmp(&other.shadow))
            .then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Earliest arrival over live edges from the given `(node, start)` pairs.
pub fn earliest_arrival(g: &DirectedGraph, world: &PossibleWorld, sources: &[(NodeId, f64)]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    for &(v, t) in sources {
        if t < dist[v.index()] {
            dist[v.index()] = t;
            heap.push(Reverse(Entry { delay: t, shadow: false, node: v.0 }));
        }
    }
    while let Some(Reverse(Entry { delay, node, .. })) = heap.pop() {
        let v = NodeId(node);
        if delay > dist[v.index()] {
            continue;
        }
        for &e in g.out_edges(v) {
            let e = e as usize;
            if !world.live[e] {
                continue;
            }
            let w = g.target(e);
            let t = delay + world.edge_delay[e];
            if t < dist[w.index()] {
                dist[w.index()] = t;
                heap.push(Reverse(Entry { delay: t, shadow: false, node: w.0 }));
            }
        }
    }
    dist
}

/// Nodes whose earliest activation comes strictly first from the own side.
///
/// Without boosting the own sources are `A ∩ A_W`; with boosting they are
/// all of `set` (each starting at its own `δ`). Competitors are the
/// self-activated nodes outside `set`.
pub fn preemptive_credit(g: &DirectedGraph, world: &PossibleWorld, set: &[NodeId], boosted: bool) -> NodeSet {
    let n = g.node_count();
    let inside = NodeSet::from_nodes(n, set.iter().copied());
    let own: Vec<(NodeId, f64)> = inside
        .iter()
        .filter(|&v| boosted || world.self_active[v.index()])
        .map(|v| (v, world.self_delay[v.index()]))
        .collect();
    let rival: Vec<(NodeId, f64)> = (0..n)
        .map(NodeId::from)
        .filter(|&v| world.self_active[v.index()] && !inside.contains(v))
        .map(|v| (v, world.self_delay[v.index()]))
        .collect();
    let mine = earliest_arrival(g, world, &own);
    let theirs = earliest_arrival(g, world, &rival);
    NodeSet::from_nodes(n, (0..n).filter(|&v| mine[v] < theirs[v]).map(NodeId::from))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    /// `σ^B(S)`
    SigmaB(Vec<NodeId>),
    /// `ρ(A)`
    Rho(Vec<NodeId>),
    /// `ρ^B(S)`
    RhoB(Vec<NodeId>),
}

impl Objective {
    pub fn nodes(&self) -> &[NodeId] {
        match self {
            Objective::SigmaB(s) | Objective::Rho(s) | Objective::RhoB(s) => s,
        }
    }

    pub fn value_in(&self, g: &DirectedGraph, world: &PossibleWorld) -> usize {
        match self {
            Objective::SigmaB(s) => boosted_active_set(g, world, s).len(),
            Objective::Rho(a) => preemptive_credit(g, world, a, false).len(),
            Objective::RhoB(s) => preemptive_credit(g, world, s, true).len(),
        }
    }
}

/// Forward Monte Carlo over sampled worlds; world `i` uses substream `i`.
pub fn estimate_objective(
    g: &DirectedGraph,
    profile: &SelfActivationProfile,
    edge_delay: DelayDist,
    target: &Objective,
    samples: usize,
    seed: u64,
) -> Result<SpreadEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive"));
    }
    Ok(objective_accumulate(g, profile, edge_delay, target, 0..samples as u64, seed)?.estimate())
}

pub fn objective_accumulate<I: IntoIterator<Item = u64>>(
    g: &DirectedGraph,
    profile: &SelfActivationProfile,
    edge_delay: DelayDist,
    target: &Objective,
    indices: I,
    seed: u64,
) -> Result<CountAccumulator> {
    profile.check_for(g)?;
    edge_delay.validate()?;
    for &v in target.nodes() {
        g.check_node(v)?;
    }
    let mut acc = CountAccumulator::default();
    for i in indices {
        let world = sample_world(g, profile, edge_delay, &mut stream(seed, i));
        acc.push(target.value_in(g, &world) as u64);
    }
    Ok(acc)
}

/// Access to the randomness of one world, pinned or drawn on demand.
pub trait WorldSource {
    fn self_activated(&mut self, v: NodeId) -> bool;
    fn self_delay(&mut self, v: NodeId) -> f64;
    fn edge_live(&mut self, e: usize) -> bool;
    fn edge_delay(&mut self, e: usize) -> f64;
}

impl WorldSource for &PossibleWorld {
    fn self_activated(&mut self, v: NodeId) -> bool {
        self.self_active[v.index()]
    }
    fn self_delay(&mut self, v: NodeId) -> f64 {
        self.self_delay[v.index()]
    }
    fn edge_live(&mut self, e: usize) -> bool {
        self.live[e]
    }
    fn edge_delay(&mut self, e: usize) -> f64 {
        self.edge_delay[e]
    }
}

/// Memo for lazily drawn worlds; one epoch per sample.
#[derive(Debug, Clone)]
pub struct WorldMemo {
    epoch: u32,
    sa_stamp: Vec<u32>,
    sa: Vec<bool>,
    sd_stamp: Vec<u32>,
    sd: Vec<f64>,
    live_stamp: Vec<u32>,
    live: Vec<bool>,
    ed_stamp: Vec<u32>,
    ed: Vec<f64>,
}

impl WorldMemo {
    pub fn new(n: usize, m: usize) -> Self {
        WorldMemo {
            epoch: 0,
            sa_stamp: vec![0; n],
            sa: vec![false; n],
            sd_stamp: vec![0; n],
            sd: vec![0.0; n],
            live_stamp: vec![0; m],
            live: vec![false; m],
            ed_stamp: vec![0; m],
            ed: vec![0.0; m],
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            for s in [&mut self.sa_stamp, &mut self.sd_stamp, &mut self.live_stamp, &mut self.ed_stamp] {
                s.iter_mut().for_each(|x| *x = 0);
            }
            self.epoch = 1;
        }
    }
}

/// A world whose coins and delays are drawn on first query.
pub struct LazyWorld<'a, R: ?Sized> {
    g: &'a DirectedGraph,
    profile: &'a SelfActivationProfile,
    edge_dist: DelayDist,
    memo: &'a mut WorldMemo,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> LazyWorld<'a, R> {
    /// Starts a fresh world over `memo`.
    pub fn new(
        g: &'a DirectedGraph,
        profile: &'a SelfActivationProfile,
        edge_dist: DelayDist,
        memo: &'a mut WorldMemo,
        rng: &'a mut R,
    ) -> Self {
        memo.next_epoch();
        LazyWorld {
            g,
            profile,
            edge_dist,
            memo,
            rng,
        }
    }
}

impl<R: Rng + ?Sized> WorldSource for LazyWorld<'_, R> {
    fn self_activated(&mut self, v: NodeId) -> bool {
        let i = v.index();
        if self.memo.sa_stamp[i] != self.memo.epoch {
            self.memo.sa_stamp[i] = self.memo.epoch;
            self.memo.sa[i] = bernoulli(self.rng, self.profile.q[i]);
        }
        self.memo.sa[i]
    }

    fn self_delay(&mut self, v: NodeId) -> f64 {
        let i = v.index();
        if self.memo.sd_stamp[i] != self.memo.epoch {
            self.memo.sd_stamp[i] = self.memo.epoch;
            self.memo.sd[i] = self.profile.delay[i].sample(self.rng);
        }
        self.memo.sd[i]
    }

    fn edge_live(&mut self, e: usize) -> bool {
        if self.memo.live_stamp[e] != self.memo.epoch {
            self.memo.live_stamp[e] = self.memo.epoch;
            self.memo.live[e] = bernoulli(self.rng, self.g.prob(e));
        }
        self.memo.live[e]
    }

    fn edge_delay(&mut self, e: usize) -> f64 {
        if self.memo.ed_stamp[e] != self.memo.epoch {
            self.memo.ed_stamp[e] = self.memo.epoch;
            self.memo.ed[e] = self.edge_dist.sample(self.rng);
        }
        self.memo.ed[e]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrrResult {
    pub root: NodeId,
    /// `R^P`: nodes whose total delay to the root is at most that of the
    /// earliest self-activated node.
    pub members: Vec<NodeId>,
    /// `u^s`, the earliest self-activated node; `None` if no self-activated
    /// node reaches the root.
    pub source: Option<NodeId>,
}

/// Heap and distance arrays for the P-RR search. Index `v` is the real
/// node, `v + n` its shadow.
#[derive(Debug, Clone)]
pub struct PrrWorkspace {
    n: usize,
    epoch: u32,
    stamp: Vec<u32>,
    dist: Vec<f64>,
    done: Vec<u32>,
    heap: BinaryHeap<Reverse<Entry>>,
}

impl PrrWorkspace {
    pub fn new(n: usize) -> Self {
        PrrWorkspace {
            n,
            epoch: 0,
            stamp: vec![0; 2 * n],
            dist: vec![0.0; 2 * n],
            done: vec![0; 2 * n],
            heap: BinaryHeap::new(),
        }
    }

    fn begin(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|x| *x = 0);
            self.done.iter_mut().for_each(|x| *x = 0);
            self.epoch = 1;
        }
        self.heap.clear();
    }

    fn relax(&mut self, node: u32, shadow: bool, delay: f64) {
        let i = node as usize + if shadow { self.n } else { 0 };
        if self.done[i] == self.epoch {
            return;
        }
        if self.stamp[i] != self.epoch || delay < self.dist[i] {
            self.stamp[i] = self.epoch;
            self.dist[i] = delay;
            self.heap.push(Reverse(Entry { delay, shadow, node }));
        }
    }
}

/// Reverse Dijkstra over real and shadow nodes. A real node `v` popped at
/// `D` pushes its shadow at `D + δ(v)` and its live in-neighbours `u` at
/// `D + d(u,v)`; a popped shadow joins `R^P` and flips its self-activation
/// coin. After the first self-activated shadow at delay `D`, entries still
/// at `D` are drained so ties count as members; `u^s` is then the smallest
/// id among the tied self-activated shadows.
pub fn prr_search<W: WorldSource + ?Sized>(
    g: &DirectedGraph,
    world: &mut W,
    root: NodeId,
    ws: &mut PrrWorkspace,
    members: &mut Vec<NodeId>,
    mut trace: Option<&mut Vec<f64>>,
) -> Option<NodeId> {
    ws.begin();
    members.clear();
    ws.relax(root.0, false, 0.0);
    let mut found: Option<(NodeId, f64)> = None;
    while let Some(&Reverse(top)) = ws.heap.peek() {
        if found.is_some_and(|(_, d)| top.delay > d) {
            break;
        }
        ws.heap.pop();
        let i = top.node as usize + if top.shadow { ws.n } else { 0 };
        if ws.done[i] == ws.epoch || top.delay > ws.dist[i] {
            continue;
        }
        ws.done[i] = ws.epoch;
        if let Some(t) = trace.as_deref_mut() {
            t.push(top.delay);
        }
        let v = NodeId(top.node);
        if top.shadow {
            members.push(v);
            if world.self_activated(v) && found.is_none_or(|(u, _)| v < u) {
                found = Some((v, top.delay));
            }
        } else {
            let sd = world.self_delay(v);
            ws.relax(top.node, true, top.delay + sd);
            for &e in g.in_edges(v) {
                let e = e as usize;
                if world.edge_live(e) {
                    let d = world.edge_delay(e);
                    ws.relax(g.source(e).0, false, top.delay + d);
                }
            }
        }
    }
    found.map(|(u, _)| u)
}

/// P-RR set in a pinned world.
pub fn prr_in_world(g: &DirectedGraph, world: &PossibleWorld, root: NodeId, trace: Option<&mut Vec<f64>>) -> PrrResult {
    let mut ws = PrrWorkspace::new(g.node_count());
    let mut members = Vec::new();
    let source = prr_search(g, &mut &*world, root, &mut ws, &mut members, trace);
    PrrResult { root, members, source }
}

/// Reusable P-RR generator over lazily drawn worlds.
#[derive(Debug, Clone)]
pub struct PrrSampler<'g> {
    pub g: &'g DirectedGraph,
    pub profile: &'g SelfActivationProfile,
    pub edge_delay: DelayDist,
    memo: WorldMemo,
    ws: PrrWorkspace,
}

impl<'g> PrrSampler<'g> {
    pub fn new(g: &'g DirectedGraph, profile: &'g SelfActivationProfile, edge_delay: DelayDist) -> Result<Self> {
        profile.check_for(g)?;
        edge_delay.validate()?;
        Ok(PrrSampler {
            g,
            profile,
            edge_delay,
            memo: WorldMemo::new(g.node_count(), g.edge_count()),
            ws: PrrWorkspace::new(g.node_count()),
        })
    }

    /// Fills `members` and returns `(root, u^s)`.
    pub fn sample_into<R: Rng + ?Sized>(
        &mut self,
        root: Option<NodeId>,
        rng: &mut R,
        members: &mut Vec<NodeId>,
    ) -> (NodeId, Option<NodeId>) {
        let root = root.unwrap_or_else(|| NodeId::from(uniform_index(rng, self.g.node_count())));
        let mut world = LazyWorld::new(self.g, self.profile, self.edge_delay, &mut self.memo, rng);
        let source = prr_search(self.g, &mut world, root, &mut self.ws, members, None);
        (root, source)
    }
}

/// Random P-RR set; the root is uniform over `V` when not given.
pub fn gen_prr<R: Rng + ?Sized>(
    g: &DirectedGraph,
    profile: &SelfActivationProfile,
    edge_delay: DelayDist,
    root: Option<NodeId>,
    rng: &mut R,
) -> Result<PrrResult> {
    if let Some(r) = root {
        g.check_node(r)?;
    } else if g.node_count() == 0 {
        return Err(Error::InvalidParameter("graph has no nodes"));
    }
    let mut sampler = PrrSampler::new(g, profile, edge_delay)?;
    let mut members = Vec::new();
    let (root, source) = sampler.sample_into(root, rng, &mut members);
    Ok(PrrResult { root, members, source })
}

fn check_solver_inputs(g: &DirectedGraph, profile: &SelfActivationProfile, k: usize) -> Result<()> {
    profile.check_for(g)?;
    if k == 0 || k > g.node_count() {
        return Err(Error::InvalidBudget { k, n: g.node_count() });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SaicRun {
    pub seeds: Vec<NodeId>,
    pub params: ImmParams,
    pub phase1: Phase1Outcome,
    /// Objective estimate `n · F` for the returned seeds.
    pub estimate: f64,
    /// Samples counted toward `θ`.
    pub samples: usize,
    /// Samples skipped as already covered by self-activation (BIM only).
    pub covered_external: usize,
}

struct BimSampler<'g> {
    g: &'g DirectedGraph,
    q: &'g [f64],
    rr: RrSampler,
    buf: Vec<NodeId>,
    store: RRStore,
}

impl CoverageSampler for BimSampler<'_> {
    fn sample_count(&self) -> usize {
        self.store.total()
    }

    fn add_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let root = NodeId::from(uniform_index(rng, self.g.node_count()));
        self.rr.sample_into(self.g, root, rng, &mut self.buf);
        // every member's own coin is flipped, as in the sampling rule
        let mut pre_covered = false;
        for v in &self.buf {
            pre_covered |= bernoulli(rng, self.q[v.index()]);
        }
        if pre_covered {
            self.store.add_external();
        } else {
            self.store.push(root, &self.buf);
        }
    }

    fn best_fraction(&mut self, k: usize) -> f64 {
        node_selection(&self.store, k).fraction
    }
}

/// Boosted influence maximization. RR sets containing a self-activated
/// node count as covered without being stored.
pub fn imm_bim<R: Rng + ?Sized>(
    g: &DirectedGraph,
    profile: &SelfActivationProfile,
    k: usize,
    epsilon: f64,
    ell: f64,
    rng: &mut R,
) -> Result<SaicRun> {
    check_solver_inputs(g, profile, k)?;
    let n = g.node_count();
    let params = compute_params(epsilon, ell, k, n, ImmVariant::Standard)?;
    let mut s = BimSampler {
        g,
        q: &profile.q,
        rr: RrSampler::new(n),
        buf: Vec::new(),
        store: RRStore::new(n),
    };
    let phase1 = imm_phase1(&mut s, &params, n, Phase1Rule::Imm, rng);
    let sel = node_selection(&s.store, k);
    Ok(SaicRun {
        seeds: sel.nodes,
        params,
        phase1,
        estimate: n as f64 * sel.fraction,
        samples: s.store.total(),
        covered_external: s.store.covered_external(),
    })
}

struct BpimSampler<'g> {
    prr: PrrSampler<'g>,
    buf: Vec<NodeId>,
    store: RRStore,
}

impl CoverageSampler for BpimSampler<'_> {
    fn sample_count(&self) -> usize {
        self.store.len()
    }

    fn add_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let (root, _) = self.prr.sample_into(None, rng, &mut self.buf);
        self.store.push(root, &self.buf);
    }

    fn best_fraction(&mut self, k: usize) -> f64 {
        node_selection(&self.store, k).fraction
    }
}

/// Boosted preemptive influence maximization over P-RR sets.
pub fn imm_bpim<R: Rng + ?Sized>(
    g: &DirectedGraph,
    profile: &SelfActivationProfile,
    edge_delay: DelayDist,
    k: usize,
    epsilon: f64,
    ell: f64,
    rng: &mut R,
) -> Result<SaicRun> {
    check_solver_inputs(g, profile, k)?;
    let n = g.node_count();
    let params = compute_params(epsilon, ell, k, n, ImmVariant::Standard)?;
    let mut s = BpimSampler {
        prr: PrrSampler::new(g, profile, edge_delay)?,
        buf: Vec::new(),
        store: RRStore::new(n),
    };
    let phase1 = imm_phase1(&mut s, &params, n, Phase1Rule::Imm, rng);
    let sel = node_selection(&s.store, k);
    Ok(SaicRun {
        seeds: sel.nodes,
        params,
        phase1,
        estimate: n as f64 * sel.fraction,
        samples: s.store.len(),
        covered_external: 0,
    })
}

/// Counts of how often each node is the earliest self-activated source.
#[derive(Debug, Clone)]
pub struct SourceCounter<'g> {
    prr: PrrSampler<'g>,
    buf: Vec<NodeId>,
    pub est: Vec<u64>,
    pub samples: usize,
}

impl<'g> SourceCounter<'g> {
    pub fn new(prr: PrrSampler<'g>) -> Self {
        let n = prr.g.node_count();
        SourceCounter {
            prr,
            buf: Vec::new(),
            est: vec![0; n],
            samples: 0,
        }
    }

    /// The `k` nodes with the largest counts (smallest id on ties) and
    /// the sum of their counts.
    pub fn top_k(&self, k: usize) -> (Vec<NodeId>, u64) {
        top_k_by_count(&self.est, k)
    }
}

pub fn top_k_by_count(est: &[u64], k: usize) -> (Vec<NodeId>, u64) {
    let mut order: Vec<usize> = (0..est.len()).collect();
    order.sort_by(|&a, &b| est[b].cmp(&est[a]).then(a.cmp(&b)));
    order.truncate(k);
    let sum = order.iter().map(|&v| est[v]).sum();
    (order.into_iter().map(NodeId::from).collect(), sum)
}

impl CoverageSampler for SourceCounter<'_> {
    fn sample_count(&self) -> usize {
        self.samples
    }

    fn add_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let (_, source) = self.prr.sample_into(None, rng, &mut self.buf);
        if let Some(u) = source {
            self.est[u.index()] += 1;
        }
        self.samples += 1;
    }

    fn best_fraction(&mut self, k: usize) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.top_k(k).1 as f64 / self.samples as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct PimRun {
    pub seeds: Vec<NodeId>,
    pub params: ImmParams,
    pub phase1: Phase1Outcome,
    pub est: Vec<u64>,
    pub samples: usize,
    /// `n · Σ_{u∈S} est_u / samples`
    pub estimate: f64,
    /// No sample found a self-activated source; the seeds are the `k`
    /// lowest ids.
    pub all_zero: bool,
}

impl PimRun {
    /// `ρ̂({u}) = n · est_u / samples`
    pub fn single_node_estimate(&self, u: NodeId) -> f64 {
        self.est.len() as f64 * self.est[u.index()] as f64 / self.samples.max(1) as f64
    }
}

/// Preemptive influence maximization: count `u^s` over P-RR samples and
/// return the top `k` nodes.
pub fn imm_pim<R: Rng + ?Sized>(
    g: &DirectedGraph,
    profile: &SelfActivationProfile,
    edge_delay: DelayDist,
    k: usize,
    epsilon: f64,
    ell: f64,
    rng: &mut R,
) -> Result<PimRun> {
    check_solver_inputs(g, profile, k)?;
    let n = g.node_count();
    let params = compute_params(epsilon, ell, k, n, ImmVariant::Pim)?;
    let mut s = SourceCounter::new(PrrSampler::new(g, profile, edge_delay)?);
    let phase1 = imm_phase1(&mut s, &params, n, Phase1Rule::Pim, rng);
    let (seeds, topk) = s.top_k(k);
    Ok(PimRun {
        seeds,
        estimate: n as f64 * topk as f64 / s.samples as f64,
        all_zero: s.est.iter().all(|&c| c == 0),
        params,
        phase1,
        samples: s.samples,
        est: s.est,
    })
}
