//! Reverse influence sampling.
//!
//! RR sets and multi-round RR sequences, inverted-index coverage stores,
//! greedy max-coverage selection, and the two-phase IMM sample-size search
//! shared by every RR-based solver in the crate.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::mrt::{RoundNodePair, SeedSchedule};
use crate::nodeset::NodeSet;
use crate::rng::{bernoulli, uniform_index};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRSet {
    pub root: NodeId,
    pub members: Vec<NodeId>,
}

/// `T` independent reverse samples sharing one root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRSequence {
    pub root: NodeId,
    pub per_round: Vec<Vec<NodeId>>,
}

/// Where roots are drawn from: all of `V`, or `V \ A` for weighted samples.
#[derive(Debug, Clone)]
pub enum RootPool {
    All(usize),
    Subset(Vec<NodeId>),
}

impl RootPool {
    pub fn excluding(n: usize, active: &NodeSet) -> Self {
        if active.is_empty() {
            RootPool::All(n)
        } else {
            RootPool::Subset((0..n).map(NodeId::from).filter(|&v| !active.contains(v)).collect())
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RootPool::All(n) => *n,
            RootPool::Subset(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        match self {
            RootPool::All(n) => NodeId::from(uniform_index(rng, *n)),
            RootPool::Subset(v) => v[uniform_index(rng, v.len())],
        }
    }
}

/// Reusable workspace for reverse BFS sampling. Visit marks are epoch
/// stamps, so starting a new sample costs nothing proportional to `n`.
#[derive(Debug, Clone)]
pub struct RrSampler {
    stamp: Vec<u32>,
    epoch: u32,
    head: usize,
}

impl RrSampler {
    pub fn new(n: usize) -> Self {
        RrSampler {
            stamp: vec![0; n],
            epoch: 0,
            head: 0,
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    /// Appends the RR set rooted at `root` to `out` (after clearing it).
    /// Each incoming edge is flipped when its head is first expanded, so
    /// every edge coin is drawn at most once.
    pub fn sample_into<R: Rng + ?Sized>(&mut self, g: &DirectedGraph, root: NodeId, rng: &mut R, out: &mut Vec<NodeId>) {
        self.next_epoch();
        out.clear();
        out.push(root);
        self.stamp[root.index()] = self.epoch;
        self.head = 0;
        while self.head < out.len() {
            let v = out[self.head];
            self.head += 1;
            for &e in g.in_edges(v) {
                let e = e as usize;
                let u = g.source(e);
                if self.stamp[u.index()] != self.epoch && bernoulli(rng, g.prob(e)) {
                    self.stamp[u.index()] = self.epoch;
                    out.push(u);
                }
            }
        }
    }
}

/// Random RR set; the root is uniform over `V` when not given.
pub fn gen_rr<R: Rng + ?Sized>(g: &DirectedGraph, root: Option<NodeId>, rng: &mut R) -> Result<RRSet> {
    let root = pick_root(g, root, rng)?;
    let mut members = Vec::new();
    RrSampler::new(g.node_count()).sample_into(g, root, rng, &mut members);
    Ok(RRSet { root, members })
}

fn pick_root<R: Rng + ?Sized>(g: &DirectedGraph, root: Option<NodeId>, rng: &mut R) -> Result<NodeId> {
    match root {
        Some(r) => {
            g.check_node(r)?;
            Ok(r)
        }
        None if g.node_count() == 0 => Err(Error::InvalidParameter("graph has no nodes")),
        None => Ok(NodeId::from(uniform_index(rng, g.node_count()))),
    }
}

/// One uniform root and `rounds` independent reverse samples from it.
pub fn gen_rr_sequence<R: Rng + ?Sized>(g: &DirectedGraph, rounds: usize, rng: &mut R) -> Result<RRSequence> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be positive"));
    }
    let root = pick_root(g, None, rng)?;
    let mut sampler = RrSampler::new(g.node_count());
    let per_round = (0..rounds)
        .map(|_| {
            let mut out = Vec::new();
            sampler.sample_into(g, root, rng, &mut out);
            out
        })
        .collect();
    Ok(RRSequence { root, per_round })
}

/// Flat store of single-round samples with a node -> sample-id index.
///
/// `covered_external` counts samples that were generated but not stored
/// because something other than a seed already covers them (self-activated
/// members in IMM-BIM); they still count toward the sample total.
#[derive(Debug, Clone)]
pub struct RRStore {
    n: usize,
    roots: Vec<NodeId>,
    offsets: Vec<usize>,
    members: Vec<NodeId>,
    index: Vec<Vec<u32>>,
    covered_external: usize,
}

impl RRStore {
    pub fn new(n: usize) -> Self {
        RRStore {
            n,
            roots: Vec::new(),
            offsets: vec![0],
            members: Vec::new(),
            index: vec![Vec::new(); n],
            covered_external: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Stored samples (excludes `covered_external`).
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn covered_external(&self) -> usize {
        self.covered_external
    }

    pub fn add_external(&mut self) {
        self.covered_external += 1;
    }

    /// Stored plus externally covered samples.
    pub fn total(&self) -> usize {
        self.len() + self.covered_external
    }

    pub fn push(&mut self, root: NodeId, members: &[NodeId]) {
        let id = self.roots.len() as u32;
        self.roots.push(root);
        self.members.extend_from_slice(members);
        self.offsets.push(self.members.len());
        for v in members {
            self.index[v.index()].push(id);
        }
    }

    pub fn push_set(&mut self, set: &RRSet) {
        self.push(set.root, &set.members);
    }

    pub fn root(&self, i: usize) -> NodeId {
        self.roots[i]
    }

    pub fn sample(&self, i: usize) -> &[NodeId] {
        &self.members[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn samples(&self) -> impl Iterator<Item = (NodeId, &[NodeId])> + '_ {
        (0..self.len()).map(move |i| (self.roots[i], self.sample(i)))
    }

    /// Ids of stored samples containing `v`.
    pub fn index(&self, v: NodeId) -> &[u32] {
        &self.index[v.index()]
    }

    pub fn total_members(&self) -> usize {
        self.members.len()
    }

    /// Index recomputed from the samples alone.
    pub fn rebuild_index(&self) -> Vec<Vec<u32>> {
        let mut index = vec![Vec::new(); self.n];
        for i in 0..self.len() {
            for v in self.sample(i) {
                index[v.index()].push(i as u32);
            }
        }
        index
    }

    pub fn index_consistent(&self) -> bool {
        self.rebuild_index() == self.index
    }

    /// Keeps the samples whose root satisfies `keep`; the external counter is reset.
    pub fn retain_roots<F: FnMut(NodeId) -> bool>(&mut self, mut keep: F) {
        let old = core::mem::replace(self, RRStore::new(self.n));
        for (root, members) in old.samples() {
            if keep(root) {
                self.push(root, members);
            }
        }
    }

    /// Stored samples hit by `nodes`.
    pub fn coverage(&self, nodes: &[NodeId]) -> usize {
        let mut hit = vec![false; self.len()];
        let mut count = 0;
        for v in nodes {
            for &i in self.index(*v) {
                if !hit[i as usize] {
                    hit[i as usize] = true;
                    count += 1;
                }
            }
        }
        count
    }

    /// `(covered_external + hits) / (covered_external + |store|)`, 0 for an empty store.
    pub fn fraction(&self, hits: usize) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            (self.covered_external + hits) as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub nodes: Vec<NodeId>,
    /// Stored samples hit by `nodes`.
    pub covered: usize,
    /// Covered fraction including externally covered samples.
    pub fraction: f64,
}

/// Greedy max coverage: `min(k, n)` picks, each the node covering the most
/// not-yet-covered stored samples (smallest id on ties, zero gains allowed).
pub fn node_selection(store: &RRStore, k: usize) -> Selection {
    let n = store.node_count();
    let mut gain: Vec<usize> = (0..n).map(|v| store.index[v].len()).collect();
    let mut chosen = vec![false; n];
    let mut covered = vec![false; store.len()];
    let mut nodes = Vec::with_capacity(k.min(n));
    let mut total = 0;
    for _ in 0..k.min(n) {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if !chosen[v] && best.is_none_or(|b| gain[v] > gain[b]) {
                best = Some(v);
            }
        }
        let Some(b) = best else { break };
        chosen[b] = true;
        nodes.push(NodeId::from(b));
        for &i in &store.index[b] {
            let i = i as usize;
            if !covered[i] {
                covered[i] = true;
                total += 1;
                for w in store.sample(i) {
                    gain[w.index()] -= 1;
                }
            }
        }
    }
    Selection {
        nodes,
        covered: total,
        fraction: store.fraction(total),
    }
}

/// Store of RR sequences with one inverted index per round.
#[derive(Debug, Clone)]
pub struct RRSequenceStore {
    n: usize,
    rounds: usize,
    roots: Vec<NodeId>,
    // offsets[s * rounds + t] .. offsets[s * rounds + t + 1]
    offsets: Vec<usize>,
    members: Vec<NodeId>,
    // index[t * n + v]
    index: Vec<Vec<u32>>,
}

impl RRSequenceStore {
    pub fn new(n: usize, rounds: usize) -> Self {
        RRSequenceStore {
            n,
            rounds,
            roots: Vec::new(),
            offsets: vec![0],
            members: Vec::new(),
            index: vec![Vec::new(); n * rounds],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn push(&mut self, seq: &RRSequence) {
        assert_eq!(seq.per_round.len(), self.rounds, "sequence length must match store rounds");
        let id = self.roots.len() as u32;
        self.roots.push(seq.root);
        for (t, set) in seq.per_round.iter().enumerate() {
            self.members.extend_from_slice(set);
            self.offsets.push(self.members.len());
            for v in set {
                self.index[t * self.n + v.index()].push(id);
            }
        }
    }

    pub fn root(&self, s: usize) -> NodeId {
        self.roots[s]
    }

    pub fn round_set(&self, s: usize, t: usize) -> &[NodeId] {
        let j = s * self.rounds + t;
        &self.members[self.offsets[j]..self.offsets[j + 1]]
    }

    pub fn index(&self, t: usize, v: NodeId) -> &[u32] {
        &self.index[t * self.n + v.index()]
    }

    pub fn sequence(&self, s: usize) -> RRSequence {
        RRSequence {
            root: self.roots[s],
            per_round: (0..self.rounds).map(|t| self.round_set(s, t).to_vec()).collect(),
        }
    }

    pub fn index_consistent(&self) -> bool {
        let mut index = vec![Vec::new(); self.n * self.rounds];
        for s in 0..self.len() {
            for t in 0..self.rounds {
                for v in self.round_set(s, t) {
                    index[t * self.n + v.index()].push(s as u32);
                }
            }
        }
        index == self.index
    }

    /// Sequences with some round `t` where `S_t` meets `R^t`.
    pub fn covered_by(&self, sched: &SeedSchedule) -> usize {
        let mut hit = vec![false; self.len()];
        let mut count = 0;
        for pair in sched.pairs() {
            for &s in self.index(pair.round, pair.node) {
                if !hit[s as usize] {
                    hit[s as usize] = true;
                    count += 1;
                }
            }
        }
        count
    }
}

/// `n` times the fraction of sequences with `S_t ∩ R^t ≠ ∅` for some `t`.
pub fn estimate_rho_rr(store: &RRSequenceStore, sched: &SeedSchedule) -> Result<f64> {
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    if sched.horizon() > store.rounds() {
        return Err(Error::InvalidParameter("schedule has more rounds than the store"));
    }
    Ok(store.node_count() as f64 * store.covered_by(sched) as f64 / store.len() as f64)
}

/// How seeds are distributed over rounds when covering RR sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    /// Fill round 1 with `k` greedy picks, then round 2, and so on.
    WithinRound,
    /// `T·k` greedy picks over node-round pairs, at most `k` per round.
    CrossRound,
}

/// Greedy coverage of RR sequences by node-round pairs.
pub fn sequence_selection(store: &RRSequenceStore, k: usize, mode: SelectionMode) -> (SeedSchedule, usize) {
    let (n, rounds) = (store.node_count(), store.rounds());
    let mut gain: Vec<usize> = store.index.iter().map(Vec::len).collect();
    let mut covered = vec![false; store.len()];
    let mut sched = SeedSchedule::new(rounds, k);
    let mut total = 0;
    let per_round = k.min(n);

    let mut take = |pair: RoundNodePair, gain: &mut Vec<usize>, sched: &mut SeedSchedule| {
        sched.add(pair).expect("pair feasible by construction");
        for &s in store.index(pair.round, pair.node) {
            let s = s as usize;
            if !covered[s] {
                covered[s] = true;
                total += 1;
                for t in 0..rounds {
                    for w in store.round_set(s, t) {
                        gain[t * n + w.index()] -= 1;
                    }
                }
            }
        }
    };

    match mode {
        SelectionMode::WithinRound => {
            for t in 0..rounds {
                for _ in 0..per_round {
                    let mut best: Option<usize> = None;
                    for v in 0..n {
                        let pair = RoundNodePair::new(t, NodeId::from(v));
                        if sched.can_add(pair) && best.is_none_or(|b| gain[t * n + v] > gain[t * n + b]) {
                            best = Some(v);
                        }
                    }
                    if let Some(v) = best {
                        take(RoundNodePair::new(t, NodeId::from(v)), &mut gain, &mut sched);
                    }
                }
            }
        }
        SelectionMode::CrossRound => {
            for _ in 0..rounds * per_round {
                let mut best: Option<(usize, usize)> = None;
                for t in 0..rounds {
                    for v in 0..n {
                        let pair = RoundNodePair::new(t, NodeId::from(v));
                        if sched.can_add(pair)
                            && best.is_none_or(|(bt, bv)| gain[t * n + v] > gain[bt * n + bv])
                        {
                            best = Some((t, v));
                        }
                    }
                }
                if let Some((t, v)) = best {
                    take(RoundNodePair::new(t, NodeId::from(v)), &mut gain, &mut sched);
                }
            }
        }
    }
    (sched, total)
}

/// Parameter recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImmVariant {
    /// `ℓ ← ℓ + γ + ln 2 / ln n`, `λ*` with the `(1 - 1/e)` factors.
    Standard,
    /// Per-round AdaIMM: `ε ← e^(1-1/e) ε / 2`, `ℓ ← ℓ + γ + ln(2T) / ln n`.
    Adaptive { rounds: usize },
    /// As `Standard` but `θ` comes from `λ̃*` (`1 - 1/e` replaced by 1).
    Pim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImmParams {
    pub variant: ImmVariant,
    pub n: usize,
    pub k: usize,
    pub epsilon_input: f64,
    pub ell_input: f64,
    /// ε after the variant adjustment.
    pub epsilon: f64,
    /// `√2 · ε`
    pub epsilon_prime: f64,
    /// ℓ after `γ` and the variant increment.
    pub ell: f64,
    pub gamma: f64,
    pub log_binom: f64,
    pub alpha: f64,
    pub beta: f64,
    pub beta_tilde: f64,
    pub lambda_prime: f64,
    /// `2n((1-1/e)α + β)² / ε²`
    pub lambda_star_standard: f64,
    /// `2n(α + β̃)² / ε²`
    pub lambda_tilde_star: f64,
    /// The one `θ = λ / LB` uses for this variant.
    pub lambda_star: f64,
}

/// `ln C(n, k)` via log-gamma.
pub fn log_binom(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let (n, k) = (n as f64, k as f64);
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

const ONE_MINUS_INV_E: f64 = 1.0 - 1.0 / E;

struct LambdaInputs {
    n: f64,
    ln_n: f64,
    log_binom: f64,
    epsilon: f64,
    pim: bool,
}

impl LambdaInputs {
    fn parts(&self, ell: f64) -> (f64, f64, f64) {
        let alpha2 = ell * self.ln_n + LN_2;
        let alpha = libm::sqrt(alpha2);
        let beta = libm::sqrt(ONE_MINUS_INV_E * (self.log_binom + alpha2));
        let beta_tilde = libm::sqrt(self.log_binom + alpha2);
        (alpha, beta, beta_tilde)
    }

    fn lambda_standard(&self, ell: f64) -> f64 {
        let (alpha, beta, _) = self.parts(ell);
        let s = ONE_MINUS_INV_E * alpha + beta;
        2.0 * self.n * s * s / (self.epsilon * self.epsilon)
    }

    fn lambda_tilde(&self, ell: f64) -> f64 {
        let (alpha, _, beta_tilde) = self.parts(ell);
        let s = alpha + beta_tilde;
        2.0 * self.n * s * s / (self.epsilon * self.epsilon)
    }

    fn lambda(&self, ell: f64) -> f64 {
        if self.pim {
            self.lambda_tilde(ell)
        } else {
            self.lambda_standard(ell)
        }
    }
}

/// All IMM sample-size quantities for budget `k` on `n` nodes.
///
/// `γ` is the smallest value with `⌈λ(ℓ')⌉ / n^(ℓ+γ) ≤ 1 / n^ℓ`, where
/// `ℓ'` is the final adjusted ℓ, found by bisection.
pub fn compute_params(epsilon: f64, ell: f64, k: usize, n: usize, variant: ImmVariant) -> Result<ImmParams> {
    compute_params_with_choices(epsilon, ell, k, n, variant, log_binom(n, k))
}

/// As [`compute_params`] with an explicit `ln(#candidate solutions)`,
/// for solvers whose solution space is not `C(n, k)`.
pub fn compute_params_with_choices(
    epsilon: f64,
    ell: f64,
    k: usize,
    n: usize,
    variant: ImmVariant,
    log_choices: f64,
) -> Result<ImmParams> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0,1)"));
    }
    if !(ell > 0.0) {
        return Err(Error::InvalidParameter("ell must be positive"));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidBudget { k, n });
    }
    if let ImmVariant::Adaptive { rounds: 0 } = variant {
        return Err(Error::InvalidParameter("rounds must be positive"));
    }
    // the formulas need ln n > 0; a one-node instance borrows n = 2 for its logs
    let n_log = n.max(2) as f64;
    let ln_n = libm::log(n_log);
    let eps = match variant {
        ImmVariant::Adaptive { .. } => libm::exp(ONE_MINUS_INV_E) * epsilon / 2.0,
        _ => epsilon,
    };
    let increment = match variant {
        ImmVariant::Adaptive { rounds } => libm::log(2.0 * rounds as f64) / ln_n,
        _ => LN_2 / ln_n,
    };
    let inputs = LambdaInputs {
        n: n as f64,
        ln_n,
        log_binom: log_choices,
        epsilon: eps,
        pim: matches!(variant, ImmVariant::Pim),
    };

    let holds = |gamma: f64| {
        let lambda = libm::ceil(inputs.lambda(ell + gamma + increment));
        libm::log(lambda) <= gamma * ln_n
    };
    let gamma = if holds(0.0) {
        0.0
    } else {
        let mut hi = 1.0;
        while !holds(hi) {
            hi *= 2.0;
            if hi > 1e9 {
                return Err(Error::InvalidParameter("no gamma satisfies the workaround bound"));
            }
        }
        let mut lo = 0.0;
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    let ell_eff = ell + gamma + increment;
    let (alpha, beta, beta_tilde) = inputs.parts(ell_eff);
    let eps_prime = core::f64::consts::SQRT_2 * eps;
    let lambda_prime = (2.0 + 2.0 / 3.0 * eps_prime)
        * (log_choices + ell_eff * ln_n + libm::log(libm::log2(n_log)))
        * n as f64
        / (eps_prime * eps_prime);
    let lambda_star_standard = inputs.lambda_standard(ell_eff);
    let lambda_tilde_star = inputs.lambda_tilde(ell_eff);
    Ok(ImmParams {
        variant,
        n,
        k,
        epsilon_input: epsilon,
        ell_input: ell,
        epsilon: eps,
        epsilon_prime: eps_prime,
        ell: ell_eff,
        gamma,
        log_binom: log_choices,
        alpha,
        beta,
        beta_tilde,
        lambda_prime,
        lambda_star_standard,
        lambda_tilde_star,
        lambda_star: if inputs.pim { lambda_tilde_star } else { lambda_star_standard },
    })
}

/// A growing sample collection that the phase-1 search can query.
pub trait CoverageSampler {
    /// Samples counted toward `θ`.
    fn sample_count(&self) -> usize;
    fn add_sample<R: Rng + ?Sized>(&mut self, rng: &mut R);
    /// Fraction of samples covered by the best `k`-solution the sampler's
    /// selection rule finds on the current samples.
    fn best_fraction(&mut self, k: usize) -> f64;
}

/// Loop bounds and stop test of the phase-1 search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase1Rule {
    /// `i = 1..⌊log₂(n_eff - 1)⌋`, grow while `count < θ_i`, accept when
    /// `n_eff · F ≥ (1+ε') x_i`, `LB = n_eff · F / (1+ε')`.
    Imm,
    /// `i = 1..⌊log₂ n⌋ - 1`, grow while `count ≤ θ_i`, accept when
    /// `n · topk / θ_i ≥ (1+ε') x_i`, `LB = n · topk / (θ_i (1+ε'))`.
    Pim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Outcome {
    pub lb: f64,
    pub theta: f64,
    /// Loop iterations executed.
    pub iterations: usize,
    /// Iteration whose check fired, if any.
    pub accepted_at: Option<usize>,
    /// Sample count when the search returned (at least `θ`).
    pub samples: usize,
}

/// Lower-bound search followed by top-up to `θ = λ / LB` samples. Samples
/// drawn during the search are kept.
pub fn imm_phase1<S: CoverageSampler, R: Rng + ?Sized>(
    sampler: &mut S,
    params: &ImmParams,
    n_effective: usize,
    rule: Phase1Rule,
    rng: &mut R,
) -> Phase1Outcome {
    let n_eff = n_effective as f64;
    let iterations = match rule {
        Phase1Rule::Imm if n_effective >= 2 => (n_effective - 1).ilog2() as usize,
        Phase1Rule::Imm => 0,
        Phase1Rule::Pim if n_effective >= 1 => (n_effective.ilog2() as usize).saturating_sub(1),
        Phase1Rule::Pim => 0,
    };
    let mut lb = 1.0;
    let mut accepted_at = None;
    let mut executed = 0;
    for i in 1..=iterations {
        executed = i;
        let x = n_eff / libm::pow(2.0, i as f64);
        let theta_i = params.lambda_prime / x;
        match rule {
            Phase1Rule::Imm => {
                while (sampler.sample_count() as f64) < theta_i {
                    sampler.add_sample(rng);
                }
            }
            Phase1Rule::Pim => {
                while (sampler.sample_count() as f64) <= theta_i {
                    sampler.add_sample(rng);
                }
            }
        }
        let f = sampler.best_fraction(params.k);
        let estimate = match rule {
            Phase1Rule::Imm => n_eff * f,
            // topk = f * count
            Phase1Rule::Pim => n_eff * f * sampler.sample_count() as f64 / theta_i,
        };
        if estimate >= (1.0 + params.epsilon_prime) * x {
            lb = estimate / (1.0 + params.epsilon_prime);
            accepted_at = Some(i);
            break;
        }
    }
    let theta = params.lambda_star / lb;
    while sampler.sample_count() as f64 <= theta {
        sampler.add_sample(rng);
    }
    Phase1Outcome {
        lb,
        theta,
        iterations: executed,
        accepted_at,
        samples: sampler.sample_count(),
    }
}

/// Plain or weighted RR sets into an [`RRStore`].
#[derive(Debug)]
pub struct RrCoverage<'g> {
    pub g: &'g DirectedGraph,
    pub pool: RootPool,
    pub store: RRStore,
    sampler: RrSampler,
    buf: Vec<NodeId>,
}

impl<'g> RrCoverage<'g> {
    pub fn new(g: &'g DirectedGraph, pool: RootPool) -> Self {
        RrCoverage::with_store(g, pool, RRStore::new(g.node_count()))
    }

    pub fn with_store(g: &'g DirectedGraph, pool: RootPool, store: RRStore) -> Self {
        RrCoverage {
            g,
            pool,
            store,
            sampler: RrSampler::new(g.node_count()),
            buf: Vec::new(),
        }
    }
}

impl CoverageSampler for RrCoverage<'_> {
    fn sample_count(&self) -> usize {
        self.store.total()
    }

    fn add_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let root = self.pool.draw(rng);
        self.sampler.sample_into(self.g, root, rng, &mut self.buf);
        self.store.push(root, &self.buf);
    }

    fn best_fraction(&mut self, k: usize) -> f64 {
        node_selection(&self.store, k).fraction
    }
}

/// Result of a single-round RR solver.
#[derive(Debug, Clone)]
pub struct ImmRun {
    pub seeds: Vec<NodeId>,
    pub params: ImmParams,
    pub phase1: Phase1Outcome,
    /// Final covered fraction of the selected seeds.
    pub fraction: f64,
    /// Spread estimate `n_eff · fraction`.
    pub estimate: f64,
}

/// Classical single-round IMM under IC.
pub fn imm<R: Rng + ?Sized>(g: &DirectedGraph, k: usize, epsilon: f64, ell: f64, rng: &mut R) -> Result<ImmRun> {
    let n = g.node_count();
    let params = compute_params(epsilon, ell, k, n, ImmVariant::Standard)?;
    let mut cov = RrCoverage::new(g, RootPool::All(n));
    let phase1 = imm_phase1(&mut cov, &params, n, Phase1Rule::Imm, rng);
    let sel = node_selection(&cov.store, k);
    Ok(ImmRun {
        seeds: sel.nodes,
        params,
        phase1,
        fraction: sel.fraction,
        estimate: n as f64 * sel.fraction,
    })
}

struct SequenceCoverage<'g> {
    g: &'g DirectedGraph,
    store: RRSequenceStore,
    mode: SelectionMode,
    per_round_budget: usize,
}

impl CoverageSampler for SequenceCoverage<'_> {
    fn sample_count(&self) -> usize {
        self.store.len()
    }

    fn add_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let seq = gen_rr_sequence(self.g, self.store.rounds(), rng).expect("graph has nodes");
        self.store.push(&seq);
    }

    fn best_fraction(&mut self, _k: usize) -> f64 {
        let (_, covered) = sequence_selection(&self.store, self.per_round_budget, self.mode);
        covered as f64 / self.store.len().max(1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct MrimImmRun {
    pub schedule: SeedSchedule,
    pub params: ImmParams,
    pub phase1: Phase1Outcome,
    pub estimate: f64,
    pub store: RRSequenceStore,
}

/// RR-sequence solver for non-adaptive MRIM: IMM-style sizing over
/// node-round pairs (solution space `C(nT, Tk)`), then greedy sequence
/// coverage in the requested mode.
pub fn mrim_imm<R: Rng + ?Sized>(
    g: &DirectedGraph,
    rounds: usize,
    k: usize,
    epsilon: f64,
    ell: f64,
    mode: SelectionMode,
    rng: &mut R,
) -> Result<MrimImmRun> {
    let n = g.node_count();
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be positive"));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidBudget { k, n });
    }
    let choices = log_binom(n * rounds, k * rounds);
    let params = compute_params_with_choices(epsilon, ell, k, n, ImmVariant::Standard, choices)?;
    let mut cov = SequenceCoverage {
        g,
        store: RRSequenceStore::new(n, rounds),
        mode,
        per_round_budget: k,
    };
    let phase1 = imm_phase1(&mut cov, &params, n, Phase1Rule::Imm, rng);
    let (schedule, covered) = sequence_selection(&cov.store, k, mode);
    let estimate = n as f64 * covered as f64 / cov.store.len() as f64;
    Ok(MrimImmRun {
        schedule,
        params,
        phase1,
        estimate,
        store: cov.store,
    })
}
