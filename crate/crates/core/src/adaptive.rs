//! Adaptive MRIM.
//!
//! Before each round the policy sees what earlier rounds revealed: the
//! seeds, the nodes they reached, and the live edges leaving reached nodes.
//! Edge statuses outside that subgraph stay hidden. The shipped policies
//! only use the cumulative active set `A_{t-1}`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{reach, DirectedGraph, EdgeStatus, LazyLiveEdges, NodeId};
use crate::mrt::{CountAccumulator, SeedSchedule, SpreadEstimate};
use crate::nodeset::NodeSet;
use crate::ris::{
    compute_params, imm_phase1, node_selection, ImmParams, ImmVariant, Phase1Outcome, Phase1Rule, RRSet, RRStore,
    RootPool, RrCoverage, RrSampler,
};
use crate::rng::{stream, StreamRng};

/// What one round revealed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundObservation {
    pub round: usize,
    pub seeds: Vec<NodeId>,
    /// `reach(L_t, S_t)`, sorted.
    pub reached: Vec<NodeId>,
    /// Live edges leaving reached nodes, sorted. The other out-edges of
    /// reached nodes were seen blocked.
    pub live_edges: Vec<u32>,
}

/// Runs one round's propagation and records the observable subgraph.
pub fn observe<L: EdgeStatus + ?Sized>(g: &DirectedGraph, live: &mut L, round: usize, seeds: &[NodeId]) -> RoundObservation {
    let reached = reach(g, live, seeds);
    let mut live_edges = Vec::new();
    for v in reached.iter() {
        for &e in g.out_edges(v) {
            if live.is_live(g, e as usize) {
                live_edges.push(e);
            }
        }
    }
    live_edges.sort_unstable();
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    RoundObservation {
        round,
        seeds,
        reached: reached.to_sorted_vec(),
        live_edges,
    }
}

#[derive(Debug, Clone)]
pub struct Feedback {
    /// Rounds completed so far (0 before the first round).
    pub round: usize,
    /// `A_t`, the union of everything reached so far.
    pub active: NodeSet,
    pub trace: Vec<RoundObservation>,
}

impl Feedback {
    pub fn empty(n: usize) -> Self {
        Feedback {
            round: 0,
            active: NodeSet::new(n),
            trace: Vec::new(),
        }
    }

    pub fn record(&mut self, obs: RoundObservation) {
        for &v in &obs.reached {
            self.active.insert(v);
        }
        self.round = obs.round + 1;
        self.trace.push(obs);
    }
}

/// Chooses the seeds of the next round from the feedback so far.
pub trait Policy {
    fn select(
        &mut self,
        g: &DirectedGraph,
        feedback: &Feedback,
        k: usize,
        horizon: usize,
        rng: &mut StreamRng,
    ) -> Result<Vec<NodeId>>;

    /// Called before each trial.
    fn reset(&mut self) {}
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn select(
        &mut self,
        g: &DirectedGraph,
        feedback: &Feedback,
        k: usize,
        horizon: usize,
        rng: &mut StreamRng,
    ) -> Result<Vec<NodeId>> {
        (**self).select(g, feedback, k, horizon, rng)
    }

    fn reset(&mut self) {
        (**self).reset()
    }
}

/// Monte Carlo estimate of `E|reach(L, S) \ A|`.
pub fn marginal_gain<R: Rng + ?Sized>(
    g: &DirectedGraph,
    active: &NodeSet,
    seeds: &[NodeId],
    samples: usize,
    rng: &mut R,
) -> SpreadEstimate {
    let mut acc = CountAccumulator::default();
    for _ in 0..samples {
        let mut live = LazyLiveEdges::new(g, rng);
        acc.push(reach(g, &mut live, seeds).count_outside(active) as u64);
    }
    acc.estimate()
}

/// `k`-step greedy on [`marginal_gain`] with `samples` fresh simulations
/// per candidate.
pub fn ada_greedy_round<R: Rng + ?Sized>(
    g: &DirectedGraph,
    active: &NodeSet,
    k: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<NodeId>> {
    let n = g.node_count();
    if k > n {
        return Err(Error::InvalidBudget { k, n });
    }
    let mut seeds: Vec<NodeId> = Vec::with_capacity(k);
    let mut chosen = vec![false; n];
    for _ in 0..k {
        let mut best: Option<(NodeId, f64)> = None;
        for v in g.nodes().filter(|v| !chosen[v.index()]) {
            seeds.push(v);
            let value = marginal_gain(g, active, &seeds, samples, rng).mean;
            seeds.pop();
            if best.is_none_or(|(_, b)| value > b + 1e-12 * b.abs().max(1.0)) {
                best = Some((v, value));
            }
        }
        let Some((v, _)) = best else { break };
        chosen[v.index()] = true;
        seeds.push(v);
    }
    Ok(seeds)
}

/// RR set rooted uniformly in `V \ A`.
pub fn gen_weighted_rr<R: Rng + ?Sized>(g: &DirectedGraph, active: &NodeSet, rng: &mut R) -> Result<RRSet> {
    let pool = RootPool::excluding(g.node_count(), active);
    if pool.is_empty() {
        return Err(Error::NoValidRoot);
    }
    let root = pool.draw(rng);
    let mut members = Vec::new();
    RrSampler::new(g.node_count()).sample_into(g, root, rng, &mut members);
    Ok(RRSet { root, members })
}

#[derive(Debug, Clone)]
pub struct AdaImmRound {
    pub seeds: Vec<NodeId>,
    pub params: ImmParams,
    pub phase1: Phase1Outcome,
    /// `n_a = n - |A|`
    pub n_active_free: usize,
    /// `n_a · F` for the chosen seeds.
    pub estimate: f64,
    /// Stored samples after the round (for inspection or reuse).
    pub store: RRStore,
}

/// One AdaIMM round from scratch.
pub fn ada_imm_round<R: Rng + ?Sized>(
    g: &DirectedGraph,
    active: &NodeSet,
    k: usize,
    epsilon: f64,
    ell: f64,
    horizon: usize,
    rng: &mut R,
) -> Result<AdaImmRound> {
    ada_imm_round_with_store(g, active, k, epsilon, ell, horizon, RRStore::new(g.node_count()), rng)
}

/// As [`ada_imm_round`], continuing from `store`. Samples whose root is now
/// active are dropped first; the rest are still valid weighted samples.
#[allow(clippy::too_many_arguments)]
pub fn ada_imm_round_with_store<R: Rng + ?Sized>(
    g: &DirectedGraph,
    active: &NodeSet,
    k: usize,
    epsilon: f64,
    ell: f64,
    horizon: usize,
    mut store: RRStore,
    rng: &mut R,
) -> Result<AdaImmRound> {
    let n = g.node_count();
    let pool = RootPool::excluding(n, active);
    if pool.is_empty() {
        return Err(Error::NoValidRoot);
    }
    let n_a = pool.len();
    let params = compute_params(epsilon, ell, k, n, ImmVariant::Adaptive { rounds: horizon })?;
    store.retain_roots(|r| !active.contains(r));
    let mut cov = RrCoverage::with_store(g, pool, store);
    let phase1 = imm_phase1(&mut cov, &params, n_a, Phase1Rule::Imm, rng);
    let sel = node_selection(&cov.store, k);
    Ok(AdaImmRound {
        seeds: sel.nodes,
        params,
        phase1,
        n_active_free: n_a,
        estimate: n_a as f64 * sel.fraction,
        store: cov.store,
    })
}

#[derive(Debug, Clone)]
pub struct AdaGreedyPolicy {
    pub samples: usize,
}

impl Policy for AdaGreedyPolicy {
    fn select(&mut self, g: &DirectedGraph, fb: &Feedback, k: usize, _h: usize, rng: &mut StreamRng) -> Result<Vec<NodeId>> {
        ada_greedy_round(g, &fb.active, k, self.samples, rng)
    }
}

#[derive(Debug, Clone)]
pub struct AdaImmPolicy {
    pub epsilon: f64,
    pub ell: f64,
    /// Keep RR samples across rounds of a trial.
    pub incremental: bool,
    store: Option<RRStore>,
    /// Diagnostics of each round in the current trial: `(θ, LB, samples)`.
    pub rounds: Vec<(f64, f64, usize)>,
}

impl AdaImmPolicy {
    pub fn new(epsilon: f64, ell: f64) -> Self {
        AdaImmPolicy {
            epsilon,
            ell,
            incremental: false,
            store: None,
            rounds: Vec::new(),
        }
    }
}

impl Policy for AdaImmPolicy {
    fn select(&mut self, g: &DirectedGraph, fb: &Feedback, k: usize, h: usize, rng: &mut StreamRng) -> Result<Vec<NodeId>> {
        let store = match (self.incremental, self.store.take()) {
            (true, Some(s)) => s,
            _ => RRStore::new(g.node_count()),
        };
        match ada_imm_round_with_store(g, &fb.active, k, self.epsilon, self.ell, h, store, rng) {
            Ok(r) => {
                self.rounds.push((r.phase1.theta, r.phase1.lb, r.phase1.samples));
                if self.incremental {
                    self.store = Some(r.store);
                }
                Ok(r.seeds)
            }
            // everything is active; any seeds are worthless
            Err(Error::NoValidRoot) => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    }

    fn reset(&mut self) {
        self.store = None;
        self.rounds.clear();
    }
}

/// A non-adaptive schedule played regardless of feedback.
#[derive(Debug, Clone)]
pub struct FixedSchedulePolicy(pub SeedSchedule);

impl Policy for FixedSchedulePolicy {
    fn select(&mut self, _g: &DirectedGraph, fb: &Feedback, _k: usize, _h: usize, _rng: &mut StreamRng) -> Result<Vec<NodeId>> {
        Ok(if fb.round < self.0.horizon() {
            self.0.round(fb.round).to_vec()
        } else {
            Vec::new()
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EmptyPolicy;

impl Policy for EmptyPolicy {
    fn select(&mut self, _g: &DirectedGraph, _fb: &Feedback, _k: usize, _h: usize, _rng: &mut StreamRng) -> Result<Vec<NodeId>> {
        Ok(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveRunResult {
    pub schedule: Vec<Vec<NodeId>>,
    /// `|A_T|`
    pub total_active: usize,
    /// Newly activated nodes per round; sums to `total_active`.
    pub gains: Vec<usize>,
    pub trace: Vec<RoundObservation>,
}

/// One trial. The environment draws from substream `2i` of `seed`, the
/// policy from `2i + 1`.
pub fn run_trial<P: Policy + ?Sized>(
    g: &DirectedGraph,
    policy: &mut P,
    horizon: usize,
    k: usize,
    trial: u64,
    seed: u64,
) -> Result<AdaptiveRunResult> {
    let n = g.node_count();
    let mut env = stream(seed, 2 * trial);
    let mut prng = stream(seed, 2 * trial + 1);
    policy.reset();
    let mut fb = Feedback::empty(n);
    let mut schedule = Vec::with_capacity(horizon);
    let mut gains = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let mut seeds = policy.select(g, &fb, k, horizon, &mut prng)?;
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() > k {
            return Err(Error::InvalidBudget { k: seeds.len(), n });
        }
        for &v in &seeds {
            g.check_node(v)?;
        }
        let mut live = LazyLiveEdges::new(g, &mut env);
        let obs = observe(g, &mut live, t, &seeds);
        let before = fb.active.len();
        fb.record(obs);
        gains.push(fb.active.len() - before);
        schedule.push(seeds);
    }
    Ok(AdaptiveRunResult {
        schedule,
        total_active: fb.active.len(),
        gains,
        trace: fb.trace,
    })
}

#[derive(Debug, Clone)]
pub struct AdaptiveSummary {
    /// `f_avg` estimate: mean `|A_T|` over trials.
    pub estimate: SpreadEstimate,
    pub runs: Vec<AdaptiveRunResult>,
}

pub fn run_adaptive<P: Policy + ?Sized>(
    g: &DirectedGraph,
    policy: &mut P,
    horizon: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<AdaptiveSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive"));
    }
    let mut acc = CountAccumulator::default();
    let mut runs = Vec::with_capacity(trials);
    for i in 0..trials as u64 {
        let r = run_trial(g, policy, horizon, k, i, seed)?;
        acc.push(r.total_active as u64);
        runs.push(r);
    }
    Ok(AdaptiveSummary {
        estimate: acc.estimate(),
        runs,
    })
}
