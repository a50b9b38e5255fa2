//! Non-adaptive MRIM greedy algorithms.
//!
//! `double_greedy` fills rounds one at a time (outer loop over rounds,
//! inner greedy within the round); `global_greedy` picks `T·k` node-round
//! pairs under the per-round budget. Both consult a [`SpreadEvaluator`].

use alloc::vec::Vec;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::mrt::{estimate_rho, RoundNodePair, SeedSchedule};
use crate::ris::{estimate_rho_rr, RRSequenceStore};
use crate::rng::stream;

/// Spread oracle for schedules.
pub trait SpreadEvaluator {
    fn rho(&mut self, g: &DirectedGraph, sched: &SeedSchedule) -> Result<f64>;

    /// Values for several candidates; override to evaluate them in parallel.
    fn rho_many(&mut self, g: &DirectedGraph, scheds: &[SeedSchedule]) -> Result<Vec<f64>> {
        scheds.iter().map(|s| self.rho(g, s)).collect()
    }
}

impl<F> SpreadEvaluator for F
where
    F: FnMut(&DirectedGraph, &SeedSchedule) -> Result<f64>,
{
    fn rho(&mut self, g: &DirectedGraph, sched: &SeedSchedule) -> Result<f64> {
        self(g, sched)
    }
}

/// `R` fresh simulations per evaluation. Call `c` uses a seed derived from
/// `(seed, c)`; with `common_random_numbers` every call reuses `seed`.
#[derive(Debug, Clone)]
pub struct MonteCarloEvaluator {
    pub samples: usize,
    pub seed: u64,
    pub common_random_numbers: bool,
    calls: u64,
}

impl MonteCarloEvaluator {
    pub fn new(samples: usize, seed: u64) -> Self {
        MonteCarloEvaluator {
            samples,
            seed,
            common_random_numbers: false,
            calls: 0,
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Seed for the next call, advancing the call counter.
    pub fn next_seed(&mut self) -> u64 {
        let c = self.calls;
        self.calls += 1;
        if self.common_random_numbers {
            self.seed
        } else {
            stream(self.seed, c).next_u64()
        }
    }
}

impl SpreadEvaluator for MonteCarloEvaluator {
    fn rho(&mut self, g: &DirectedGraph, sched: &SeedSchedule) -> Result<f64> {
        let seed = self.next_seed();
        Ok(estimate_rho(g, sched, self.samples, seed)?.mean)
    }
}

/// Spread estimated from a frozen store of RR sequences.
#[derive(Debug, Clone)]
pub struct RrSequenceEvaluator {
    pub store: RRSequenceStore,
}

impl SpreadEvaluator for RrSequenceEvaluator {
    fn rho(&mut self, _g: &DirectedGraph, sched: &SeedSchedule) -> Result<f64> {
        estimate_rho_rr(&self.store, sched)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pick {
    pub pair: RoundNodePair,
    pub gain: f64,
    /// Picked only to fill the budget; no candidate had positive gain.
    pub zero_gain: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub schedule: SeedSchedule,
    pub picks: Vec<Pick>,
    /// Evaluator value of the final schedule (as seen by the last pick).
    pub value: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    /// CELF-style lazy re-evaluation. Exact only for submodular, noise-free
    /// evaluators.
    pub lazy: bool,
}

const REL_TOL: f64 = 1e-12;

fn beats(gain: f64, best: f64) -> bool {
    gain > best + REL_TOL * best.abs().max(1.0)
}

fn check_budget(g: &DirectedGraph, rounds: usize, k: usize) -> Result<()> {
    if k > g.node_count() {
        return Err(Error::InvalidBudget { k, n: g.node_count() });
    }
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be positive"));
    }
    Ok(())
}

/// Runs greedy over `candidates(sched)` for `steps` picks.
fn greedy_loop<E, C>(
    g: &DirectedGraph,
    mut sched: SeedSchedule,
    steps: usize,
    eval: &mut E,
    candidates: C,
    lazy: bool,
    mut current: f64,
    picks: &mut Vec<Pick>,
) -> Result<(SeedSchedule, f64)>
where
    E: SpreadEvaluator + ?Sized,
    C: Fn(&SeedSchedule) -> Vec<RoundNodePair>,
{
    // (pair, upper bound on gain, evaluated during this step)
    let mut bounds: Vec<(RoundNodePair, f64, bool)> = Vec::new();
    if lazy {
        bounds = candidates(&sched).into_iter().map(|p| (p, f64::INFINITY, false)).collect();
    }
    for _ in 0..steps {
        let choice = if lazy {
            bounds.retain(|(p, _, _)| sched.can_add(*p));
            bounds.iter_mut().for_each(|b| b.2 = false);
            loop {
                let mut top: Option<usize> = None;
                for (i, b) in bounds.iter().enumerate() {
                    // candidates are kept in (round, node) order, so ties go to the first
                    if top.is_none_or(|t| beats(b.1, bounds[t].1)) {
                        top = Some(i);
                    }
                }
                let Some(i) = top else { break None };
                if bounds[i].2 {
                    break Some((bounds[i].0, current + bounds[i].1));
                }
                let v = eval.rho(g, &sched.with_pair(bounds[i].0)?)?;
                bounds[i].1 = v - current;
                bounds[i].2 = true;
            }
        } else {
            let cands = candidates(&sched);
            let scheds: Vec<SeedSchedule> = cands.iter().map(|&p| sched.with_pair(p)).collect::<Result<_>>()?;
            let values = eval.rho_many(g, &scheds)?;
            let mut best: Option<usize> = None;
            for (i, &v) in values.iter().enumerate() {
                if best.is_none_or(|b| beats(v, values[b])) {
                    best = Some(i);
                }
            }
            best.map(|b| (cands[b], values[b]))
        };
        let Some((pair, value)) = choice else { break };
        let gain = value - current;
        sched.add(pair)?;
        picks.push(Pick {
            pair,
            gain,
            zero_gain: gain <= REL_TOL * current.abs().max(1.0),
        });
        current = value;
    }
    Ok((sched, current))
}

/// Round-by-round greedy: for `t = 1..T`, `k` picks of the node with the
/// largest marginal gain given all seeds placed so far.
pub fn double_greedy<E: SpreadEvaluator + ?Sized>(g: &DirectedGraph, rounds: usize, k: usize, eval: &mut E) -> Result<GreedyOutcome> {
    double_greedy_with(g, rounds, k, eval, GreedyOptions::default())
}

pub fn double_greedy_with<E: SpreadEvaluator + ?Sized>(
    g: &DirectedGraph,
    rounds: usize,
    k: usize,
    eval: &mut E,
    opts: GreedyOptions,
) -> Result<GreedyOutcome> {
    check_budget(g, rounds, k)?;
    let mut sched = SeedSchedule::new(rounds, k);
    let mut picks = Vec::new();
    let mut value = 0.0;
    for t in 0..rounds {
        let cands = move |s: &SeedSchedule| {
            g.nodes()
                .map(|v| RoundNodePair::new(t, v))
                .filter(|&p| s.can_add(p))
                .collect()
        };
        (sched, value) = greedy_loop(g, sched, k, eval, cands, opts.lazy, value, &mut picks)?;
    }
    Ok(GreedyOutcome {
        schedule: sched,
        picks,
        value,
    })
}

/// Matroid greedy over node-round pairs: `T·k` picks, each the feasible
/// pair (`|S_t| < k`, `v ∉ S_t`) with the largest marginal gain.
pub fn global_greedy<E: SpreadEvaluator + ?Sized>(g: &DirectedGraph, rounds: usize, k: usize, eval: &mut E) -> Result<GreedyOutcome> {
    global_greedy_with(g, rounds, k, eval, GreedyOptions::default())
}

pub fn global_greedy_with<E: SpreadEvaluator + ?Sized>(
    g: &DirectedGraph,
    rounds: usize,
    k: usize,
    eval: &mut E,
    opts: GreedyOptions,
) -> Result<GreedyOutcome> {
    check_budget(g, rounds, k)?;
    let cands = |s: &SeedSchedule| {
        (0..rounds)
            .flat_map(|t| g.nodes().map(move |v| RoundNodePair::new(t, v)))
            .filter(|&p| s.can_add(p))
            .collect()
    };
    let mut picks = Vec::new();
    let (schedule, value) = greedy_loop(g, SeedSchedule::new(rounds, k), rounds * k, eval, cands, opts.lazy, 0.0, &mut picks)?;
    Ok(GreedyOutcome { schedule, picks, value })
}

/// Nodes of a single-round greedy outcome.
pub fn first_round(outcome: &GreedyOutcome) -> Vec<NodeId> {
    outcome.schedule.round(0).to_vec()
}
