//! Multi-round triggering (MRT) model.
//!
//! `T` rounds of independent IC propagation; a schedule seeds up to `k`
//! nodes per round and its spread counts the union of nodes activated in
//! any round. Rounds are indexed from 0 in the API.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{reach, DirectedGraph, LazyLiveEdges, NodeId};
use crate::nodeset::NodeSet;
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoundNodePair {
    pub round: usize,
    pub node: NodeId,
}

impl RoundNodePair {
    pub fn new(round: usize, node: NodeId) -> Self {
        RoundNodePair { round, node }
    }
}

/// Per-round seed sets `S_1..S_T`, each of size at most `budget`.
/// A node may be seeded in several rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSchedule {
    rounds: Vec<Vec<NodeId>>,
    budget: usize,
}

impl SeedSchedule {
    pub fn new(horizon: usize, budget: usize) -> Self {
        SeedSchedule {
            rounds: vec![Vec::new(); horizon],
            budget,
        }
    }

    /// Duplicates inside a round are dropped.
    pub fn from_rounds(rounds: Vec<Vec<NodeId>>, budget: usize) -> Result<Self> {
        let mut s = SeedSchedule::new(rounds.len(), budget);
        for (t, nodes) in rounds.into_iter().enumerate() {
            for v in nodes {
                s.add(RoundNodePair::new(t, v))?;
            }
        }
        Ok(s)
    }

    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn round(&self, t: usize) -> &[NodeId] {
        &self.rounds[t]
    }

    pub fn rounds(&self) -> &[Vec<NodeId>] {
        &self.rounds
    }

    pub fn contains(&self, pair: RoundNodePair) -> bool {
        self.rounds
            .get(pair.round)
            .is_some_and(|r| r.contains(&pair.node))
    }

    /// Whether `pair` could be added without breaking the per-round budget.
    pub fn can_add(&self, pair: RoundNodePair) -> bool {
        pair.round < self.rounds.len()
            && self.rounds[pair.round].len() < self.budget
            && !self.rounds[pair.round].contains(&pair.node)
    }

    /// Returns `Ok(false)` when the pair is already present.
    pub fn add(&mut self, pair: RoundNodePair) -> Result<bool> {
        let round = self
            .rounds
            .get_mut(pair.round)
            .ok_or(Error::InfeasibleSchedule("round beyond horizon"))?;
        if round.contains(&pair.node) {
            return Ok(false);
        }
        if round.len() >= self.budget {
            return Err(Error::InfeasibleSchedule("round budget exhausted"));
        }
        round.push(pair.node);
        Ok(true)
    }

    pub fn with_pair(&self, pair: RoundNodePair) -> Result<Self> {
        let mut s = self.clone();
        s.add(pair)?;
        Ok(s)
    }

    pub fn pairs(&self) -> impl Iterator<Item = RoundNodePair> + '_ {
        self.rounds
            .iter()
            .enumerate()
            .flat_map(|(t, r)| r.iter().map(move |&v| RoundNodePair::new(t, v)))
    }

    pub fn pair_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pair_count() == 0
    }

    /// Same seed sets with rounds reordered; `order[i]` is the old index of new round `i`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        SeedSchedule {
            rounds: order.iter().map(|&i| self.rounds[i].clone()).collect(),
            budget: self.budget,
        }
    }

    pub fn validate_for(&self, g: &DirectedGraph) -> Result<()> {
        for v in self.rounds.iter().flatten() {
            g.check_node(*v)?;
        }
        Ok(())
    }
}

/// Mean, standard error and sample count of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl SpreadEstimate {
    pub fn exact(value: f64) -> Self {
        SpreadEstimate {
            mean: value,
            stderr: 0.0,
            samples: 0,
        }
    }
}

/// Integer moments of a count-valued sample; merging is exact, so the
/// reduction order across workers does not change the result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountAccumulator {
    pub count: u64,
    pub sum: u64,
    pub sum_sq: u128,
}

impl CountAccumulator {
    #[inline]
    pub fn push(&mut self, x: u64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += (x as u128) * (x as u128);
    }

    pub fn merge(mut self, other: CountAccumulator) -> Self {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    /// Sample mean and `s / sqrt(R)` with the unbiased sample variance.
    pub fn estimate(&self) -> SpreadEstimate {
        if self.count == 0 {
            return SpreadEstimate {
                mean: 0.0,
                stderr: 0.0,
                samples: 0,
            };
        }
        let r = self.count as f64;
        let mean = self.sum as f64 / r;
        let stderr = if self.count > 1 {
            // exact integer numerator of the variance: R*Σx² - (Σx)²
            let num = self.count as u128 * self.sum_sq - (self.sum as u128) * (self.sum as u128);
            let var = num as f64 / (r * (r - 1.0));
            libm::sqrt(var / r)
        } else {
            0.0
        };
        SpreadEstimate {
            mean,
            stderr,
            samples: self.count as usize,
        }
    }
}

/// One multi-round cascade: `⋃_t reach(L_t, S_t)` with fresh live-edge
/// graphs per round (coins flipped on first touch).
pub fn simulate_schedule<R: Rng + ?Sized>(g: &DirectedGraph, sched: &SeedSchedule, rng: &mut R) -> NodeSet {
    let mut active = NodeSet::new(g.node_count());
    for t in 0..sched.horizon() {
        if sched.round(t).is_empty() {
            continue;
        }
        let mut live = LazyLiveEdges::new(g, rng);
        let reached = reach(g, &mut live, sched.round(t));
        active.extend_from(&reached);
    }
    active
}

/// Monte Carlo estimate of the multi-round spread. Sample `i` draws from
/// substream `i` of `seed`.
pub fn estimate_rho(g: &DirectedGraph, sched: &SeedSchedule, samples: usize, seed: u64) -> Result<SpreadEstimate> {
    Ok(rho_accumulate(g, sched, 0..samples as u64, seed)?.estimate())
}

/// Accumulates the samples with the given indices; lets callers split the
/// index range across workers.
pub fn rho_accumulate<I: IntoIterator<Item = u64>>(
    g: &DirectedGraph,
    sched: &SeedSchedule,
    indices: I,
    seed: u64,
) -> Result<CountAccumulator> {
    sched.validate_for(g)?;
    let mut acc = CountAccumulator::default();
    for i in indices {
        let mut rng = stream(seed, i);
        acc.push(simulate_schedule(g, sched, &mut rng).len() as u64);
    }
    Ok(acc)
}

/// Which round factor the simulation count uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundFactor {
    /// `31 k² n`.
    #[default]
    Statement,
    /// `31 k² T² n`, the more conservative per-round union bound.
    TSquared,
}

/// `R = ⌈31 k² n ln(2 k n^(ℓ+1) T) / ε²⌉` (natural log).
pub fn simulation_count(k: usize, n: usize, ell: f64, rounds: usize, epsilon: f64, factor: RoundFactor) -> Result<u64> {
    if k == 0 || n == 0 || rounds == 0 || !(ell > 0.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("simulation count inputs must be positive"));
    }
    let (k, n, t) = (k as f64, n as f64, rounds as f64);
    let log_term = libm::log(2.0 * k * t) + (ell + 1.0) * libm::log(n);
    let round_factor = match factor {
        RoundFactor::Statement => 1.0,
        RoundFactor::TSquared => t * t,
    };
    Ok(libm::ceil(31.0 * k * k * round_factor * n * log_term / (epsilon * epsilon)) as u64)
}
