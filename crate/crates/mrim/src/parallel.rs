//! Rayon-backed estimators. Every sample draws from its own substream and
//! the accumulators hold integer sums, so results match the sequential
//! versions exactly for any thread count.

use std::ops::Range;

use mrim_core::adaptive::{run_trial, AdaptiveSummary, Policy};
use mrim_core::greedy::{MonteCarloEvaluator, SpreadEvaluator};
use mrim_core::mrt::{rho_accumulate, CountAccumulator};
use mrim_core::saic::{objective_accumulate, DelayDist, Objective, SelfActivationProfile};
use mrim_core::{DirectedGraph, Error, SeedSchedule, SpreadEstimate};
use rayon::prelude::*;

const CHUNK: u64 = 256;

fn chunks(samples: usize) -> Vec<Range<u64>> {
    let total = samples as u64;
    (0..total.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(total))
        .collect()
}

fn merge_all(parts: Vec<mrim_core::Result<CountAccumulator>>) -> mrim_core::Result<CountAccumulator> {
    parts
        .into_iter()
        .try_fold(CountAccumulator::default(), |acc, p| Ok(acc.merge(p?)))
}

pub fn par_estimate_rho(g: &DirectedGraph, sched: &SeedSchedule, samples: usize, seed: u64) -> mrim_core::Result<SpreadEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive"));
    }
    sched.validate_for(g)?;
    let parts = chunks(samples)
        .into_par_iter()
        .map(|r| rho_accumulate(g, sched, r, seed))
        .collect();
    Ok(merge_all(parts)?.estimate())
}

pub fn par_estimate_objective(
    g: &DirectedGraph,
    profile: &SelfActivationProfile,
    edge_delay: DelayDist,
    target: &Objective,
    samples: usize,
    seed: u64,
) -> mrim_core::Result<SpreadEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive"));
    }
    let parts = chunks(samples)
        .into_par_iter()
        .map(|r| objective_accumulate(g, profile, edge_delay, target, r, seed))
        .collect();
    Ok(merge_all(parts)?.estimate())
}

/// Same seeds and values as [`MonteCarloEvaluator`]; candidates of one
/// greedy step are evaluated concurrently.
#[derive(Debug, Clone)]
pub struct ParMonteCarloEvaluator(pub MonteCarloEvaluator);

impl SpreadEvaluator for ParMonteCarloEvaluator {
    fn rho(&mut self, g: &DirectedGraph, sched: &SeedSchedule) -> mrim_core::Result<f64> {
        let seed = self.0.next_seed();
        Ok(par_estimate_rho(g, sched, self.0.samples, seed)?.mean)
    }

    fn rho_many(&mut self, g: &DirectedGraph, scheds: &[SeedSchedule]) -> mrim_core::Result<Vec<f64>> {
        let seeds: Vec<u64> = scheds.iter().map(|_| self.0.next_seed()).collect();
        let samples = self.0.samples;
        scheds
            .par_iter()
            .zip(seeds)
            .map(|(s, seed)| Ok(par_estimate_rho(g, s, samples, seed)?.mean))
            .collect()
    }
}

/// Trials run concurrently, each with a fresh clone of `policy`.
pub fn par_run_adaptive<P: Policy + Clone + Send + Sync>(
    g: &DirectedGraph,
    policy: &P,
    horizon: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> mrim_core::Result<AdaptiveSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive"));
    }
    let runs = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(g, &mut policy.clone(), horizon, k, i, seed))
        .collect::<mrim_core::Result<Vec<_>>>()?;
    let mut acc = CountAccumulator::default();
    for r in &runs {
        acc.push(r.total_active as u64);
    }
    Ok(AdaptiveSummary {
        estimate: acc.estimate(),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mrim_core::mrt::estimate_rho;
    use mrim_core::NodeId;

    #[test]
    fn chunking_covers_range() {
        let c = chunks(600);
        assert_eq!(c.first().unwrap().start, 0);
        assert_eq!(c.last().unwrap().end, 600);
        assert_eq!(c.iter().map(|r| r.end - r.start).sum::<u64>(), 600);
    }

    #[test]
    fn matches_sequential() {
        let g = DirectedGraph::from_edges(3, &[(NodeId(0), NodeId(1), 0.5), (NodeId(1), NodeId(2), 0.5)]).unwrap();
        let s = SeedSchedule::from_rounds(vec![vec![NodeId(0)], vec![NodeId(1)]], 1).unwrap();
        assert_eq!(par_estimate_rho(&g, &s, 1000, 3).unwrap(), estimate_rho(&g, &s, 1000, 3).unwrap());
    }
}
