//! Exact reference computations for tests.
//!
//! Enumeration over live-edge supports (edges with `p = 1` are folded out),
//! self-activation subsets and candidate solutions, plus definition-level
//! recomputations of the P-RR set and preemptive credit. Everything here
//! is exponential and capped; exceeding a cap is an error, never a silent
//! truncation.

use alloc::vec;
use alloc::vec::Vec;

use crate::adaptive::{observe, RoundObservation};
use crate::error::{Error, Result};
use crate::graph::{reach, DirectedGraph, LiveEdgeGraph, NodeId};
use crate::greedy::SpreadEvaluator;
use crate::mrt::SeedSchedule;
use crate::nodeset::NodeSet;
use crate::saic::{PossibleWorld, PrrResult, SelfActivationProfile};

/// Maximum number of enumerated binary coins.
pub const ENUMERATION_CAP_BITS: usize = 20;
/// Maximum number of candidates for [`exhaustive_opt`].
pub const SEARCH_CAP: u128 = 1_000_000;

/// Live-edge support: certain edges and the coins that vary.
#[derive(Debug, Clone)]
pub struct LiveSupport {
    base: Vec<bool>,
    coins: Vec<usize>,
    probs: Vec<f64>,
}

impl LiveSupport {
    pub fn new(g: &DirectedGraph) -> Self {
        let mut base = vec![false; g.edge_count()];
        let mut coins = Vec::new();
        let mut probs = Vec::new();
        for e in 0..g.edge_count() {
            let p = g.prob(e);
            if p >= 1.0 {
                base[e] = true;
            } else if p > 0.0 {
                coins.push(e);
                probs.push(p);
            }
        }
        LiveSupport { base, coins, probs }
    }

    pub fn bits(&self) -> usize {
        self.coins.len()
    }

    /// Live-edge graph for coin outcomes `mask` and its probability.
    pub fn world(&self, mask: u64) -> (LiveEdgeGraph, f64) {
        let mut live = self.base.clone();
        let mut prob = 1.0;
        for (i, (&e, &p)) in self.coins.iter().zip(&self.probs).enumerate() {
            if mask >> i & 1 == 1 {
                live[e] = true;
                prob *= p;
            } else {
                prob *= 1.0 - p;
            }
        }
        (LiveEdgeGraph { mask: live }, prob)
    }
}

fn check_cap(bits: usize) -> Result<()> {
    if bits > ENUMERATION_CAP_BITS {
        Err(Error::EnumerationCap {
            needed: bits,
            cap: ENUMERATION_CAP_BITS,
        })
    } else {
        Ok(())
    }
}

/// `σ(S) = Σ_L P(L) |reach(L, S)|`.
pub fn exact_sigma(g: &DirectedGraph, seeds: &[NodeId]) -> Result<f64> {
    exact_weighted_sigma(g, seeds, &NodeSet::new(g.node_count()))
}

/// `Σ_L P(L) |reach(L, S) \ excluded|`.
pub fn exact_weighted_sigma(g: &DirectedGraph, seeds: &[NodeId], excluded: &NodeSet) -> Result<f64> {
    for &s in seeds {
        g.check_node(s)?;
    }
    let sup = LiveSupport::new(g);
    check_cap(sup.bits())?;
    let mut total = 0.0;
    for mask in 0..1u64 << sup.bits() {
        let (mut live, p) = sup.world(mask);
        total += p * reach(g, &mut live, seeds).count_outside(excluded) as f64;
    }
    Ok(total)
}

/// Multi-round spread by joint enumeration of all `T` live-edge graphs.
pub fn exact_rho_mrt(g: &DirectedGraph, sched: &SeedSchedule) -> Result<f64> {
    sched.validate_for(g)?;
    let sup = LiveSupport::new(g);
    let t = sched.horizon();
    let s = sup.bits();
    check_cap(t * s)?;
    let mut total = 0.0;
    for joint in 0..1u64 << (t * s) {
        let mut p = 1.0;
        let mut union = NodeSet::new(g.node_count());
        for r in 0..t {
            let (mut live, pr) = sup.world(joint >> (r * s) & ((1u64 << s) - 1));
            p *= pr;
            union.extend_from(&reach(g, &mut live, sched.round(r)));
        }
        total += p * union.len() as f64;
    }
    Ok(total)
}

/// Table `P[S][v] = P(v ∈ reach(L, S))` for every subset `S` of a small
/// graph. Rounds are independent, so
/// `ρ(S_1..S_T) = Σ_v 1 - Π_t (1 - P[S_t][v])`.
#[derive(Debug, Clone)]
pub struct MrtOracle {
    n: usize,
    table: Vec<f64>,
}

/// Largest graph [`MrtOracle`] accepts.
pub const TABLE_MAX_NODES: usize = 16;

impl MrtOracle {
    pub fn new(g: &DirectedGraph) -> Result<Self> {
        let n = g.node_count();
        if n > TABLE_MAX_NODES {
            return Err(Error::EnumerationCap {
                needed: n,
                cap: TABLE_MAX_NODES,
            });
        }
        let sup = LiveSupport::new(g);
        check_cap(sup.bits())?;
        let mut table = vec![0.0; (1usize << n) * n];
        let mut reach_of = vec![0u32; 1usize << n];
        for mask in 0..1u64 << sup.bits() {
            let (live, p) = sup.world(mask);
            let closure: Vec<u32> = (0..n).map(|v| closure_bits(g, &live, NodeId::from(v))).collect();
            for s in 1..1usize << n {
                let low = s.trailing_zeros() as usize;
                reach_of[s] = reach_of[s & (s - 1)] | closure[low];
                let mut bits = reach_of[s];
                while bits != 0 {
                    let v = bits.trailing_zeros() as usize;
                    table[s * n + v] += p;
                    bits &= bits - 1;
                }
            }
        }
        Ok(MrtOracle { n, table })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn mask_of(nodes: &[NodeId]) -> usize {
        nodes.iter().fold(0, |m, v| m | 1 << v.index())
    }

    /// `P(v ∈ reach(L, S))` for `S` given as a bitmask.
    pub fn reach_probability(&self, set: usize, v: NodeId) -> f64 {
        self.table[set * self.n + v.index()]
    }

    pub fn sigma_mask(&self, set: usize) -> f64 {
        self.table[set * self.n..(set + 1) * self.n].iter().sum()
    }

    pub fn sigma(&self, nodes: &[NodeId]) -> f64 {
        self.sigma_mask(MrtOracle::mask_of(nodes))
    }

    /// Spread of per-round bitmasks.
    pub fn rho_masks(&self, rounds: &[usize]) -> f64 {
        (0..self.n)
            .map(|v| 1.0 - rounds.iter().map(|&s| 1.0 - self.table[s * self.n + v]).product::<f64>())
            .sum()
    }

    pub fn rho(&self, sched: &SeedSchedule) -> f64 {
        let masks: Vec<usize> = sched.rounds().iter().map(|r| MrtOracle::mask_of(r)).collect();
        self.rho_masks(&masks)
    }
}

impl SpreadEvaluator for MrtOracle {
    fn rho(&mut self, g: &DirectedGraph, sched: &SeedSchedule) -> Result<f64> {
        if g.node_count() != self.n {
            return Err(Error::InvalidParameter("oracle built for another graph"));
        }
        sched.validate_for(g)?;
        Ok(MrtOracle::rho(self, sched))
    }
}

fn closure_bits(g: &DirectedGraph, live: &LiveEdgeGraph, v: NodeId) -> u32 {
    let mut seen = 1u32 << v.index();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for &e in g.out_edges(u) {
            let w = g.target(e as usize);
            if live.mask[e as usize] && seen >> w.index() & 1 == 0 {
                seen |= 1 << w.index();
                stack.push(w);
            }
        }
    }
    seen
}

/// `σ^B(S) = E|reach(L, S ∪ A)|` by joint enumeration of live masks and
/// self-activation subsets (nodes with `q ∈ {0, 1}` folded out).
pub fn exact_sigma_b(g: &DirectedGraph, profile: &SelfActivationProfile, seeds: &[NodeId]) -> Result<f64> {
    profile.check_for(g)?;
    for &s in seeds {
        g.check_node(s)?;
    }
    let sup = LiveSupport::new(g);
    let certain: Vec<NodeId> = g.nodes().filter(|v| profile.q[v.index()] >= 1.0).collect();
    let coins: Vec<NodeId> = g
        .nodes()
        .filter(|v| {
            let q = profile.q[v.index()];
            q > 0.0 && q < 1.0
        })
        .collect();
    check_cap(sup.bits() + coins.len())?;
    let mut total = 0.0;
    for mask in 0..1u64 << sup.bits() {
        let (live, p_live) = sup.world(mask);
        for sa in 0..1u64 << coins.len() {
            let mut p = p_live;
            let mut sources: Vec<NodeId> = seeds.to_vec();
            sources.extend_from_slice(&certain);
            for (i, &v) in coins.iter().enumerate() {
                let q = profile.q[v.index()];
                if sa >> i & 1 == 1 {
                    p *= q;
                    sources.push(v);
                } else {
                    p *= 1.0 - q;
                }
            }
            total += p * reach(g, &mut &live, &sources).len() as f64;
        }
    }
    Ok(total)
}

/// Shortest live-path delays from `src` (starting at time `start`) by an
/// array-scan Dijkstra; `O(n²)`.
pub fn arrival_from(g: &DirectedGraph, world: &PossibleWorld, src: NodeId, start: f64) -> Vec<f64> {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[src.index()] = start;
    loop {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if !done[v] && dist[v].is_finite() && best.is_none_or(|b| dist[v] < dist[b]) {
                best = Some(v);
            }
        }
        let Some(u) = best else { break };
        done[u] = true;
        for &e in g.out_edges(NodeId::from(u)) {
            let e = e as usize;
            if world.live[e] {
                let w = g.target(e).index();
                let t = dist[u] + world.edge_delay[e];
                if t < dist[w] {
                    dist[w] = t;
                }
            }
        }
    }
    dist
}

/// `T_W(u, v)` for all pairs: `δ(u)` plus the shortest live-path delay.
pub fn total_delays(g: &DirectedGraph, world: &PossibleWorld) -> Vec<Vec<f64>> {
    g.nodes().map(|u| arrival_from(g, world, u, world.self_delay[u.index()])).collect()
}

/// P-RR set straight from its definition:
/// `{u : T_W(u, root) ≤ min_{a ∈ A_W} T_W(a, root)}`, with `u^s` the
/// smallest-id self-activated node attaining the minimum.
pub fn prr_by_definition(g: &DirectedGraph, world: &PossibleWorld, root: NodeId) -> PrrResult {
    let t = total_delays(g, world);
    let to_root: Vec<f64> = g.nodes().map(|u| t[u.index()][root.index()]).collect();
    let mut best = f64::INFINITY;
    let mut source = None;
    for u in g.nodes() {
        if world.self_active[u.index()] && to_root[u.index()] < best {
            best = to_root[u.index()];
            source = Some(u);
        }
    }
    let members = g
        .nodes()
        .filter(|u| to_root[u.index()].is_finite() && to_root[u.index()] <= best)
        .collect();
    PrrResult { root, members, source }
}

/// Preemptive credit from per-source arrival times.
pub fn credit_by_definition(g: &DirectedGraph, world: &PossibleWorld, set: &[NodeId], boosted: bool) -> NodeSet {
    let n = g.node_count();
    let inside = NodeSet::from_nodes(n, set.iter().copied());
    let t = total_delays(g, world);
    let mut credited = NodeSet::new(n);
    for v in 0..n {
        let mut own = f64::INFINITY;
        let mut rival = f64::INFINITY;
        for u in 0..n {
            let uid = NodeId::from(u);
            if inside.contains(uid) {
                if boosted || world.self_active[u] {
                    own = own.min(t[u][v]);
                }
            } else if world.self_active[u] {
                rival = rival.min(t[u][v]);
            }
        }
        if own < rival {
            credited.insert(NodeId::from(v));
        }
    }
    credited
}

/// `ρ({u})` and `ρ({v})` for a single certain edge `u → v` with every node
/// self-activated: `P(δ_u + d < δ_v) = a/(a+c) · b/(b+c)` for exponential
/// rates `a` (δ_u), `b` (d), `c` (δ_v).
pub fn two_node_preemptive(rate_u: f64, rate_edge: f64, rate_v: f64) -> (f64, f64) {
    let p = rate_u / (rate_u + rate_v) * rate_edge / (rate_edge + rate_v);
    (1.0 + p, 1.0 - p)
}

/// `Δ((S, t) | ψ) = E[|reach(L_t, S) ∪ A_ψ| - |A_ψ| | Φ ~ ψ]` over every
/// realization of `horizon` live-edge graphs consistent with `psi`.
pub fn exact_conditional_gain(
    g: &DirectedGraph,
    horizon: usize,
    psi: &[RoundObservation],
    round: usize,
    seeds: &[NodeId],
) -> Result<f64> {
    if round >= horizon || psi.iter().any(|o| o.round >= horizon) {
        return Err(Error::InvalidParameter("round beyond the horizon"));
    }
    let sup = LiveSupport::new(g);
    let s = sup.bits();
    check_cap(horizon * s)?;
    let mut weight = 0.0;
    let mut total = 0.0;
    'worlds: for joint in 0..1u64 << (horizon * s) {
        let mut p = 1.0;
        let mut worlds = Vec::with_capacity(horizon);
        for r in 0..horizon {
            let (live, pr) = sup.world(if s == 0 { 0 } else { joint >> (r * s) & ((1u64 << s) - 1) });
            p *= pr;
            worlds.push(live);
        }
        let mut before = NodeSet::new(g.node_count());
        for obs in psi {
            let seen = observe(g, &mut &worlds[obs.round], obs.round, &obs.seeds);
            if seen.reached != obs.reached || seen.live_edges != obs.live_edges {
                continue 'worlds;
            }
            for &v in &obs.reached {
                before.insert(v);
            }
        }
        let added = reach(g, &mut &worlds[round], seeds).count_outside(&before);
        weight += p;
        total += p * added as f64;
    }
    if weight == 0.0 {
        return Err(Error::InvalidParameter("partial realization has probability zero"));
    }
    Ok(total / weight)
}

/// Search spaces for [`exhaustive_opt`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchSpace {
    /// Schedules of `rounds` sets, each of size at most `budget`.
    Schedules { n: usize, rounds: usize, budget: usize },
    /// Sets of size at most `budget`.
    Sets { n: usize, budget: usize },
}

/// Which problem a reference optimum is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    MrimWithin,
    MrimCross,
    Bim,
    Bpim,
    Pim,
}

impl Problem {
    /// Within- and cross-round MRIM share the same feasible set.
    pub fn space(self, n: usize, rounds: usize, budget: usize) -> SearchSpace {
        match self {
            Problem::MrimWithin | Problem::MrimCross => SearchSpace::Schedules { n, rounds, budget },
            _ => SearchSpace::Sets { n, budget },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidate {
    Schedule(SeedSchedule),
    Set(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub value: f64,
    /// First maximizer in enumeration order.
    pub argmax: Candidate,
    pub evaluated: u128,
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn small_sets(n: usize, budget: usize) -> u128 {
    (0..=budget.min(n)).map(|j| binom(n, j)).sum()
}

pub fn search_space_size(space: SearchSpace) -> u128 {
    match space {
        SearchSpace::Sets { n, budget } => small_sets(n, budget),
        SearchSpace::Schedules { n, rounds, budget } => {
            let per = small_sets(n, budget);
            (0..rounds).try_fold(1u128, |acc, _| acc.checked_mul(per)).unwrap_or(u128::MAX)
        }
    }
}

fn subsets_up_to(n: usize, budget: usize) -> Vec<Vec<NodeId>> {
    // n is tiny here: the space cap bounds it
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        if (mask.count_ones() as usize) <= budget {
            out.push((0..n).filter(|&v| mask >> v & 1 == 1).map(NodeId::from).collect());
        }
    }
    out
}

/// Reference optimum by full enumeration, with `cap` candidates at most.
pub fn exhaustive_opt<F>(space: SearchSpace, cap: u128, mut eval: F) -> Result<Optimum>
where
    F: FnMut(&Candidate) -> Result<f64>,
{
    let size = search_space_size(space);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { candidates: size, cap });
    }
    let mut best: Option<(f64, Candidate)> = None;
    let mut consider = |c: Candidate, best: &mut Option<(f64, Candidate)>| -> Result<()> {
        let v = eval(&c)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            *best = Some((v, c));
        }
        Ok(())
    };
    match space {
        SearchSpace::Sets { n, budget } => {
            for s in subsets_up_to(n, budget) {
                consider(Candidate::Set(s), &mut best)?;
            }
        }
        SearchSpace::Schedules { n, rounds, budget } => {
            let sets = subsets_up_to(n, budget);
            let mut idx = vec![0usize; rounds];
            loop {
                let chosen = idx.iter().map(|&i| sets[i].clone()).collect();
                consider(Candidate::Schedule(SeedSchedule::from_rounds(chosen, budget)?), &mut best)?;
                // odometer increment
                let mut r = rounds;
                loop {
                    if r == 0 {
                        let (value, argmax) = best.expect("space is non-empty");
                        return Ok(Optimum {
                            value,
                            argmax,
                            evaluated: size,
                        });
                    }
                    r -= 1;
                    idx[r] += 1;
                    if idx[r] < sets.len() {
                        break;
                    }
                    idx[r] = 0;
                }
            }
        }
    }
    let (value, argmax) = best.expect("space is non-empty");
    Ok(Optimum {
        value,
        argmax,
        evaluated: size,
    })
}

/// Optimum of an additive set function: the sum of the `k` largest values.
pub fn additive_opt(per_node: &[f64], k: usize) -> f64 {
    let mut v = per_node.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.iter().take(k).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_live_edges;
    use crate::mrt::estimate_rho;
    use crate::rng::stream;
    use crate::saic::{prr_in_world, DelayDist};

    fn id(i: u32) -> NodeId {
        NodeId(i)
    }

    fn half_edge() -> DirectedGraph {
        DirectedGraph::from_edges(2, &[(id(0), id(1), 0.5)]).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let g = half_edge();
        assert_eq!(exact_sigma(&g, &[id(0)]).unwrap(), 1.5);
        assert_eq!(exact_sigma(&g, &[]).unwrap(), 0.0);
        let path = DirectedGraph::from_edges(4, &[(id(0), id(1), 1.0), (id(1), id(2), 1.0), (id(2), id(3), 1.0)]).unwrap();
        assert_eq!(exact_sigma(&path, &[id(1)]).unwrap(), 3.0);
    }

    #[test]
    fn rho_examples() {
        let g = half_edge();
        let sched = SeedSchedule::from_rounds(vec![vec![id(0)], vec![id(0)]], 1).unwrap();
        assert_eq!(exact_rho_mrt(&g, &sched).unwrap(), 1.75);
        let table = MrtOracle::new(&g).unwrap();
        assert!((table.rho(&sched) - 1.75).abs() < 1e-12);
        let one = SeedSchedule::from_rounds(vec![vec![id(0)]], 1).unwrap();
        assert_eq!(exact_rho_mrt(&g, &one).unwrap(), exact_sigma(&g, &[id(0)]).unwrap());
        let iso = DirectedGraph::from_edges(3, &[]).unwrap();
        let s = SeedSchedule::from_rounds(vec![vec![id(0)], vec![id(1), id(2)]], 2).unwrap();
        assert_eq!(exact_rho_mrt(&iso, &s).unwrap(), 3.0);
    }

    #[test]
    fn table_agrees_with_joint_enumeration() {
        let g = DirectedGraph::from_edges(
            4,
            &[(id(0), id(1), 0.3), (id(1), id(2), 0.6), (id(0), id(2), 0.2), (id(2), id(3), 1.0), (id(3), id(0), 0.4)],
        )
        .unwrap();
        let table = MrtOracle::new(&g).unwrap();
        let sched = SeedSchedule::from_rounds(vec![vec![id(1)], vec![id(0), id(3)], vec![id(2)]], 2).unwrap();
        assert!((table.rho(&sched) - exact_rho_mrt(&g, &sched).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sigma_matches_monte_carlo() {
        let g = DirectedGraph::from_edges(3, &[(id(0), id(1), 0.4), (id(1), id(2), 0.7), (id(0), id(2), 0.1)]).unwrap();
        let exact = exact_sigma(&g, &[id(0)]).unwrap();
        let s = SeedSchedule::from_rounds(vec![vec![id(0)]], 1).unwrap();
        let mc = estimate_rho(&g, &s, 200_000, 3).unwrap();
        assert!((mc.mean - exact).abs() < 4.0 * mc.stderr);
    }

    #[test]
    fn enumeration_cap_is_an_error() {
        let edges: Vec<_> = (0..21).map(|i| (id(0), id(i + 1), 0.5)).collect();
        let g = DirectedGraph::from_edges(22, &edges).unwrap();
        assert!(matches!(exact_sigma(&g, &[id(0)]), Err(Error::EnumerationCap { needed: 21, .. })));
    }

    #[test]
    fn sigma_b_examples() {
        let g = half_edge();
        let exp = DelayDist::Exponential { rate: 1.0 };
        let zero = SelfActivationProfile::uniform(2, 0.0, exp).unwrap();
        let one = SelfActivationProfile::uniform(2, 1.0, exp).unwrap();
        assert_eq!(exact_sigma_b(&g, &zero, &[id(0)]).unwrap(), 1.5);
        assert_eq!(exact_sigma_b(&g, &one, &[]).unwrap(), 2.0);
        let single = DirectedGraph::from_edges(1, &[]).unwrap();
        let half = SelfActivationProfile::uniform(1, 0.5, exp).unwrap();
        assert_eq!(exact_sigma_b(&single, &half, &[]).unwrap(), 0.5);
    }

    #[test]
    fn star_optimum_is_four() {
        let g = DirectedGraph::from_edges(4, &[(id(0), id(1), 1.0), (id(0), id(2), 1.0)]).unwrap();
        let table = MrtOracle::new(&g).unwrap();
        let opt = exhaustive_opt(Problem::MrimWithin.space(4, 2, 1), SEARCH_CAP, |c| match c {
            Candidate::Schedule(s) => Ok(table.rho(s)),
            Candidate::Set(_) => unreachable!(),
        })
        .unwrap();
        assert_eq!(opt.value, 4.0);
        assert_eq!(opt.evaluated, 25);
        let all = exhaustive_opt(SearchSpace::Sets { n: 4, budget: 4 }, SEARCH_CAP, |c| match c {
            Candidate::Set(s) => Ok(table.sigma(s)),
            Candidate::Schedule(_) => unreachable!(),
        })
        .unwrap();
        assert_eq!(all.value, 4.0);
    }

    #[test]
    fn search_space_cap() {
        let space = SearchSpace::Schedules { n: 30, rounds: 3, budget: 2 };
        assert!(matches!(exhaustive_opt(space, SEARCH_CAP, |_| Ok(0.0)), Err(Error::SearchSpaceTooLarge { .. })));
    }

    #[test]
    fn additive_optimum_is_top_sum() {
        assert_eq!(additive_opt(&[0.5, 2.0, 1.0], 2), 3.0);
    }

    #[test]
    fn closed_form_rates_one() {
        assert_eq!(two_node_preemptive(1.0, 1.0, 1.0), (1.25, 0.75));
    }

    #[test]
    fn definition_matches_search_on_random_worlds() {
        let g = DirectedGraph::from_edges(
            5,
            &[(id(0), id(1), 0.8), (id(1), id(2), 0.8), (id(3), id(2), 0.8), (id(2), id(4), 0.8), (id(4), id(0), 0.8)],
        )
        .unwrap();
        let profile = SelfActivationProfile::uniform(5, 0.4, DelayDist::Exponential { rate: 1.0 }).unwrap();
        let mut rng = stream(12, 0);
        for _ in 0..200 {
            let w = crate::saic::sample_world(&g, &profile, DelayDist::Exponential { rate: 2.0 }, &mut rng);
            for root in g.nodes() {
                let a = prr_in_world(&g, &w, root, None);
                let b = prr_by_definition(&g, &w, root);
                assert_eq!(a.source, b.source);
                assert_eq!(NodeSet::from_nodes(5, a.members), NodeSet::from_nodes(5, b.members));
            }
            for set in [&[id(0)][..], &[id(2), id(3)]] {
                for boosted in [false, true] {
                    assert_eq!(
                        crate::saic::preemptive_credit(&g, &w, set, boosted),
                        credit_by_definition(&g, &w, set, boosted)
                    );
                }
            }
        }
    }

    #[test]
    fn conditional_gain_without_history_is_sigma() {
        let g = half_edge();
        assert_eq!(exact_conditional_gain(&g, 2, &[], 1, &[id(0)]).unwrap(), 1.5);
        // after seeing a reach b in round 0, nothing is left to gain from a
        let mut live = sample_live_edges(&g, &mut stream(0, 0));
        live.mask[0] = true;
        let obs = observe(&g, &mut live, 0, &[id(0)]);
        assert_eq!(exact_conditional_gain(&g, 2, &[obs], 1, &[id(0)]).unwrap(), 0.0);
    }
}
