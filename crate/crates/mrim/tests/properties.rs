use mrim::parallel::{par_estimate_objective, par_estimate_rho, par_run_adaptive, ParMonteCarloEvaluator};
use mrim::schedule::{format_schedule, parse_schedule};
use mrim::store_io::{read_store, write_sequence_store, write_store, AnyStore};
use mrim::parse_edge_list;
use mrim_core::adaptive::{run_adaptive, AdaImmPolicy};
use mrim_core::greedy::{double_greedy, MonteCarloEvaluator};
use mrim_core::mrt::estimate_rho;
use mrim_core::ris::{RRSequence, RRSequenceStore, RRStore};
use mrim_core::saic::{estimate_objective, DelayDist, Objective, SelfActivationProfile};
use mrim_core::{DirectedGraph, NodeId, SeedSchedule};
use proptest::prelude::*;

fn node_list(n: u32) -> impl Strategy<Value = Vec<NodeId>> {
    prop::collection::vec((0..n).prop_map(NodeId), 0..6)
}

fn graph_strategy() -> impl Strategy<Value = DirectedGraph> {
    (2usize..=8).prop_flat_map(|n| {
        let edge = (0..n as u32, 0..n as u32, prop::sample::select(vec![0.3, 0.6, 1.0]));
        prop::collection::vec(edge, 0..=2 * n).prop_map(move |es| {
            let edges: Vec<_> = es.into_iter().map(|(u, v, p)| (NodeId(u), NodeId(v), p)).collect();
            DirectedGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn set_store_dump_load_round_trips(samples in prop::collection::vec((0u32..9, node_list(9)), 0..20), external in 0usize..4) {
        let mut s = RRStore::new(9);
        for (root, members) in &samples {
            s.push(NodeId(*root), members);
        }
        for _ in 0..external {
            s.add_external();
        }
        let mut buf = Vec::new();
        write_store(&mut buf, &s).unwrap();
        let AnyStore::Sets(back) = read_store(&buf[..]).unwrap() else { panic!("kind") };
        prop_assert_eq!(back.samples().collect::<Vec<_>>(), s.samples().collect::<Vec<_>>());
        prop_assert_eq!(back.total(), s.total());
        prop_assert!(back.index_consistent());
    }

    #[test]
    fn sequence_store_dump_load_round_trips(rounds in 1usize..4, seqs in prop::collection::vec((0u32..7, prop::collection::vec(node_list(7), 3)), 0..12)) {
        let mut s = RRSequenceStore::new(7, rounds);
        for (root, per) in &seqs {
            s.push(&RRSequence { root: NodeId(*root), per_round: per[..rounds].to_vec() });
        }
        let mut buf = Vec::new();
        write_sequence_store(&mut buf, &s).unwrap();
        let AnyStore::Sequences(back) = read_store(&buf[..]).unwrap() else { panic!("kind") };
        prop_assert_eq!(back.len(), s.len());
        for i in 0..s.len() {
            prop_assert_eq!(back.sequence(i), s.sequence(i));
        }
        prop_assert!(back.index_consistent());
    }

    #[test]
    fn parallel_rho_equals_sequential(g in graph_strategy(), a in any::<u8>(), b in any::<u8>(), seed in any::<u64>(), samples in 1usize..900) {
        let n = g.node_count();
        let pick = |m: u8| (0..n).filter(|v| m >> v & 1 == 1).map(NodeId::from).collect::<Vec<_>>();
        let (r0, r1) = (pick(a), pick(b));
        let k = r0.len().max(r1.len());
        let sched = SeedSchedule::from_rounds(vec![r0, r1], k).unwrap();
        prop_assert_eq!(par_estimate_rho(&g, &sched, samples, seed).unwrap(), estimate_rho(&g, &sched, samples, seed).unwrap());
    }

    #[test]
    fn parallel_objective_equals_sequential(g in graph_strategy(), a in any::<u8>(), seed in any::<u64>(), q in 0.0f64..1.0) {
        let n = g.node_count();
        let seeds: Vec<NodeId> = (0..n).filter(|v| a >> v & 1 == 1).map(NodeId::from).collect();
        let profile = SelfActivationProfile::uniform(n, q, DelayDist::Exponential { rate: 1.0 }).unwrap();
        let d = DelayDist::Exponential { rate: 2.0 };
        for target in [Objective::SigmaB(seeds.clone()), Objective::Rho(seeds.clone()), Objective::RhoB(seeds)] {
            prop_assert_eq!(
                par_estimate_objective(&g, &profile, d, &target, 300, seed).unwrap(),
                estimate_objective(&g, &profile, d, &target, 300, seed).unwrap()
            );
        }
    }

    #[test]
    fn schedule_text_round_trips(rounds in prop::collection::vec(node_list(4), 0..5)) {
        let g = parse_edge_list("a b 1\nc d 0.5\n", false).unwrap();
        let mut rounds = rounds;
        for r in &mut rounds {
            r.sort_unstable();
            r.dedup();
        }
        prop_assert_eq!(parse_schedule(&format_schedule(&rounds, &g), &g).unwrap(), rounds);
    }
}

#[test]
fn parallel_greedy_matches_sequential_greedy() {
    let g = parse_edge_list("a b 0.4\nb c 0.4\na c 0.2\nc d 0.7\ne a 0.3\n", false).unwrap().graph;
    let seq = double_greedy(&g, 2, 2, &mut MonteCarloEvaluator::new(400, 5)).unwrap();
    let par = double_greedy(&g, 2, 2, &mut ParMonteCarloEvaluator(MonteCarloEvaluator::new(400, 5))).unwrap();
    assert_eq!(seq.schedule, par.schedule);
    assert_eq!(seq.value, par.value);
}

#[test]
fn parallel_adaptive_matches_sequential() {
    let g = parse_edge_list("a b 0.4\nb c 0.4\na c 0.2\nc d 0.7\ne a 0.3\nf\n", false).unwrap().graph;
    let mut policy = AdaImmPolicy::new(0.5, 1.0);
    policy.incremental = true;
    let seq = run_adaptive(&g, &mut policy.clone(), 3, 1, 16, 21).unwrap();
    let par = par_run_adaptive(&g, &policy, 3, 1, 16, 21).unwrap();
    assert_eq!(seq.estimate, par.estimate);
    assert_eq!(seq.runs, par.runs);
}
