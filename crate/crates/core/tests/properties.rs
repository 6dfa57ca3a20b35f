mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tpack::absorb::count_connectors;
use tpack::complex::build_complex;
use tpack::constructions::{random_digraph, random_digraph_cond_4_1, random_digraph_disjunctive, satisfies_cond_4_1};
use tpack::containment::{alpha_contains_ex, ex_deficit, ContainmentMode};
use tpack::matching::{
    d_matching_covering, is_matching, matching_or_certificate, maximum_matching, validate_certificate, UGraph,
};
use tpack::solver::{find_max_packing, find_perfect_packing, verify_packing, DEFAULT_BUDGET};
use tpack::t3::{is_locally_minimal_4_1, minimize_edges_4_1, t3_pack};
use tpack::turan::count_copies;
use tpack::{Digraph, Pattern, Tournament, Verdict, VertexSet};

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n, 0.0..1.0f64, any::<u64>()).prop_map(|(n, p, seed)| random_digraph(n, p, seed).unwrap())
}

fn tournament3() -> impl Strategy<Value = Pattern> {
    prop_oneof![
        Just(Tournament::transitive(3).unwrap().into_pattern()),
        Just(Tournament::cyclic_triangle().into_pattern()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn edge_list_round_trips(g in digraph(20)) {
        let back = Digraph::parse_edge_list(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn degree_sums_match_arc_count(g in digraph(30)) {
        let outs: usize = g.vertices().iter().map(|v| g.out_degree(v)).sum();
        let ins: usize = g.vertices().iter().map(|v| g.in_degree(v)).sum();
        prop_assert_eq!(outs, g.arc_count());
        prop_assert_eq!(ins, g.arc_count());
        prop_assert_eq!(g.reversed().reversed(), g);
    }

    #[test]
    fn vertex_set_algebra(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (VertexSet(a), VertexSet(b));
        prop_assert_eq!(x.union(y).len() + x.intersection(y).len(), x.len() + y.len());
        prop_assert!(x.difference(y).is_disjoint(y));
        prop_assert!(x.intersection(y).is_subset(x));
        prop_assert_eq!(x.iter().collect::<VertexSet>(), x);
    }

    #[test]
    fn max_packing_matches_brute_force(g in digraph(7), t in tournament3()) {
        let out = find_max_packing(&g, &t, DEFAULT_BUDGET).unwrap();
        prop_assert!(out.exact);
        prop_assert_eq!(out.packing.len(), common::brute_max_packing(&g, &t));
        prop_assert!(verify_packing(&g, &[t], &out.packing, false));
    }

    #[test]
    fn verdict_survives_relabelling(g in digraph(9), t in tournament3(), seed in any::<u64>()) {
        prop_assume!(g.order() % 3 == 0);
        let mut perm: Vec<usize> = (0..g.order()).collect();
        rand::seq::SliceRandom::shuffle(&mut perm[..], &mut ChaCha8Rng::seed_from_u64(seed));
        let a = find_perfect_packing(&g, &t, DEFAULT_BUDGET).unwrap();
        let b = find_perfect_packing(&g.permuted(&perm).unwrap(), &t, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        if let Some(p) = &a.packing {
            prop_assert!(verify_packing(&g, &[t], p, true));
        }
    }

    #[test]
    fn copy_counts_match_naive(g in digraph(7), t in tournament3()) {
        prop_assert_eq!(count_copies(&g, &t), common::naive_count(&g, &t));
    }

    #[test]
    fn complexes_are_downward_closed(g in digraph(9), t in tournament3()) {
        let j = build_complex(&g, &t);
        prop_assert!(j.is_downward_closed());
        prop_assert_eq!(j.layers[1].len(), g.order());
    }

    #[test]
    fn connectors_are_symmetric(g in digraph(9), t in tournament3()) {
        prop_assume!(g.order() >= 4);
        let a = count_connectors(&g, &t, 0, 1, u64::MAX).unwrap().count;
        let b = count_connectors(&g, &t, 1, 0, u64::MAX).unwrap().count;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn t3_pack_output_is_valid(m in 1..=4usize, seed in any::<u64>()) {
        let g = random_digraph_cond_4_1(3 * m, seed).unwrap();
        prop_assert!(satisfies_cond_4_1(&g));
        let h = minimize_edges_4_1(&g).unwrap();
        prop_assert!(satisfies_cond_4_1(&h) && is_locally_minimal_4_1(&h));
        let t3 = Tournament::transitive(3).unwrap().into_pattern();
        let out = t3_pack(&g).unwrap();
        prop_assert!(verify_packing(&g, &[t3], &out.packing, true));
    }

    #[test]
    fn disjunctive_generator_meets_threshold(n in 2..=20usize, seed in any::<u64>()) {
        let t = (2 * n) / 3;
        let g = random_digraph_disjunctive(n, t, seed).unwrap();
        prop_assert!(g.vertices().iter().all(|v| g.out_degree(v) >= t || g.in_degree(v) >= t));
    }

    #[test]
    fn heuristic_witness_is_honest(g in digraph(15), seed in any::<u64>()) {
        prop_assume!(g.order() >= 3);
        let out = alpha_contains_ex(&g, 0.1, ContainmentMode::heuristic(seed)).unwrap();
        prop_assert_eq!(out.deficit, ex_deficit(&g, &out.classes));
        prop_assert_eq!(out.contains, out.deficit as f64 <= 0.1 * (g.order() * g.order()) as f64);
    }

    #[test]
    fn blossom_matches_brute_force_size(seed in any::<u64>(), n in 1..=9usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_ugraph_min_degree(n, 0, &mut rng);
        let mate = maximum_matching(&g);
        let size = mate.iter().flatten().count() / 2;
        let brute = (0..=n / 2).rev().find(|&d| common::brute_covering_matching_exists(&g, d, VertexSet::EMPTY)).unwrap();
        prop_assert_eq!(size, brute);
    }

    #[test]
    fn covering_matchings(seed in any::<u64>(), n in 2..=14usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 + (seed as usize) % (n / 2);
        let g = common::random_ugraph_min_degree(n, d, &mut rng);
        let x = common::random_subset(n, d, &mut rng);
        let m = d_matching_covering(&g, d, x).unwrap();
        prop_assert_eq!(m.edges.len(), d);
        prop_assert!(is_matching(&g, &m.edges));
        let covered = m.edges.iter().fold(VertexSet::EMPTY, |acc, &(u, v)| acc.with(u).with(v));
        prop_assert!(x.is_subset(covered));
    }

    #[test]
    fn certificates_validate(seed in any::<u64>(), half in 2..=9usize, gamma in 0.0..0.3f64) {
        let n = 2 * half;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let need = ((0.5 - gamma) * n as f64).ceil() as usize;
        let g = common::random_ugraph_min_degree(n, need, &mut rng);
        let cert = matching_or_certificate(&g, gamma).unwrap();
        prop_assert!(validate_certificate(&g, &cert));
    }
}

#[test]
fn empty_graph_has_no_certificate_precondition() {
    let g = UGraph::new(4).unwrap();
    assert!(matching_or_certificate(&g, 0.1).is_err());
}

#[test]
fn complete_digraph_always_packs() {
    for n in [3, 6, 9, 12] {
        let g = Digraph::complete(n).unwrap();
        for t in tpack::pattern::all_tournaments(3).unwrap() {
            let out = find_perfect_packing(&g, t.pattern(), DEFAULT_BUDGET).unwrap();
            assert_eq!(out.verdict, Verdict::Found);
        }
    }
}
