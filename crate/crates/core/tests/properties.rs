//! Property tests with a fixed proptest seed, so failures replay.
//!
//! The triangle inequality is deliberately absent: it does not hold for
//! every input (see the acceptance suite, which measures it).

use ned_core::experiments::{erdos_renyi, random_tree};
use ned_core::oracle::{ahu_canonical, exact_ged_on_trees, exact_ted_star, exact_unordered_ted};
use ned_core::{
    min_cost_perfect_matching, ned, parse_tree_literal, ted_star, ted_star_distance_only, ted_star_unit, CostMatrix,
    Distance, Graph, LevelTree, NodeId, NodeRef, WeightScheme,
};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x6e6564),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn tree(max_nodes: usize) -> impl Strategy<Value = LevelTree> {
    (1..=max_nodes, 0usize..6, 1usize..6, any::<u64>()).prop_map(|(n, d, f, s)| random_tree(n, d, f, s))
}

fn scheme() -> impl Strategy<Value = WeightScheme> {
    prop_oneof![
        Just(WeightScheme::Unit),
        Just(WeightScheme::WPlus),
        prop::collection::vec(((1i64..9, 1i64..5), (1i64..9, 1i64..5)), 1..7).prop_map(|v| {
            WeightScheme::custom(v.into_iter().map(|((a, b), (c, d))| (Distance::new(a, b), Distance::new(c, d))).collect())
                .unwrap()
        }),
    ]
}

/// Same tree, siblings emitted in reverse stored order.
fn mirrored(t: &LevelTree) -> LevelTree {
    fn emit(t: &LevelTree, d: usize, j: usize, out: &mut String) {
        out.push('(');
        if d + 1 < t.level_count() {
            for c in t.children(d, j).rev() {
                emit(t, d + 1, c, out);
            }
        }
        out.push(')');
    }
    let mut s = String::new();
    emit(t, 0, 0, &mut s);
    parse_tree_literal(&s).unwrap()
}

fn level_gap(a: &LevelTree, b: &LevelTree) -> u64 {
    let n = a.level_count().max(b.level_count());
    let size = |t: &LevelTree, d: usize| if d < t.level_count() { t.level_size(d) } else { 0 };
    (0..n).map(|d| size(a, d).abs_diff(size(b, d)) as u64).sum()
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn nonnegative_and_symmetric(a in tree(40), b in tree(40), w in scheme()) {
        let ab = ted_star_distance_only(&a, &b, &w).unwrap();
        let ba = ted_star_distance_only(&b, &a, &w).unwrap();
        prop_assert!(ab >= Distance::zero());
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn zero_exactly_on_isomorphic_trees(a in tree(25), b in tree(25), w in scheme()) {
        let d = ted_star_distance_only(&a, &b, &w).unwrap();
        prop_assert_eq!(d.is_zero(), ahu_canonical(&a) == ahu_canonical(&b));
        prop_assert!(ted_star_distance_only(&a, &mirrored(&a), &w).unwrap().is_zero());
    }

    #[test]
    fn isomorphic_inputs_give_equal_distances(a in tree(30), b in tree(30), w in scheme()) {
        let d = ted_star_distance_only(&a, &b, &w).unwrap();
        prop_assert_eq!(ted_star_distance_only(&mirrored(&a), &b, &w).unwrap(), d);
        prop_assert_eq!(ted_star_distance_only(&a, &b.canonical_order(), &w).unwrap(), d);
    }

    #[test]
    fn breakdown_is_consistent(a in tree(40), b in tree(40)) {
        let r = ted_star(&a, &b, &WeightScheme::Unit).unwrap();
        let b_ = &r.breakdown;
        prop_assert_eq!(b_.recomposed_unit_total(), b_.unit_total);
        prop_assert_eq!(r.distance, Distance::from_integer(b_.unit_total as i64));
        let padding: u64 = b_.levels.iter().map(|l| l.padding).sum();
        prop_assert_eq!(padding, level_gap(&a, &b));
        prop_assert!(b_.unit_total >= level_gap(&a, &b));
    }

    #[test]
    fn upper_bounds_the_exact_search(a in tree(7), b in tree(7)) {
        let star = ted_star_unit(&a, &b).unwrap();
        let budget = (a.node_count() + b.node_count()) as u32;
        let exact = exact_ted_star(&a, &b, budget).unwrap().exact().unwrap() as u64;
        prop_assert!(exact <= star);
        prop_assert!(exact >= level_gap(&a, &b));
    }

    #[test]
    fn oracle_bounds(a in tree(7), b in tree(7)) {
        let star = ted_star_unit(&a, &b).unwrap();
        let ged = exact_ged_on_trees(&a, &b).unwrap() as u64;
        let ted = exact_unordered_ted(&a, &b).unwrap() as i64;
        let wplus = ted_star_distance_only(&a, &b, &WeightScheme::WPlus).unwrap();
        prop_assert!(ged <= 2 * star);
        prop_assert!(Distance::from_integer(ted) <= wplus);
        prop_assert!(ted as u64 <= star * 4 * a.level_count().max(b.level_count()) as u64);
    }

    #[test]
    fn assignment_matches_brute_force(n in 1usize..6, cells in prop::collection::vec(0i64..10, 36)) {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| cells[i * 6..i * 6 + n].to_vec()).collect();
        let m = CostMatrix::from_rows(rows.clone()).unwrap();
        let got = min_cost_perfect_matching(&m);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = i64::MAX;
        permute(&mut perm, 0, &mut |p| best = best.min(p.iter().enumerate().map(|(r, &c)| rows[r][c]).sum()));
        prop_assert_eq!(got.cost, best);
        let realized: i64 = got.row_to_col.iter().enumerate().map(|(r, &c)| rows[r][c]).sum();
        prop_assert_eq!(realized, best);
    }
}

fn permute(p: &mut Vec<usize>, at: usize, f: &mut impl FnMut(&[usize])) {
    if at == p.len() {
        f(p);
        return;
    }
    for i in at..p.len() {
        p.swap(at, i);
        permute(p, at + 1, f);
        p.swap(at, i);
    }
}

fn relabeled(g: &Graph, perm: &[u32]) -> Graph {
    Graph::with_numeric_labels(g.node_count(), g.edges().map(|(a, b)| (perm[a as usize], perm[b as usize])), false)
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn ned_is_monotone_in_k(seed in any::<u64>(), n in 5usize..60, u in 0u32..60, v in 0u32..60) {
        let g = erdos_renyi(n, 2 * n, seed);
        let h = erdos_renyi(n, 3 * n / 2, seed ^ 1);
        let (u, v) = (NodeId(u % n as u32), NodeId(v % n as u32));
        let mut last = Distance::zero();
        for k in 1..=6 {
            let d = ned(NodeRef::new(&g, u), NodeRef::new(&h, v), k, &WeightScheme::Unit).unwrap();
            prop_assert!(d >= last, "k = {}: {} < {}", k, d, last);
            last = d;
        }
    }

    #[test]
    fn ned_ignores_node_numbering(seed in any::<u64>(), n in 3usize..50, shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let g = erdos_renyi(n, 2 * n, seed);
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle));
        let h = relabeled(&g, &perm);
        for v in 0..n as u32 {
            let d = ned(NodeRef::new(&g, NodeId(v)), NodeRef::new(&h, NodeId(perm[v as usize])), 4, &WeightScheme::Unit).unwrap();
            prop_assert!(d.is_zero(), "node {}: {}", v, d);
        }
    }
}
