// Property tests for the module invariants. Each uses a fixed proptest
// configuration so runs are reproducible.

use std::collections::BTreeSet;

use proptest::prelude::*;
use tvl::classes::{classify_colours, ClassifierConfig};
use tvl::constructions::{group_table, random_latin_square, FiniteAbelianGroup};
use tvl::expander::{extract_expander, SimpleGraph, Step};
use tvl::graph::{
    graph_to_latin, latin_to_graph, validate, ColouredBipartiteGraph, Edge, RainbowMatching, Vertex,
};
use tvl::pseudorandom::{build_hypergraph, check_typical};
use tvl::solvers::{
    greedy_nibble_matching, local_switch_augment, max_rainbow_matching_exact, DEFAULT_BUDGET,
};
use tvl::steiner::{bose_sts, matching_from_rainbow, tripartition_reduce, TripleSystem};
use tvl::switchers::{apply_switcher, enumerate_switchers4, rainbow_cycles, weight_matrix};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// A properly coloured bipartite graph on at most 6 + 6 vertices.
fn small_graph() -> impl Strategy<Value = ColouredBipartiteGraph> {
    (
        1usize..=6,
        1usize..=6,
        1usize..=7,
        proptest::collection::vec((0usize..6, 0usize..6, 0usize..7), 0..30),
    )
        .prop_map(|(a, b, k, raw)| {
            let mut edges: Vec<Edge> = Vec::new();
            for (x, y, c) in raw {
                let e = Edge::new(x % a, y % b, c % k);
                let clash = edges.iter().any(|f| {
                    (f.a == e.a && f.b == e.b)
                        || (f.colour == e.colour && (f.a == e.a || f.b == e.b))
                });
                if !clash {
                    edges.push(e);
                }
            }
            ColouredBipartiteGraph::new(a, b, edges).expect("built proper")
        })
}

// every choice of at most one edge per A vertex
fn naive_max_rainbow(g: &ColouredBipartiteGraph) -> usize {
    fn rec(
        g: &ColouredBipartiteGraph,
        a: usize,
        bs: &mut BTreeSet<usize>,
        cs: &mut BTreeSet<usize>,
    ) -> usize {
        if a == g.a_size() {
            return 0;
        }
        let mut best = rec(g, a + 1, bs, cs);
        for &(c, b) in g.neighbours_a(a) {
            if !bs.contains(&b) && !cs.contains(&c) {
                bs.insert(b);
                cs.insert(c);
                best = best.max(1 + rec(g, a + 1, bs, cs));
                bs.remove(&b);
                cs.remove(&c);
            }
        }
        best
    }
    rec(g, 0, &mut BTreeSet::new(), &mut BTreeSet::new())
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn random_squares_roundtrip(n in 1usize..=8, seed in any::<u64>()) {
        let sq = random_latin_square(n, seed, 20 * n * n);
        prop_assert!(sq.is_latin_square());
        let g = latin_to_graph(&sq);
        prop_assert!(validate(g.a_size(), g.b_size(), g.edges()).proper);
        prop_assert!(g.is_complete());
        prop_assert_eq!(graph_to_latin(&g).unwrap(), sq);
    }

    #[test]
    fn exact_solver_matches_naive(g in small_graph()) {
        let r = max_rainbow_matching_exact(&g, DEFAULT_BUDGET);
        prop_assert!(r.optimal);
        prop_assert_eq!(r.size, naive_max_rainbow(&g));
        prop_assert!(r.witness.check_in(&g).is_ok());
    }

    #[test]
    fn augment_never_shrinks(n in 3usize..=14, seed in any::<u64>()) {
        let g = latin_to_graph(&random_latin_square(n, seed, 20 * n * n));
        let m = greedy_nibble_matching(&g, 0.2, seed);
        let m2 = local_switch_augment(&g, &m, 200, seed).unwrap();
        prop_assert!(m2.len() >= m.len());
        prop_assert!(m2.check_in(&g).is_ok());
        prop_assert_eq!(greedy_nibble_matching(&g, 0.2, seed), m);
    }

    #[test]
    fn switchers_swap_one_colour(n in 3usize..=7, seed in any::<u64>(), c in 0usize..7, d in 0usize..7) {
        let (c, d) = (c % n, d % n);
        let g = latin_to_graph(&random_latin_square(n, seed, 20 * n * n));
        for s in enumerate_switchers4(&g, c, d) {
            prop_assert!(s.validate(&g).is_ok());
            let m = RainbowMatching::new(&g, s.m1.clone()).unwrap();
            let out = apply_switcher(&m, &s).unwrap();
            prop_assert_eq!(out.len(), m.len());
            prop_assert_eq!(out.vertices(), m.vertices());
            let mut expect = m.colours();
            expect.remove(&c);
            expect.insert(d);
            prop_assert_eq!(out.colours(), expect);
        }
    }

    #[test]
    fn hypergraph_degrees(n in 1usize..=9, seed in any::<u64>()) {
        let g = latin_to_graph(&random_latin_square(n, seed, 20 * n * n));
        let h = build_hypergraph(&g);
        let [da, db, dc] = h.degrees();
        for a in 0..n {
            prop_assert_eq!(da[a], g.degree(Vertex::A(a)));
        }
        for b in 0..n {
            prop_assert_eq!(db[b], g.degree(Vertex::B(b)));
        }
        for (c, &deg) in dc.iter().enumerate() {
            prop_assert_eq!(deg, g.colour_class_size(c));
        }
        prop_assert!(check_typical(&h, n, 1.0, 1.0).typical);
    }

    #[test]
    fn zero_weight_pairs_never_classed(n in 4usize..=9, seed in any::<u64>()) {
        let g = latin_to_graph(&random_latin_square(n, seed, 20 * n * n));
        let w = weight_matrix(&g);
        let family = classify_colours(&w, &ClassifierConfig::from_quantiles(&w), &g);
        for class in family.classes.iter().filter(|k| k.colours.len() == 2) {
            prop_assert!(w.get(class.colours[0], class.colours[1]) > 0);
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn extraction_guarantees(n in 2usize..=40, p in 0.05f64..0.9, seed in any::<u64>()) {
        let g = SimpleGraph::gnp(n, p, seed);
        let ex = extract_expander(&g, seed);
        let d_h = ex.h.average_degree();
        prop_assert!(d_h >= g.average_degree() / 2.0 - 1e-9);
        prop_assert!(ex.h.min_degree() as f64 >= d_h / 2.0 - 1e-9);
        for s in &ex.trace {
            match *s {
                Step::MinDegree { before, after, .. } => prop_assert!(after < before),
                Step::Split { before, after, dense, .. } => {
                    prop_assert!(after < before);
                    prop_assert!(!dense || 4 * after <= 3 * before);
                }
            }
        }
    }

    #[test]
    fn reduction_is_sound(m in prop::sample::select(vec![3usize, 5, 7]), seed in any::<u64>()) {
        let s = bose_sts(m).unwrap().relabel(seed);
        prop_assert!(TripleSystem::new(s.n, s.triples.clone()).is_ok());
        prop_assert_eq!(s.triples.len(), s.n * (s.n - 1) / 6);
        let r = tripartition_reduce(&s, seed);
        let rm = tvl::solvers::greedy_nibble_matching(&r.graph, 0.3, seed);
        let mm = matching_from_rainbow(&s, &rm, &r).unwrap();
        prop_assert_eq!(mm.len(), rm.len());
        prop_assert!(s.is_matching(&mm));
    }

    #[test]
    fn cli_reruns_are_byte_identical(seed in 0u64..1000, n in 3usize..=9) {
        let args = vec![
            "tvl".to_string(), "solve".into(), "--nibble".into(), "--family".into(),
            format!("random:{seed}:100"), "--n".into(), n.to_string(), "--seed".into(), seed.to_string(),
        ];
        let run = || {
            let mut out = Vec::new();
            let code = tvl::cli::run_with(args.clone(), &mut out, &mut Vec::new());
            (code, out)
        };
        let (c1, o1) = run();
        let (c2, o2) = run();
        prop_assert_eq!(c1, 0);
        prop_assert_eq!(c2, 0);
        prop_assert_eq!(o1, o2);
    }
}

#[test]
fn group_table_cycles_have_zero_alternating_sums() {
    let groups =
        ["3", "4", "2x2", "5", "6", "7", "2x4"].map(|l| FiniteAbelianGroup::parse(l).unwrap());
    for h in groups {
        let g = latin_to_graph(&group_table(&h));
        for cyc in rainbow_cycles(&g) {
            let [m1, m2] = cyc.matchings();
            let sum = |es: [Edge; 2]| h.add(es[0].colour, es[1].colour);
            assert_eq!(sum(m1), sum(m2), "{} {cyc:?}", h.label());
        }
        assert!(weight_matrix(&g).nonzero().is_empty(), "{}", h.label());
    }
}
