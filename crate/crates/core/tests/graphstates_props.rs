mod common;

use covertnet::graphstates::{
    build_graph_state, build_graph_state_ordered, build_union_jack, failing_stabilizers, graph_state_dense,
    union_jack_lattice, GraphSpec, TriangleComplex,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph() -> impl Strategy<Value = GraphSpec> {
    (1usize..=12, 0.0f64..=1.0, any::<u64>())
        .prop_map(|(n, p, seed)| GraphSpec::random(n, p, &mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn generators_hold_and_match_dense(g in graph()) {
        let t = build_graph_state(&g);
        prop_assert_eq!(failing_stabilizers(&g, &t).unwrap(), Vec::<usize>::new());
        let overlap = common::overlap(&t.to_dense().unwrap(), &graph_state_dense(&g).unwrap());
        prop_assert!((overlap - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cz_order_is_irrelevant(g in graph(), seed in any::<u64>()) {
        let mut order: Vec<_> = g.edges().collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(
            build_graph_state_ordered(&g, &order).canonical_stabilizers(),
            build_graph_state(&g).canonical_stabilizers()
        );
    }

    #[test]
    fn adjacency_text_round_trips(g in graph()) {
        prop_assert_eq!(GraphSpec::from_adjacency_text(&g.to_adjacency_text()).unwrap(), g);
    }

    #[test]
    fn triangle_order_is_irrelevant(n in 3usize..=10, picks in prop::collection::vec(any::<[u8; 3]>(), 1..12), seed in any::<u64>()) {
        let mut tris: Vec<[usize; 3]> = Vec::new();
        for p in picks {
            let mut t = p.map(|x| x as usize % n);
            t.sort_unstable();
            if t[0] != t[1] && t[1] != t[2] && !tris.contains(&t) {
                tris.push(t);
            }
        }
        prop_assume!(!tris.is_empty());
        let complex = TriangleComplex::new(n, tris).unwrap();
        let shuffled = complex.shuffled(&mut ChaCha8Rng::seed_from_u64(seed));
        let (a, b) = (build_union_jack(&complex).unwrap(), build_union_jack(&shuffled).unwrap());
        prop_assert_eq!(a.amplitudes(), b.amplitudes());
    }
}

#[test]
fn union_jack_lattice_order_invariance() {
    let complex = union_jack_lattice(2, 2).unwrap();
    let reference = build_union_jack(&complex).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        assert_eq!(build_union_jack(&complex.shuffled(&mut rng)).unwrap().amplitudes(), reference.amplitudes());
    }
}
