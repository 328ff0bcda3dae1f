mod common;

use covertnet::netsim::{route_and_teleport, Link, LinkSource, Node, Topology};
use covertnet::protocols::NodeId;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn line(fidelities: &[f64]) -> Topology {
    let nodes = (0..=fidelities.len() as u32).map(|i| Node { id: NodeId(i), label: String::new() }).collect();
    let links = fidelities
        .iter()
        .enumerate()
        .map(|(i, &fidelity)| Link {
            a: NodeId(i as u32),
            b: NodeId(i as u32 + 1),
            source: LinkSource::Werner { fidelity },
            target_fidelity: None,
            covert_bit_budget: 64,
        })
        .collect();
    Topology::new(nodes, links).unwrap()
}

fn fidelity_grid() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.6, 0.7, 0.8, 0.9, 1.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn conservation_and_degradation(fs in prop::collection::vec(fidelity_grid(), 1..5), seed in any::<u64>()) {
        let topology = line(&fs);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = common::random_qubit(&mut rng);
        let dst = NodeId(fs.len() as u32);
        let (_, report) = route_and_teleport(NodeId(0), dst, &input, &topology, &mut rng).unwrap();
        let hops = fs.len() as u64;
        prop_assert_eq!(report.bell_pairs_consumed, hops);
        prop_assert_eq!(report.covert_bits, 2 * ((hops - 1) + 1));
        prop_assert_eq!(report.protocols.iter().map(|p| p.covert_bits).sum::<u64>(), report.covert_bits);
        let min = fs.iter().copied().fold(1.0, f64::min);
        prop_assert!(report.end_to_end_pair_fidelity <= min + 1e-12);
        let expected = fs[1..].iter().fold(fs[0], |acc, &f| common::swap_fidelity(acc, f));
        prop_assert!((report.end_to_end_pair_fidelity - expected).abs() < 1e-9);
    }

    #[test]
    fn reports_are_deterministic(fs in prop::collection::vec(fidelity_grid(), 1..4), seed in any::<u64>()) {
        let topology = line(&fs);
        let input = common::random_qubit(&mut ChaCha8Rng::seed_from_u64(seed));
        let dst = NodeId(fs.len() as u32);
        let run = || route_and_teleport(NodeId(0), dst, &input, &topology, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().1.to_json();
        prop_assert_eq!(run(), run());
    }
}
