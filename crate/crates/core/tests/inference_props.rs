use proptest::prelude::*;
use quizbn_core::bn::{enumerate_joint, posterior, Evidence, Factor};
use quizbn_core::fixtures::random::{random_evidence, random_network, NetworkShape};
use quizbn_core::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_close(a: &Factor, b: &Factor, tol: f64) {
    assert_eq!(a.scope(), b.scope());
    for (x, y) in a.table().iter().zip(b.table()) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn elimination_matches_enumeration(seed in any::<u64>(), n in 1usize..=12, zeros in prop::bool::ANY) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = NetworkShape {
            variables: n,
            max_cardinality: 2,
            max_parents: 3,
            zero_probability: if zeros { 0.2 } else { 0.0 },
        };
        let net = random_network(&mut rng, shape);
        let mut ids: Vec<String> = net.variables().iter().map(|v| v.id().to_string()).collect();
        ids.shuffle(&mut rng);
        let k = rng.random_range(1..=ids.len().min(3));
        let targets = &ids[..k];
        let e = random_evidence(&mut rng, &net, n - k, targets);
        match (posterior(&net, targets, &e), enumerate_joint(&net, targets, &e)) {
            (Ok(ve), Ok(oracle)) => assert_close(&ve, &oracle, 1e-9),
            (Err(Error::InconsistentEvidence), Err(Error::InconsistentEvidence)) => {}
            (a, b) => panic!("disagreement: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn multistate_networks_agree(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, NetworkShape { variables: n, max_cardinality: 4, max_parents: 2, zero_probability: 0.0 });
        let target = vec![format!("X{}", rng.random_range(0..n))];
        let e = random_evidence(&mut rng, &net, n - 1, &target);
        assert_close(&posterior(&net, &target, &e).unwrap(), &enumerate_joint(&net, &target, &e).unwrap(), 1e-9);
    }
}

fn random_factor(rng: &mut ChaCha8Rng, vars: &[(&str, usize)]) -> Factor {
    let cards: Vec<usize> = vars.iter().map(|v| v.1).collect();
    let n: usize = cards.iter().product();
    Factor::new(
        vars.iter().map(|v| v.0.to_string()).collect(),
        cards,
        (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_commutes_up_to_permutation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_factor(&mut rng, &[("A", 2), ("B", 3)]);
        let b = random_factor(&mut rng, &[("C", 2), ("B", 3)]);
        let ab = a.product(&b).unwrap();
        let ba = b.product(&a).unwrap().permute(ab.scope()).unwrap();
        assert_close(&ab, &ba, 1e-12);
    }

    #[test]
    fn product_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_factor(&mut rng, &[("A", 2), ("B", 2)]);
        let b = random_factor(&mut rng, &[("B", 2), ("C", 3)]);
        let c = random_factor(&mut rng, &[("C", 3), ("A", 2), ("D", 2)]);
        let left = a.product(&b).unwrap().product(&c).unwrap();
        let right = a.product(&b.product(&c).unwrap()).unwrap().permute(left.scope()).unwrap();
        assert_close(&left, &right, 1e-12);
    }

    #[test]
    fn reduce_and_marginalize_commute(seed in any::<u64>(), sb in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_factor(&mut rng, &[("A", 2), ("B", 3), ("C", 2)]);
        let e = Evidence::from_pairs([("B", sb)]);
        let one = f.reduce(&e).unwrap().marginalize("A").unwrap();
        let two = f.marginalize("A").unwrap().reduce(&e).unwrap();
        assert_close(&one, &two, 1e-12);
    }

    #[test]
    fn marginalization_preserves_mass(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_factor(&mut rng, &[("A", 3), ("B", 2), ("C", 4)]);
        let m = f.marginalize("B").unwrap().marginalize("A").unwrap();
        assert!((m.total() - f.total()).abs() < 1e-12);
    }
}
