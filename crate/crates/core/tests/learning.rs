use bayesmia::networks::builtin_network;
use bayesmia::{
    chow_liu_fit, empirical_marginals, mle_fit, BayesianNetwork, Encoding, ProxyDataset,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn proxy(bn: &BayesianNetwork, m: usize, seed: u64) -> ProxyDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ProxyDataset::from_network(bn, (0..m).map(|_| bn.sample(&mut rng)).collect()).unwrap()
}

fn tv(a: &BayesianNetwork, b: &BayesianNetwork) -> f64 {
    a.output_marginal_law()
        .unwrap()
        .total_variation(&b.output_marginal_law().unwrap())
}

#[test]
fn weak_attacker_law_converges_to_the_population() {
    let asia = builtin_network("asia").unwrap();
    let tvs: Vec<f64> = [20, 200, 20_000]
        .iter()
        .map(|&m| tv(&asia, &mle_fit(&asia, &proxy(&asia, m, 1), 1.0).unwrap()))
        .collect();
    assert!(tvs[0] > tvs[1] && tvs[1] > tvs[2], "{tvs:?}");
    assert!(tvs[2] < 0.03, "{tvs:?}");
}

#[test]
fn chow_liu_is_a_tree_over_all_columns() {
    let asia = builtin_network("asia").unwrap();
    let names = asia.output_names();
    let learned = chow_liu_fit(&proxy(&asia, 500, 2), 1.0, &names, Encoding::OneHot).unwrap();
    assert_eq!(learned.node_count(), asia.node_count());
    assert_eq!(learned.dim(), asia.dim());
    let roots = learned
        .nodes()
        .iter()
        .filter(|n| n.parents.is_empty())
        .count();
    assert_eq!(roots, 1);
    assert!(learned.nodes().iter().all(|n| n.parents.len() <= 1));
    assert!(tv(&asia, &learned) < 0.2);
}

#[test]
fn proxy_marginals_match_their_encoding() {
    let cancer = builtin_network("cancer").unwrap();
    let p = proxy(&cancer, 300, 3);
    let mu = empirical_marginals(&p, &cancer.output_names(), Encoding::OneHot).unwrap();
    assert_eq!(mu.len(), 10);
    for pair in mu.chunks(2) {
        assert!((pair[0] + pair[1] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn csv_round_trip_keeps_records() {
    let asia = builtin_network("asia").unwrap();
    let p = proxy(&asia, 40, 4);
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    let back = ProxyDataset::read_csv(buf.as_slice(), Some(&asia)).unwrap();
    assert_eq!(back.records(), p.records());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mle_rows_are_distributions(m in 1usize..60, seed in any::<u64>(), alpha in 0.0f64..3.0) {
        let asia = builtin_network("asia").unwrap();
        let fit = mle_fit(&asia, &proxy(&asia, m, seed), alpha).unwrap();
        for node in fit.nodes() {
            for row in &node.cpt {
                let s: f64 = row.iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
                if alpha > 0.0 {
                    prop_assert!(row.iter().all(|&p| p > 0.0));
                }
            }
        }
    }
}
