use bayesmia::networks::{builtin_bif, BUILTIN_NAMES};
use bayesmia::populations::CANCER_SEXPR;
use bayesmia::{
    emit_sexpr, make_cancer, make_product, parse_bif_subset, parse_sexpr, BayesianNetwork, Error,
    Record,
};
use proptest::prelude::*;

fn every_record(bn: &BayesianNetwork) -> Vec<Record> {
    let cards: Vec<usize> = bn.nodes().iter().map(|n| n.cardinality()).collect();
    let mut out = vec![Record(vec![0; cards.len()])];
    for (i, &k) in cards.iter().enumerate() {
        out = out
            .into_iter()
            .flat_map(|r| {
                (0..k).map(move |s| {
                    let mut r = r.clone();
                    r.0[i] = s;
                    r
                })
            })
            .collect();
    }
    out
}

#[test]
fn cancer_sexpr_and_bif_agree_on_every_record() {
    let a = make_cancer();
    let b = parse_bif_subset(builtin_bif("cancer").unwrap()).unwrap();
    let mut checked = 0;
    for r in every_record(&a) {
        let mapped: Vec<usize> = a.nodes().iter().map(|n| n.name.as_str()).zip(&r.0).fold(
            vec![0; 5],
            |mut acc, (name, &s)| {
                let j = b.index_of(name).unwrap();
                acc[j] = b
                    .node(j)
                    .state_index(&a.node(a.index_of(name).unwrap()).states[s])
                    .unwrap();
                acc
            },
        );
        let (pa, pb) = (
            a.joint_prob(&r).unwrap(),
            b.joint_prob(&Record(mapped)).unwrap(),
        );
        assert!((pa - pb).abs() <= 1e-12, "{r:?}: {pa} vs {pb}");
        checked += 1;
    }
    assert_eq!(checked, 32);
}

#[test]
fn cancer_golden_values() {
    let bn = make_cancer();
    let cancer = bn.node(bn.index_of("Cancer").unwrap());
    assert_eq!(cancer.parents, ["Pollution", "Smoker"]);
    // Rows follow (Pollution, Smoker) = (low, True), (low, False), (high, True), (high, False).
    let expect = [[0.03, 0.97], [0.001, 0.999], [0.05, 0.95], [0.02, 0.98]];
    for (row, e) in cancer.cpt.iter().zip(expect) {
        assert!((row[0] - e[0]).abs() < 1e-12 && (row[1] - e[1]).abs() < 1e-12);
    }
    let xray = bn.node(bn.index_of("Xray").unwrap());
    assert!((xray.cpt[1][0] - 0.2).abs() < 1e-12);
}

#[test]
fn every_bundled_bif_parses_and_round_trips() {
    for name in BUILTIN_NAMES {
        let Some(text) = builtin_bif(name) else {
            continue;
        };
        let bn = parse_bif_subset(text).unwrap();
        let back = parse_sexpr(&emit_sexpr(&bn)).unwrap();
        for (x, y) in bn.nodes().iter().zip(back.nodes()) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.parents, y.parents);
            assert_eq!(x.cpt, y.cpt, "{name}/{}", x.name);
        }
    }
}

#[test]
fn emitted_thirty_node_product_round_trips_exactly() {
    let p: Vec<f64> = (0..30)
        .map(|i| 0.01 + 0.98 * f64::from(i) / 29.0 + 1e-13)
        .collect();
    let bn = make_product(&p).unwrap();
    let text = emit_sexpr(&bn);
    let back = parse_sexpr(&text).unwrap();
    assert_eq!(back.node_count(), 30);
    for (x, y) in bn.nodes().iter().zip(back.nodes()) {
        assert_eq!(x.cpt, y.cpt);
    }
    assert_eq!(emit_sexpr(&back), text);
}

#[test]
fn cancer_listing_round_trips_through_emit() {
    let bn = parse_sexpr(CANCER_SEXPR).unwrap();
    let again = parse_sexpr(&emit_sexpr(&bn)).unwrap();
    for r in every_record(&bn) {
        assert_eq!(bn.joint_prob(&r).unwrap(), again.joint_prob(&r).unwrap());
    }
}

fn positioned(res: bayesmia::Result<BayesianNetwork>) -> std::result::Result<(), String> {
    match res {
        Ok(_) => Ok(()),
        Err(Error::Parse(p)) if p.line >= 1 && p.column >= 1 => Ok(()),
        Err(e) => Err(format!("error without a position: {e}")),
    }
}

fn mutate(text: &str, cuts: &[(usize, u8)]) -> String {
    let mut bytes = text.as_bytes().to_vec();
    for &(at, b) in cuts {
        if bytes.is_empty() {
            break;
        }
        let at = at % bytes.len();
        match b % 3 {
            0 => {
                bytes.remove(at);
            }
            1 => bytes.insert(at, b"()'; \n0.5x|{},"[usize::from(b) % 14]),
            _ => bytes[at] = b"()'; \n0.5x|{},"[usize::from(b) % 14],
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        prop_assert!(positioned(parse_sexpr(&text)).is_ok());
        prop_assert!(positioned(parse_bif_subset(&text)).is_ok());
    }

    #[test]
    fn mutated_sexpr_errors_carry_positions(cuts in prop::collection::vec((0usize..10_000, any::<u8>()), 1..6)) {
        let text = mutate(CANCER_SEXPR, &cuts);
        prop_assert!(positioned(parse_sexpr(&text)).is_ok(), "{}", text);
    }

    #[test]
    fn mutated_bif_errors_carry_positions(cuts in prop::collection::vec((0usize..10_000, any::<u8>()), 1..6)) {
        let text = mutate(builtin_bif("asia").unwrap(), &cuts);
        prop_assert!(positioned(parse_bif_subset(&text)).is_ok(), "{}", text);
    }
}
