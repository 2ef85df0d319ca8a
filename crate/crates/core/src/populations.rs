//! Synthetic populations with known dependency structure, and the Cancer
//! example network.

use crate::bn::{labels, BayesianNetwork, Encoding, NodeSpec};
use crate::error::{Error, Result};
use crate::format::parse_sexpr;

/// Which block of an l/r population carries the independent attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Shape of a toy population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ToyKind {
    Product,
    HalfRepeated,
    LrRepeated,
}

/// Index (1-based) of the last independent attribute of a half-repeated
/// population and the split point of an l/r population: `⌊d/2⌋ + 1`.
pub fn mid(d: usize) -> usize {
    d / 2 + 1
}

const BIN: [&str; 2] = ["0", "1"];

fn check_params(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::contract("parameter vector is empty"));
    }
    if let Some(j) = p.iter().position(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::contract(format!(
            "p[{j}] = {} is not in the open interval (0,1)",
            p[j]
        )));
    }
    Ok(())
}

fn x(j: usize) -> String {
    format!("X{j}")
}

fn bern(p: f64) -> Vec<f64> {
    vec![1.0 - p, p]
}

fn copy_rows() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.0], vec![0.0, 1.0]]
}

fn all_outputs(d: usize) -> Vec<String> {
    (1..=d).map(x).collect()
}

/// Independent `X_j ~ Bern(p_j)`, raw-binary, all nodes output.
pub fn make_product(p: &[f64]) -> Result<BayesianNetwork> {
    check_params(p)?;
    let nodes = p
        .iter()
        .enumerate()
        .map(|(i, &pi)| NodeSpec::root(x(i + 1), labels(&BIN), bern(pi)))
        .collect();
    BayesianNetwork::new(nodes, &all_outputs(p.len()), Encoding::RawBinary)
}

/// `X_1..X_mid` independent with `mid = ⌊d/2⌋+1`; every later attribute is
/// a deterministic copy of `X_mid`.
pub fn make_half_repeated(d: usize, p: &[f64]) -> Result<BayesianNetwork> {
    let m = mid(d);
    if d == 0 || p.len() != m {
        return Err(Error::contract(format!(
            "half-repeated population with d = {d} needs {m} parameters, got {}",
            p.len()
        )));
    }
    check_params(p)?;
    let mut nodes: Vec<NodeSpec> = p
        .iter()
        .enumerate()
        .map(|(i, &pi)| NodeSpec::root(x(i + 1), labels(&BIN), bern(pi)))
        .collect();
    for j in (m + 1)..=d {
        nodes.push(NodeSpec::new(x(j), labels(&BIN), vec![x(m)], copy_rows()));
    }
    BayesianNetwork::new(nodes, &all_outputs(d), Encoding::RawBinary)
}

/// Left/right repeated population over even `d`.
///
/// A hidden coin `C` picks the side per record. On the right side
/// `X_1..X_mid` are independent `Bern(p_right)` and `X_{mid+1..d}` copy
/// `X_mid`. On the left side `X_1..X_{mid−1}` all copy one `Bern(p_left[0])`
/// variable and `X_mid..X_d` are independent `Bern(p_left[1..])`. Both
/// parameter vectors have length `mid`.
pub fn make_lr_repeated(d: usize, p_right: &[f64], p_left: &[f64]) -> Result<BayesianNetwork> {
    lr_network(d, p_right, p_left, [0.5, 0.5])
}

/// The l/r population conditioned on one side: the coin is pinned.
pub fn make_lr_repeated_fixed_side(
    d: usize,
    p_right: &[f64],
    p_left: &[f64],
    side: Side,
) -> Result<BayesianNetwork> {
    let coin = match side {
        Side::Left => [1.0, 0.0],
        Side::Right => [0.0, 1.0],
    };
    lr_network(d, p_right, p_left, coin)
}

fn lr_network(d: usize, pr: &[f64], pl: &[f64], coin: [f64; 2]) -> Result<BayesianNetwork> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(Error::contract(format!(
            "l/r population needs an even d ≥ 2, got {d}"
        )));
    }
    let m = mid(d);
    if pr.len() != m || pl.len() != m {
        return Err(Error::contract(format!(
            "l/r population with d = {d} needs {m} right and {m} left parameters"
        )));
    }
    check_params(pr)?;
    check_params(pl)?;
    let side = || vec!["C".to_string()];
    let mut nodes = vec![NodeSpec::root(
        "C",
        labels(&["left", "right"]),
        coin.to_vec(),
    )];
    // Rows are ordered (C, parent) with C most significant: left first.
    nodes.push(NodeSpec::new(
        x(1),
        labels(&BIN),
        side(),
        vec![bern(pl[0]), bern(pr[0])],
    ));
    for j in 2..m {
        let cpt = [copy_rows(), vec![bern(pr[j - 1]); 2]].concat();
        nodes.push(NodeSpec::new(
            x(j),
            labels(&BIN),
            vec!["C".into(), x(1)],
            cpt,
        ));
    }
    nodes.push(NodeSpec::new(
        x(m),
        labels(&BIN),
        side(),
        vec![bern(pl[1]), bern(pr[m - 1])],
    ));
    for j in (m + 1)..=d {
        let cpt = [vec![bern(pl[j - m + 1]); 2], copy_rows()].concat();
        nodes.push(NodeSpec::new(
            x(j),
            labels(&BIN),
            vec!["C".into(), x(m)],
            cpt,
        ));
    }
    BayesianNetwork::new(nodes, &all_outputs(d), Encoding::RawBinary)
}

/// The five-node Cancer network in its s-expression form.
pub const CANCER_SEXPR: &str = r#"(define NETWORK
  '((variable Pollution (type discrete (2) (low high)))
    (variable Smoker (type discrete (2) (True False)))
    (variable Cancer (type discrete (2) (True False)))
    (variable Xray (type discrete (2) (positive negative)))
    (variable Dyspnoea (type discrete (2) (True False)))
    (probability (Cancer Pollution Smoker)
    ((high False) 0.02 0.98)
    ((high True) 0.05 0.95)
    ((low False) 0.001 0.999)
    ((low True) 0.03 0.97))
(probability (Dyspnoea Cancer)
    ((False) 0.3 0.7)
    ((True) 0.65 0.35))
(probability (Pollution) (table 0.9 0.1))
(probability (Smoker) (table 0.3 0.7))
(probability (Xray Cancer)
    ((False) 0.2 0.8)
    ((True) 0.9 0.1))))
"#;

/// Cancer network, all nodes output, one-hot (`d = 10`).
pub fn make_cancer() -> BayesianNetwork {
    parse_sexpr(CANCER_SEXPR).expect("embedded Cancer network parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::Record;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_marginals_equal_parameters() {
        let p = [0.3, 0.7, 0.45];
        let mu = make_product(&p).unwrap().attribute_marginals().unwrap();
        for (a, b) in mu.iter().zip(&p) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(
            make_product(&[0.5]).unwrap().attribute_marginals().unwrap(),
            vec![0.5]
        );
    }

    #[test]
    fn product_rejects_boundary() {
        assert!(make_product(&[0.0, 0.5]).is_err());
        assert!(make_product(&[]).is_err());
    }

    #[test]
    fn half_repeated_structure() {
        let bn = make_half_repeated(5, &[0.5, 0.5, 0.5]).unwrap();
        let law = bn.output_marginal_law().unwrap();
        assert_eq!(law.outcomes().len(), 8);
        for m in law.expectation() {
            assert!((m - 0.5).abs() < 1e-15);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let r = bn.sample(&mut rng);
            let v = bn.encode_full(&r);
            assert_eq!(v.bits()[3], v.bits()[2]);
            assert_eq!(v.bits()[4], v.bits()[2]);
        }
        assert!(make_half_repeated(5, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn half_repeated_d3_forbids_broken_copy() {
        let bn = make_half_repeated(3, &[0.5, 0.5]).unwrap();
        let law = bn.output_marginal_law().unwrap();
        assert_eq!(law.prob_of(&crate::bn::EncodedVector(vec![0, 1, 0])), 0.0);
        assert_eq!(bn.dim(), 3);
    }

    #[test]
    fn lr_rejects_odd_d() {
        assert!(make_lr_repeated(5, &[0.5; 3], &[0.5; 3]).is_err());
    }

    #[test]
    fn lr_sides_satisfy_copy_constraints() {
        let bn = make_lr_repeated(4, &[0.3, 0.6, 0.4], &[0.7, 0.2, 0.55]).unwrap();
        assert_eq!(bn.dim(), 4);
        assert!(!bn.output_names().contains(&"C".to_string()));
        let c = bn.index_of("C").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let r = bn.sample(&mut rng);
            let v = bn.encode_full(&r);
            if r.0[c] == 1 {
                assert_eq!(v.bits()[3], v.bits()[2], "right side: X4 = X3");
            } else {
                assert_eq!(v.bits()[0], v.bits()[1], "left side: X1 = X2");
            }
        }
    }

    #[test]
    fn lr_marginals_are_side_mixture() {
        let pr = [0.3, 0.6, 0.4];
        let pl = [0.7, 0.2, 0.55];
        let mu = make_lr_repeated(4, &pr, &pl)
            .unwrap()
            .attribute_marginals()
            .unwrap();
        let right = make_lr_repeated_fixed_side(4, &pr, &pl, Side::Right)
            .unwrap()
            .attribute_marginals()
            .unwrap();
        let left = make_lr_repeated_fixed_side(4, &pr, &pl, Side::Left)
            .unwrap()
            .attribute_marginals()
            .unwrap();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(&right, &[0.3, 0.6, 0.4, 0.4]), "{right:?}");
        assert!(close(&left, &[0.7, 0.7, 0.2, 0.55]), "{left:?}");
        for j in 0..4 {
            assert!((mu[j] - 0.5 * (right[j] + left[j])).abs() < 1e-15);
        }
    }

    #[test]
    fn lr_right_side_matches_half_repeated() {
        let pr = [0.3, 0.6, 0.4];
        let fixed = make_lr_repeated_fixed_side(4, &pr, &[0.5; 3], Side::Right).unwrap();
        let half = make_half_repeated(4, &pr).unwrap();
        let a = fixed.output_marginal_law().unwrap();
        let b = half.output_marginal_law().unwrap();
        assert!(a.total_variation(&b) < 1e-15);
    }

    #[test]
    fn cancer_cpts() {
        let bn = make_cancer();
        assert_eq!(bn.dim(), 10);
        let cancer = bn.index_of("Cancer").unwrap();
        let node = bn.node(cancer);
        assert_eq!(node.parents, vec!["Pollution", "Smoker"]);
        // (low, True) is row 0 with parents ordered Pollution, Smoker.
        assert_eq!(node.cpt[0], vec![0.03, 0.97]);
        let xray = bn.node(bn.index_of("Xray").unwrap());
        // Parent Cancer states are (True, False): False is row 1.
        assert_eq!(xray.cpt[1][0], 0.2);
    }

    #[test]
    fn cancer_first_state_joint() {
        let bn = make_cancer();
        let first = Record(vec![0; 5]);
        // Pollution=low, Smoker=True, Cancer=True, Xray=positive, Dyspnoea=True.
        let expected = 0.9 * 0.3 * 0.03 * 0.9 * 0.65;
        assert!((bn.joint_prob(&first).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.0047385_f64).abs() < 1e-15);
    }
}
