//! Decision statistics for membership inference on released counts.

use std::fmt;
use std::str::FromStr;

use crate::bn::{BayesianNetwork, EncodedVector, ReleasedCounts};
use crate::error::{Error, Result};
use crate::inference::{posterior_ratio, PosteriorEngine};
use crate::populations::{mid, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttackKind {
    Lrt,
    LrtClipped,
    InnerProduct,
    Bayes,
}

impl AttackKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttackKind::Lrt => "lrt",
            AttackKind::LrtClipped => "lrt_clipped",
            AttackKind::InnerProduct => "inner_product",
            AttackKind::Bayes => "bayes",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lrt" => Ok(AttackKind::Lrt),
            "lrt_clipped" | "lrt-clipped" | "clip" => Ok(AttackKind::LrtClipped),
            "inner_product" | "inner-product" | "ip" => Ok(AttackKind::InnerProduct),
            "bayes" => Ok(AttackKind::Bayes),
            other => Err(Error::contract(format!("unknown attack `{other}`"))),
        }
    }
}

/// `log Λ` for the ratio attacks, the raw inner product otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackScore {
    pub kind: AttackKind,
    pub value: f64,
}

/// Inclusive, 1-based attribute range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClipRange {
    lo: usize,
    hi: usize,
}

impl ClipRange {
    pub fn new(lo: usize, hi: usize, d: usize) -> Result<Self> {
        if !(1 <= lo && lo <= hi && hi <= d) {
            return Err(Error::contract(format!(
                "clip range {lo}..{hi} is not within 1..{d}"
            )));
        }
        Ok(ClipRange { lo, hi })
    }

    pub fn full(d: usize) -> Self {
        ClipRange {
            lo: 1,
            hi: d.max(1),
        }
    }

    /// `1..mid`: the independent attributes of a half-repeated population.
    pub fn half_repeated(d: usize) -> Self {
        ClipRange {
            lo: 1,
            hi: mid(d).min(d),
        }
    }

    /// The clip for one side of a left/right population: `1..mid` on the
    /// right, `mid−1..d` on the left.
    pub fn for_side(side: Side, d: usize) -> Self {
        let m = mid(d).min(d);
        match side {
            Side::Right => ClipRange { lo: 1, hi: m },
            Side::Left => ClipRange {
                lo: m.saturating_sub(1).max(1),
                hi: d,
            },
        }
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }
}

impl fmt::Display for ClipRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

fn check_inputs(mu: &[f64], counts: &ReleasedCounts, y: &EncodedVector) -> Result<()> {
    if mu.len() != counts.dim() || y.dim() != counts.dim() {
        return Err(Error::contract(format!(
            "dimension mismatch: μ has {}, counts {}, target {}",
            mu.len(),
            counts.dim(),
            y.dim()
        )));
    }
    if y.bits().iter().any(|&b| b > 1) {
        return Err(Error::contract("target bits must be 0 or 1"));
    }
    Ok(())
}

fn check_open_unit(mu: &[f64]) -> Result<()> {
    match mu.iter().position(|&m| !(m > 0.0 && m < 1.0)) {
        Some(j) => Err(Error::contract(format!(
            "μ[{j}] = {} is not in the open interval (0,1)",
            mu[j]
        ))),
        None => Ok(()),
    }
}

/// `Σ log factor` over 0-based indices `lo..hi`.
fn lrt_sum(mu: &[f64], counts: &ReleasedCounts, y: &EncodedVector, lo: usize, hi: usize) -> f64 {
    let n = f64::from(counts.n());
    let mut acc = 0.0;
    for ((&m, &c), &b) in mu[lo..hi]
        .iter()
        .zip(&counts.counts()[lo..hi])
        .zip(&y.bits()[lo..hi])
    {
        let xbar = f64::from(c) / n;
        let factor = if b == 1 {
            xbar / m
        } else {
            (1.0 - xbar) / (1.0 - m)
        };
        acc += factor.ln();
    }
    acc
}

/// Likelihood ratio of the target under the dataset marginals against the
/// population marginals, in log space.
pub fn lrt_score(mu: &[f64], counts: &ReleasedCounts, y: &EncodedVector) -> Result<AttackScore> {
    check_inputs(mu, counts, y)?;
    check_open_unit(mu)?;
    Ok(AttackScore {
        kind: AttackKind::Lrt,
        value: lrt_sum(mu, counts, y, 0, mu.len()),
    })
}

/// [`lrt_score`] restricted to the attributes in `range`.
pub fn lrt_clipped_score(
    mu: &[f64],
    counts: &ReleasedCounts,
    y: &EncodedVector,
    range: ClipRange,
) -> Result<AttackScore> {
    check_inputs(mu, counts, y)?;
    check_open_unit(mu)?;
    if range.hi > mu.len() {
        return Err(Error::contract(format!(
            "clip range {range} exceeds d = {}",
            mu.len()
        )));
    }
    Ok(AttackScore {
        kind: AttackKind::LrtClipped,
        value: lrt_sum(mu, counts, y, range.lo - 1, range.hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideChoice {
    Left,
    Right,
    Ambiguous,
}

impl SideChoice {
    /// The side used by the deterministic clipped attack.
    pub fn resolve(self) -> Side {
        match self {
            SideChoice::Left => Side::Left,
            SideChoice::Right | SideChoice::Ambiguous => Side::Right,
        }
    }
}

/// Guesses which side of a left/right population produced the counts from
/// which block of attributes is constant.
pub fn choose_side(counts: &[u32], d: usize) -> Result<SideChoice> {
    if d < 2 || !d.is_multiple_of(2) || counts.len() != d {
        return Err(Error::contract(format!(
            "side detection needs even d and d counts (d = {d}, {} counts)",
            counts.len()
        )));
    }
    let m = mid(d);
    let constant = |block: &[u32]| block.windows(2).all(|w| w[0] == w[1]);
    let left_block = constant(&counts[..m - 1]);
    let right_block = constant(&counts[m - 1..]);
    Ok(match (left_block, right_block) {
        (false, true) => SideChoice::Right,
        (true, false) => SideChoice::Left,
        _ => SideChoice::Ambiguous,
    })
}

/// `⟨x̄ − μ, y⟩`.
pub fn inner_product_score(
    mu: &[f64],
    counts: &ReleasedCounts,
    y: &EncodedVector,
) -> Result<AttackScore> {
    check_inputs(mu, counts, y)?;
    let n = f64::from(counts.n());
    let value = mu
        .iter()
        .zip(counts.counts())
        .zip(y.bits())
        .map(|((&m, &c), &b)| (f64::from(c) / n - m) * f64::from(b))
        .sum();
    Ok(AttackScore {
        kind: AttackKind::InnerProduct,
        value,
    })
}

/// `log R` under the attacker's network.
pub fn bayes_score(
    bn: &BayesianNetwork,
    counts: &ReleasedCounts,
    y: &EncodedVector,
) -> Result<AttackScore> {
    let r = posterior_ratio(bn, counts, y)?;
    Ok(AttackScore {
        kind: AttackKind::Bayes,
        value: r.log_ratio(),
    })
}

/// [`bayes_score`] against an engine prepared for one release.
pub fn bayes_score_with(engine: &PosteriorEngine<'_>, y: &EncodedVector) -> Result<AttackScore> {
    Ok(AttackScore {
        kind: AttackKind::Bayes,
        value: engine.ratio(y)?.log_ratio(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    In,
    Out,
}

/// IN iff the score strictly exceeds the threshold.
pub fn decide(score: &AttackScore, threshold: f64) -> Label {
    if score.value > threshold {
        Label::In
    } else {
        Label::Out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::populations::{make_half_repeated, make_product};

    fn counts(c: &[u32], n: u32) -> ReleasedCounts {
        ReleasedCounts::new(c.to_vec(), n).unwrap()
    }

    fn y(bits: &[u8]) -> EncodedVector {
        EncodedVector(bits.to_vec())
    }

    #[test]
    fn lrt_examples() {
        let mu = [0.5, 0.5];
        let s = lrt_score(&mu, &counts(&[3, 1], 4), &y(&[1, 0])).unwrap();
        assert!((s.value - 2.25f64.ln()).abs() < 1e-15);
        assert_eq!(
            lrt_score(&mu, &counts(&[2, 2], 4), &y(&[1, 0]))
                .unwrap()
                .value,
            0.0
        );
        let z = lrt_score(&mu, &counts(&[0, 2], 4), &y(&[1, 0]))
            .unwrap()
            .value;
        assert_eq!(z, f64::NEG_INFINITY);
        assert!(lrt_score(&[1.0, 0.5], &counts(&[0, 2], 4), &y(&[1, 0])).is_err());
    }

    #[test]
    fn zero_factor_dominates_infinite_one() {
        // x̄ = 1 with y = 1 gives a finite factor; combined with a zero factor
        // the sum must be -inf, never NaN.
        let v = lrt_score(&[0.5, 0.5], &counts(&[4, 0], 4), &y(&[1, 1]))
            .unwrap()
            .value;
        assert_eq!(v, f64::NEG_INFINITY);
    }

    #[test]
    fn full_clip_is_bitwise_lrt() {
        let mu = [0.3, 0.6, 0.45, 0.5, 0.7];
        let c = counts(&[1, 2, 3, 0, 2], 3);
        let t = y(&[1, 0, 1, 0, 1]);
        let a = lrt_score(&mu, &c, &t).unwrap().value;
        let b = lrt_clipped_score(&mu, &c, &t, ClipRange::full(5))
            .unwrap()
            .value;
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn clip_ignores_outside_indices() {
        let mu = [0.3, 0.6, 0.45, 0.45, 0.45];
        let t = y(&[1, 0, 1, 1, 1]);
        let r = ClipRange::half_repeated(5);
        assert_eq!((r.lo(), r.hi()), (1, 3));
        let a = lrt_clipped_score(&mu, &counts(&[1, 2, 2, 2, 2], 3), &t, r).unwrap();
        let b = lrt_clipped_score(&mu, &counts(&[1, 2, 2, 0, 3], 3), &t, r).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn side_ranges() {
        let l = ClipRange::for_side(Side::Left, 4);
        assert_eq!((l.lo(), l.hi()), (2, 4));
        let r = ClipRange::for_side(Side::Right, 4);
        assert_eq!((r.lo(), r.hi()), (1, 3));
        assert!(ClipRange::new(0, 2, 4).is_err());
        assert!(ClipRange::new(3, 2, 4).is_err());
        assert!(ClipRange::new(1, 5, 4).is_err());
    }

    #[test]
    fn side_choice_examples() {
        assert_eq!(choose_side(&[1, 3, 2, 2], 4).unwrap(), SideChoice::Right);
        assert_eq!(choose_side(&[2, 2, 3, 1], 4).unwrap(), SideChoice::Left);
        assert_eq!(
            choose_side(&[2, 2, 2, 2], 4).unwrap(),
            SideChoice::Ambiguous
        );
        assert_eq!(
            choose_side(&[1, 2, 3, 1], 4).unwrap(),
            SideChoice::Ambiguous
        );
        assert_eq!(SideChoice::Ambiguous.resolve(), Side::Right);
        assert!(choose_side(&[1, 2, 3], 3).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let mu = [0.5, 0.5];
        let v = inner_product_score(&mu, &counts(&[3, 1], 4), &y(&[1, 0])).unwrap();
        assert!((v.value - 0.25).abs() < 1e-15);
        assert_eq!(
            inner_product_score(&mu, &counts(&[3, 1], 4), &y(&[0, 0]))
                .unwrap()
                .value,
            0.0
        );
        assert_eq!(
            inner_product_score(&mu, &counts(&[2, 2], 4), &y(&[1, 1]))
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn bayes_matches_lrt_on_product() {
        let p = [0.3, 0.65, 0.5];
        let bn = make_product(&p).unwrap();
        let c = counts(&[1, 2, 3], 3);
        let t = y(&[1, 1, 1]);
        let b = bayes_score(&bn, &c, &t).unwrap().value;
        let l = lrt_score(&p, &c, &t).unwrap().value;
        assert!((b - l).abs() < 1e-9, "{b} vs {l}");
        let infeasible = bayes_score(&bn, &counts(&[0, 2, 3], 3), &t).unwrap().value;
        assert_eq!(infeasible, f64::NEG_INFINITY);
    }

    #[test]
    fn bayes_matches_half_clip() {
        let p = [0.35, 0.6, 0.45];
        let bn = make_half_repeated(5, &p).unwrap();
        let mu = bn.attribute_marginals().unwrap();
        let c = counts(&[2, 1, 2, 2, 2], 3);
        for bits in [[1, 0, 1, 1, 1], [0, 1, 0, 0, 0], [1, 1, 1, 1, 1]] {
            let t = y(&bits);
            let b = bayes_score(&bn, &c, &t).unwrap().value;
            let l = lrt_clipped_score(&mu, &c, &t, ClipRange::half_repeated(5))
                .unwrap()
                .value;
            assert!((b - l).abs() < 1e-9, "{bits:?}: {b} vs {l}");
        }
    }

    #[test]
    fn bayes_surfaces_impossible_evidence() {
        let bn = make_half_repeated(3, &[0.5, 0.5]).unwrap();
        let err = bayes_score(&bn, &counts(&[1, 1, 0], 2), &y(&[1, 1, 1])).unwrap_err();
        assert!(matches!(err, Error::ImpossibleEvidence));
    }

    #[test]
    fn decide_is_strict() {
        let s = |value| AttackScore {
            kind: AttackKind::Lrt,
            value,
        };
        assert_eq!(decide(&s(0.0), 0.0), Label::Out);
        assert_eq!(decide(&s(f64::INFINITY), 1e300), Label::In);
        assert_eq!(decide(&s(2.25f64.ln()), 0.0), Label::In);
    }

    #[test]
    fn kind_round_trips() {
        for k in [
            AttackKind::Lrt,
            AttackKind::LrtClipped,
            AttackKind::InnerProduct,
            AttackKind::Bayes,
        ] {
            assert_eq!(k.as_str().parse::<AttackKind>().unwrap(), k);
        }
    }
}
