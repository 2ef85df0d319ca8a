//! Exact posterior of the membership bit given a population network, the
//! released counts and a target.
//!
//! With a fair prior on IN, the posterior odds reduce to
//!
//! ```text
//! R = P(V_1 + … + V_{n-1} = c − y) / P(V_1 + … + V_n = c)
//! ```
//!
//! where the `V_i` are i.i.d. encoded records of the population. Both sides
//! are evaluated by convolving the output law with itself over a map of
//! feasible partial-sum vectors. Partial sums that exceed the target in any
//! coordinate, or can no longer reach it with the records left, are pruned.

use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use crate::bn::{BayesianNetwork, EncodedVector, ReleasedCounts};
use crate::error::{Error, Result};

type DetHasher = BuildHasherDefault<std::collections::hash_map::DefaultHasher>;

/// Default cap on `(joint states)^n` for [`brute_force_posterior`].
pub const BRUTE_FORCE_GUARD: u128 = 10_000_000;

/// Exact distribution of a single encoded record.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportDistribution {
    dim: usize,
    outcomes: Vec<(EncodedVector, f64)>,
}

impl SupportDistribution {
    /// Outcomes must be distinct, of length `dim`, with positive
    /// probabilities summing to 1 within 1e-9. They are stored sorted.
    pub fn new(dim: usize, mut outcomes: Vec<(EncodedVector, f64)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::contract("support distribution has no outcomes"));
        }
        outcomes.sort_by(|a, b| a.0.cmp(&b.0));
        for w in outcomes.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::contract("duplicate outcome in support distribution"));
            }
        }
        for (v, p) in &outcomes {
            if v.dim() != dim {
                return Err(Error::contract("outcome has the wrong dimension"));
            }
            if v.bits().iter().any(|&b| b > 1) {
                return Err(Error::contract("outcome bits must be 0 or 1"));
            }
            if !(*p > 0.0 && p.is_finite()) {
                return Err(Error::contract("outcome probabilities must be positive"));
            }
        }
        let total: f64 = outcomes.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::contract(format!(
                "outcome probabilities sum to {total}, expected 1"
            )));
        }
        Ok(SupportDistribution { dim, outcomes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[(EncodedVector, f64)] {
        &self.outcomes
    }

    pub fn prob_of(&self, v: &EncodedVector) -> f64 {
        self.outcomes
            .binary_search_by(|(o, _)| o.cmp(v))
            .map(|i| self.outcomes[i].1)
            .unwrap_or(0.0)
    }

    /// Coordinatewise mean of the encoded vector.
    pub fn expectation(&self) -> Vec<f64> {
        let mut mu = vec![0.0; self.dim];
        for (v, p) in &self.outcomes {
            for (m, &b) in mu.iter_mut().zip(v.bits()) {
                if b == 1 {
                    *m += p;
                }
            }
        }
        mu
    }

    /// Per-coordinate maximum over the support.
    fn max_bits(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.dim];
        for (v, _) in &self.outcomes {
            for (x, &b) in m.iter_mut().zip(v.bits()) {
                *x = (*x).max(u32::from(b));
            }
        }
        m
    }

    /// Total variation distance to another law of the same dimension.
    pub fn total_variation(&self, other: &SupportDistribution) -> f64 {
        let mut acc = 0.0;
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.outcomes, &other.outcomes);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x.0 == y.0 => {
                    acc += (x.1 - y.1).abs();
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x.0 < y.0 => {
                    acc += x.1;
                    i += 1;
                }
                (Some(x), None) => {
                    acc += x.1;
                    i += 1;
                }
                (_, Some(y)) => {
                    acc += y.1;
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        acc / 2.0
    }
}

/// Posterior odds of IN and the quantities it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorResult {
    pub ratio: f64,
    pub posterior_in: f64,
    pub log_numerator: f64,
    pub log_denominator: f64,
}

impl PosteriorResult {
    fn from_logs(log_numerator: f64, log_denominator: f64) -> Self {
        Self::from_parts(
            (log_numerator - log_denominator).exp(),
            log_numerator,
            log_denominator,
        )
    }

    fn from_parts(ratio: f64, log_numerator: f64, log_denominator: f64) -> Self {
        let posterior_in = if ratio.is_infinite() {
            1.0
        } else {
            ratio / (1.0 + ratio)
        };
        PosteriorResult {
            ratio,
            posterior_in,
            log_numerator,
            log_denominator,
        }
    }

    /// `log R`, `-inf` when IN is impossible.
    pub fn log_ratio(&self) -> f64 {
        self.log_numerator - self.log_denominator
    }
}

/// The partial-sum distribution after some number of convolution steps.
/// Probabilities are stored relative to `2^exponent`.
struct Layer {
    entries: Vec<(Vec<u32>, f64)>,
    exponent: i32,
}

impl Layer {
    /// Scaled probability of `target`, 0 when absent.
    fn scaled(&self, target: &[u32]) -> f64 {
        match self
            .entries
            .binary_search_by(|(k, _)| k.as_slice().cmp(target))
        {
            Ok(i) => self.entries[i].1,
            Err(_) => 0.0,
        }
    }

    fn log_scale(&self) -> f64 {
        f64::from(self.exponent) * std::f64::consts::LN_2
    }

    fn log_prob(&self, target: &[u32]) -> f64 {
        self.scaled(target).ln() + self.log_scale()
    }
}

/// Binary exponent of a positive normal `x`, so that `x / 2^e ∈ [1, 2)`.
/// Dividing by that power of two is exact.
fn binary_exponent(x: f64) -> i32 {
    if x.is_normal() {
        ((x.to_bits() >> 52) & 0x7ff) as i32 - 1023
    } else {
        0
    }
}

fn rescale_by<K>(entries: &mut [(K, f64)], exponent: &mut i32) {
    let max = entries.iter().map(|e| e.1).fold(0.0, f64::max);
    let e = binary_exponent(max);
    if e != 0 {
        let factor = 2f64.powi(-e);
        entries.iter_mut().for_each(|x| x.1 *= factor);
        *exponent += e;
    }
}

/// Bounds applied while convolving: after `i` of `steps` records a partial
/// sum `s` must satisfy `s ≤ upper` and `s + (steps − i)·max_bit ≥ need`.
struct Bounds<'a> {
    upper: &'a [u32],
    need: Vec<u32>,
}

/// Convolves `law` with itself `steps` times under `bounds`.
///
/// Packed into a u128 with one guard bit per coordinate when it fits;
/// coordinate vectors otherwise.
fn convolve(law: &SupportDistribution, steps: u32, bounds: &Bounds<'_>) -> Layer {
    let d = law.dim();
    let max_upper = bounds.upper.iter().copied().max().unwrap_or(0);
    let width = (32 - max_upper.leading_zeros()) as usize + 1;
    if d * width <= 128 {
        convolve_packed(law, steps, bounds, width)
    } else {
        convolve_vec(law, steps, bounds)
    }
}

fn convolve_vec(law: &SupportDistribution, steps: u32, bounds: &Bounds<'_>) -> Layer {
    let d = law.dim();
    let max_bits = law.max_bits();
    let mut exponent = 0;
    let mut layer: Vec<(Vec<u32>, f64)> = vec![(vec![0; d], 1.0)];
    for step in 1..=steps {
        let remaining = steps - step;
        let mut next: HashMap<Vec<u32>, f64, DetHasher> = HashMap::default();
        for (s, p) in &layer {
            'outcome: for (v, q) in law.outcomes() {
                let mut t = s.clone();
                for j in 0..d {
                    t[j] += u32::from(v.bits()[j]);
                    if t[j] > bounds.upper[j] || t[j] + remaining * max_bits[j] < bounds.need[j] {
                        continue 'outcome;
                    }
                }
                *next.entry(t).or_insert(0.0) += p * q;
            }
        }
        let mut entries: Vec<_> = next.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        rescale_by(&mut entries, &mut exponent);
        layer = entries;
        if layer.is_empty() {
            break;
        }
    }
    Layer {
        entries: layer,
        exponent,
    }
}

fn convolve_packed(
    law: &SupportDistribution,
    steps: u32,
    bounds: &Bounds<'_>,
    width: usize,
) -> Layer {
    let d = law.dim();
    let half = 1u128 << (width - 1);
    let field = |j: usize, x: u128| x << (width * j);
    let guard: u128 = (0..d).map(|j| field(j, half)).sum();
    // s_j > upper_j  <=>  guard bit of (s_j + half − 1 − upper_j) set.
    let over: u128 = (0..d)
        .map(|j| field(j, half - 1 - u128::from(bounds.upper[j])))
        .sum();
    let max_bits = law.max_bits();
    // s_j ≥ low_j  <=>  guard bit of (s_j + half − low_j) set.
    let under_offset = |remaining: u32| -> u128 {
        (0..d)
            .map(|j| {
                let low = bounds.need[j].saturating_sub(remaining * max_bits[j]);
                field(j, half - u128::from(low))
            })
            .sum()
    };
    let packed: Vec<(u128, f64)> = law
        .outcomes()
        .iter()
        .map(|(v, q)| {
            let k = v
                .bits()
                .iter()
                .enumerate()
                .map(|(j, &b)| field(j, u128::from(b)))
                .sum();
            (k, *q)
        })
        .collect();

    let mut exponent = 0;
    let mut layer: Vec<(u128, f64)> = vec![(0, 1.0)];
    for step in 1..=steps {
        let under = under_offset(steps - step);
        let mut next: HashMap<u128, f64, DetHasher> = HashMap::default();
        for &(s, p) in &layer {
            for &(v, q) in &packed {
                let t = s + v;
                if (t + over) & guard != 0 || (t + under) & guard != guard {
                    continue;
                }
                *next.entry(t).or_insert(0.0) += p * q;
            }
        }
        let mut entries: Vec<_> = next.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        rescale_by(&mut entries, &mut exponent);
        layer = entries;
        if layer.is_empty() {
            break;
        }
    }
    let mask = (1u128 << width) - 1;
    let mut entries: Vec<(Vec<u32>, f64)> = layer
        .into_iter()
        .map(|(k, p)| {
            let coords = (0..d).map(|j| ((k >> (width * j)) & mask) as u32).collect();
            (coords, p)
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    Layer { entries, exponent }
}

fn log_sum_count_prob(law: &SupportDistribution, k: u32, target: &[i64]) -> f64 {
    assert_eq!(target.len(), law.dim(), "target length must equal d");
    if target.iter().any(|&t| t < 0 || t > i64::from(k)) {
        return f64::NEG_INFINITY;
    }
    let target: Vec<u32> = target.iter().map(|&t| t as u32).collect();
    let bounds = Bounds {
        upper: &target,
        need: target.clone(),
    };
    convolve(law, k, &bounds).log_prob(&target)
}

/// `P(V_1 + … + V_k = target)` for `V_i` i.i.d. from `law`.
///
/// `k = 0` gives 1 for the zero target and 0 otherwise; any negative target
/// coordinate gives 0.
pub fn sum_count_prob(law: &SupportDistribution, k: u32, target: &[i64]) -> f64 {
    log_sum_count_prob(law, k, target).exp()
}

/// Posterior evaluator for one release. The `(n−1)`-fold partial sums are
/// computed once, bounded by `c`, so every target is a table lookup.
pub struct PosteriorEngine<'a> {
    law: &'a SupportDistribution,
    counts: Vec<u32>,
    layer: Layer,
    /// Denominator in the layer's scale; `None` if it underflowed there.
    scaled_denominator: Option<f64>,
    log_denominator: f64,
}

impl<'a> PosteriorEngine<'a> {
    pub fn new(law: &'a SupportDistribution, counts: &ReleasedCounts) -> Result<Self> {
        if counts.dim() != law.dim() {
            return Err(Error::contract(format!(
                "counts have dimension {}, law has {}",
                counts.dim(),
                law.dim()
            )));
        }
        let c = counts.counts().to_vec();
        // The last record contributes at most one per coordinate.
        let bounds = Bounds {
            upper: &c,
            need: c.iter().map(|&x| x.saturating_sub(1)).collect(),
        };
        let layer = convolve(law, counts.n() - 1, &bounds);

        let mut terms = Vec::new();
        let mut scaled = 0.0;
        let mut rest = vec![0u32; c.len()];
        'outcome: for (v, q) in law.outcomes() {
            for j in 0..c.len() {
                let b = u32::from(v.bits()[j]);
                if b > c[j] {
                    continue 'outcome;
                }
                rest[j] = c[j] - b;
            }
            let p = layer.scaled(&rest);
            if p > 0.0 {
                scaled += p * q;
                terms.push(p.ln() + q.ln());
            }
        }
        let log_denominator = log_sum_exp(&terms) + layer.log_scale();
        if log_denominator == f64::NEG_INFINITY {
            return Err(Error::ImpossibleEvidence);
        }
        Ok(PosteriorEngine {
            law,
            counts: c,
            layer,
            scaled_denominator: (scaled.is_normal()).then_some(scaled),
            log_denominator,
        })
    }

    pub fn law(&self) -> &SupportDistribution {
        self.law
    }

    pub fn log_denominator(&self) -> f64 {
        self.log_denominator
    }

    pub fn ratio(&self, y: &EncodedVector) -> Result<PosteriorResult> {
        if y.dim() != self.counts.len() {
            return Err(Error::contract("target has the wrong dimension"));
        }
        let mut rest = Vec::with_capacity(self.counts.len());
        for (&c, &b) in self.counts.iter().zip(y.bits()) {
            let b = u32::from(b);
            if b > 1 {
                return Err(Error::contract("target bits must be 0 or 1"));
            }
            if b > c {
                return Ok(PosteriorResult::from_logs(
                    f64::NEG_INFINITY,
                    self.log_denominator,
                ));
            }
            rest.push(c - b);
        }
        let log_numerator = self.layer.log_prob(&rest);
        Ok(match self.scaled_denominator {
            Some(den) => PosteriorResult::from_parts(
                self.layer.scaled(&rest) / den,
                log_numerator,
                self.log_denominator,
            ),
            None => PosteriorResult::from_logs(log_numerator, self.log_denominator),
        })
    }
}

/// Posterior odds that `y` is IN, under the flip(0.5) prior.
pub fn posterior_ratio(
    bn: &BayesianNetwork,
    counts: &ReleasedCounts,
    y: &EncodedVector,
) -> Result<PosteriorResult> {
    bn.check_counts(counts)?;
    let law = bn.output_marginal_law()?;
    PosteriorEngine::new(&law, counts)?.ratio(y)
}

/// Same quantity as [`posterior_ratio`] by two independent calls to
/// [`sum_count_prob`], without the shared partial-sum table.
pub fn posterior_ratio_direct(
    law: &SupportDistribution,
    counts: &ReleasedCounts,
    y: &EncodedVector,
) -> Result<PosteriorResult> {
    let c: Vec<i64> = counts.counts().iter().map(|&x| i64::from(x)).collect();
    let rest: Vec<i64> = c
        .iter()
        .zip(y.bits())
        .map(|(&x, &b)| x - i64::from(b))
        .collect();
    let log_den = log_sum_count_prob(law, counts.n(), &c);
    if log_den == f64::NEG_INFINITY {
        return Err(Error::ImpossibleEvidence);
    }
    let log_num = log_sum_count_prob(law, counts.n() - 1, &rest);
    Ok(PosteriorResult::from_logs(log_num, log_den))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn check_closed_form_inputs(mu: &[f64], counts: &ReleasedCounts, y: &EncodedVector) -> Result<()> {
    if mu.len() != counts.dim() || y.dim() != counts.dim() {
        return Err(Error::contract(
            "μ, counts and target must share dimension d",
        ));
    }
    if let Some(j) = mu.iter().position(|&m| !(m > 0.0 && m < 1.0)) {
        return Err(Error::contract(format!(
            "μ[{j}] = {} is not in the open interval (0,1)",
            mu[j]
        )));
    }
    Ok(())
}

/// Closed form of the posterior odds on a product population, evaluated per
/// coordinate as `k/(nμ)` when `y_j = 1` and `(n−k)/(n(1−μ))` otherwise.
pub fn closed_form_product_log_ratio(
    mu: &[f64],
    counts: &ReleasedCounts,
    y: &EncodedVector,
) -> Result<f64> {
    check_closed_form_inputs(mu, counts, y)?;
    let n = f64::from(counts.n());
    let mut acc = 0.0;
    for ((&m, &c), &b) in mu.iter().zip(counts.counts()).zip(y.bits()) {
        let k = f64::from(c);
        let factor = if b == 1 {
            k / (n * m)
        } else {
            (n - k) / (n * (1.0 - m))
        };
        acc += factor.ln();
    }
    Ok(acc)
}

pub fn closed_form_product_ratio(
    mu: &[f64],
    counts: &ReleasedCounts,
    y: &EncodedVector,
) -> Result<f64> {
    closed_form_product_log_ratio(mu, counts, y).map(f64::exp)
}

/// `C(n, k)` as a float, exact for the small `n` used here.
pub fn binomial_coefficient(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc as f64
}

/// Binomial pmf `Bin(n, p)(k)` by the explicit formula.
pub fn binomial_pmf(n: u32, p: f64, k: i64) -> f64 {
    if k < 0 || k > i64::from(n) {
        return 0.0;
    }
    let k = k as u32;
    binomial_coefficient(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Algorithm-level oracle: enumerates every assignment of `n` independent
/// full-network instances and accumulates both branches' evidence directly.
pub fn brute_force_posterior(
    bn: &BayesianNetwork,
    counts: &ReleasedCounts,
    y: &EncodedVector,
) -> Result<PosteriorResult> {
    bn.check_counts(counts)?;
    if y.dim() != bn.dim() {
        return Err(Error::contract("target has the wrong dimension"));
    }
    let n = counts.n();
    let states = bn.joint_state_count();
    let total = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(states));
    match total {
        Some(t) if t <= BRUTE_FORCE_GUARD => {}
        _ => {
            return Err(Error::TooLarge {
                states: total.unwrap_or(u128::MAX),
                guard: BRUTE_FORCE_GUARD,
            })
        }
    }

    // Every full assignment, including zero-probability ones.
    let mut joint: Vec<(Vec<u32>, f64)> = Vec::new();
    let cards: Vec<usize> = bn.nodes().iter().map(|n| n.cardinality()).collect();
    let mut full = vec![0usize; cards.len()];
    loop {
        let record = crate::bn::Record(full.clone());
        let p = bn.joint_prob(&record)?;
        let bits = bn.encode_full(&record);
        joint.push((bits.bits().iter().map(|&b| u32::from(b)).collect(), p));
        if !odometer(&mut full, &cards) {
            break;
        }
    }

    let c = counts.counts();
    let d = c.len();
    let mut numerator = CompensatedSum::default();
    let mut denominator = CompensatedSum::default();
    let mut pick = vec![0usize; n as usize];
    let radix = vec![joint.len(); n as usize];
    let mut sum = vec![0u32; d];
    loop {
        let mut p = 1.0;
        sum.iter_mut().for_each(|s| *s = 0);
        for &i in &pick[..n as usize - 1] {
            p *= joint[i].1;
            for (s, b) in sum.iter_mut().zip(&joint[i].0) {
                *s += b;
            }
        }
        let last = &joint[pick[n as usize - 1]];
        p *= last.1;
        // IN: the target plus the first n−1 instances.
        if (0..d).all(|j| sum[j] + u32::from(y.bits()[j]) == c[j]) {
            numerator.add(p);
        }
        // OUT: all n instances.
        if (0..d).all(|j| sum[j] + last.0[j] == c[j]) {
            denominator.add(p);
        }
        if !odometer(&mut pick, &radix) {
            break;
        }
    }
    let (numerator, denominator) = (numerator.value(), denominator.value());
    if denominator == 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    Ok(PosteriorResult::from_parts(
        numerator / denominator,
        numerator.ln(),
        denominator.ln(),
    ))
}

/// Neumaier compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Advances a mixed-radix counter, last digit fastest. `false` on wrap.
fn odometer(digits: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::populations::{make_half_repeated, make_product};

    fn coin_law() -> SupportDistribution {
        SupportDistribution::new(
            1,
            vec![(EncodedVector(vec![0]), 0.5), (EncodedVector(vec![1]), 0.5)],
        )
        .unwrap()
    }

    #[test]
    fn binomial_at_one() {
        assert!((sum_count_prob(&coin_law(), 2, &[1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_sum() {
        assert_eq!(sum_count_prob(&coin_law(), 0, &[0]), 1.0);
        assert_eq!(sum_count_prob(&coin_law(), 0, &[1]), 0.0);
    }

    #[test]
    fn negative_target_is_zero() {
        assert_eq!(sum_count_prob(&coin_law(), 2, &[-1]), 0.0);
    }

    #[test]
    fn single_composition() {
        let law = make_product(&[0.5, 0.5])
            .unwrap()
            .output_marginal_law()
            .unwrap();
        assert!((sum_count_prob(&law, 2, &[2, 0]) - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn fair_coin_ratio_is_two() {
        let bn = make_product(&[0.5]).unwrap();
        let c = ReleasedCounts::new(vec![2], 2).unwrap();
        let r = posterior_ratio(&bn, &c, &EncodedVector(vec![1])).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-12);
        assert!((r.posterior_in - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_target_gives_zero() {
        let bn = make_product(&[0.5]).unwrap();
        let c = ReleasedCounts::new(vec![0], 2).unwrap();
        let r = posterior_ratio(&bn, &c, &EncodedVector(vec![1])).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert_eq!(r.posterior_in, 0.0);
    }

    #[test]
    fn copy_violation_is_impossible_evidence() {
        let bn = make_half_repeated(3, &[0.5, 0.5]).unwrap();
        let c = ReleasedCounts::new(vec![1, 1, 0], 2).unwrap();
        let err = posterior_ratio(&bn, &c, &EncodedVector(vec![1, 1, 1])).unwrap_err();
        assert!(matches!(err, Error::ImpossibleEvidence));
    }

    #[test]
    fn closed_form_hand_value() {
        let c = ReleasedCounts::new(vec![3, 1], 4).unwrap();
        let r = closed_form_product_ratio(&[0.5, 0.5], &c, &EncodedVector(vec![1, 0])).unwrap();
        assert!((r - 2.25).abs() < 1e-12);
    }

    #[test]
    fn closed_form_identity_at_mean() {
        let c = ReleasedCounts::new(vec![1, 3], 4).unwrap();
        let r = closed_form_product_ratio(&[0.25, 0.75], &c, &EncodedVector(vec![1, 0])).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(closed_form_product_ratio(&[0.0, 0.5], &c, &EncodedVector(vec![1, 0])).is_err());
    }

    #[test]
    fn binomial_ratio_matches_closed_form() {
        // n = 5, μ = 0.3, k = 2, y_j = 1.
        let lhs = binomial_pmf(4, 0.3, 1) / binomial_pmf(5, 0.3, 2);
        let rhs = 2.0 / (5.0 * 0.3);
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn engine_matches_direct_route() {
        let bn = make_product(&[0.3, 0.6, 0.45]).unwrap();
        let law = bn.output_marginal_law().unwrap();
        let c = ReleasedCounts::new(vec![2, 1, 3], 3).unwrap();
        let engine = PosteriorEngine::new(&law, &c).unwrap();
        for (y, _) in law.outcomes() {
            let a = engine.ratio(y).unwrap();
            let b = posterior_ratio_direct(&law, &c, y).unwrap();
            assert!((a.ratio - b.ratio).abs() <= 1e-12 * b.ratio.max(1.0));
        }
    }

    #[test]
    fn vec_and_packed_paths_agree() {
        let law = make_product(&[0.2, 0.7, 0.5, 0.35])
            .unwrap()
            .output_marginal_law()
            .unwrap();
        let target = [2u32, 3, 1, 2];
        let bounds = Bounds {
            upper: &target,
            need: target.to_vec(),
        };
        let a = convolve_packed(&law, 3, &bounds, 3);
        let b = convolve_vec(&law, 3, &bounds);
        assert_eq!(a.entries.len(), b.entries.len());
        assert!((a.log_prob(&target) - b.log_prob(&target)).abs() < 1e-12);
    }

    #[test]
    fn brute_force_single_coin() {
        let bn = make_product(&[0.5]).unwrap();
        let c = ReleasedCounts::new(vec![2], 2).unwrap();
        let r = brute_force_posterior(&bn, &c, &EncodedVector(vec![1])).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn total_variation_of_identical_laws_is_zero() {
        let law = coin_law();
        assert_eq!(law.total_variation(&law), 0.0);
    }
}
