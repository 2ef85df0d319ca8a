//! Trial orchestration, ROC/AUC and timing.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attacks::{
    bayes_score_with, choose_side, inner_product_score, lrt_clipped_score, lrt_score, ClipRange,
};
use crate::bn::{BayesianNetwork, Dataset, EncodedVector, Record, ReleasedCounts};
use crate::error::{Error, Result};
use crate::inference::{posterior_ratio, PosteriorEngine};
use crate::learning::{chow_liu_fit, empirical_marginals, mle_fit, ProxyDataset};
use crate::populations::{make_half_repeated, make_lr_repeated, make_product, mid, ToyKind};

/// Where each trial's population comes from.
#[derive(Debug, Clone)]
pub enum PopulationSpec {
    /// The same network in every trial.
    Fixed(BayesianNetwork),
    /// A toy population over `d` attributes with fresh parameters drawn
    /// uniformly from `[0.2, 0.8]` in every trial.
    Toy { kind: ToyKind, d: usize },
}

impl PopulationSpec {
    pub fn dim(&self) -> usize {
        match self {
            PopulationSpec::Fixed(bn) => bn.dim(),
            PopulationSpec::Toy { d, .. } => *d,
        }
    }

    fn instantiate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BayesianNetwork> {
        let mut draw =
            |k: usize| -> Vec<f64> { (0..k).map(|_| rng.random_range(0.2..0.8)).collect() };
        match self {
            PopulationSpec::Fixed(bn) => Ok(bn.clone()),
            PopulationSpec::Toy { kind, d } => match kind {
                ToyKind::Product => make_product(&draw(*d)),
                ToyKind::HalfRepeated => make_half_repeated(*d, &draw(mid(*d))),
                ToyKind::LrRepeated => {
                    let right = draw(mid(*d));
                    let left = draw(mid(*d));
                    make_lr_repeated(*d, &right, &left)
                }
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Threat {
    /// The attacker knows the population network.
    Strong,
    /// Known structure, parameters fitted to `m` proxy records.
    Weak(usize),
    /// Structure and parameters learned from `m` proxy records.
    Weakest(usize),
}

impl Threat {
    pub fn name(&self) -> &'static str {
        match self {
            Threat::Strong => "strong",
            Threat::Weak(_) => "weak",
            Threat::Weakest(_) => "weakest",
        }
    }

    pub fn proxy_size(&self) -> Option<usize> {
        match self {
            Threat::Strong => None,
            Threat::Weak(m) | Threat::Weakest(m) => Some(*m),
        }
    }
}

/// A configured attack. The side-dependent clips pick their range per trial
/// from the released counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackSpec {
    Lrt,
    LrtClipped(ClipRange),
    /// Half-repeated clip `1..mid`.
    LrtClippedHalf,
    /// Clip for the side suggested by the counts (ambiguous → right).
    LrtClippedSide,
    /// Clip for the opposite side.
    LrtClippedFlip,
    InnerProduct,
    Bayes,
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackSpec::Lrt => f.write_str("lrt"),
            AttackSpec::LrtClipped(r) => write!(f, "lrt_clipped[{r}]"),
            AttackSpec::LrtClippedHalf => f.write_str("lrt_clipped_half"),
            AttackSpec::LrtClippedSide => f.write_str("lrt_clipped_side"),
            AttackSpec::LrtClippedFlip => f.write_str("lrt_clipped_flip"),
            AttackSpec::InnerProduct => f.write_str("inner_product"),
            AttackSpec::Bayes => f.write_str("bayes"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Label written to the CSV `population` column.
    pub name: String,
    pub population: PopulationSpec,
    pub n: u32,
    pub trials: usize,
    pub targets_in: usize,
    pub targets_out: usize,
    pub threat: Threat,
    pub attacks: Vec<AttackSpec>,
    pub seed: u64,
    /// Smoothing for learned attacker networks.
    pub alpha: f64,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, population: PopulationSpec, n: u32) -> Self {
        ExperimentConfig {
            name: name.into(),
            population,
            n,
            trials: 40,
            targets_in: 20,
            targets_out: 20,
            threat: Threat::Strong,
            attacks: vec![AttackSpec::Lrt, AttackSpec::InnerProduct, AttackSpec::Bayes],
            seed: 0,
            alpha: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.trials == 0 || self.targets_in == 0 || self.targets_out == 0 {
            return Err(Error::contract(
                "n, trials and target counts must all be at least 1",
            ));
        }
        if self.attacks.is_empty() {
            return Err(Error::contract("no attacks configured"));
        }
        if self.threat.proxy_size() == Some(0) {
            return Err(Error::contract("proxy size m must be at least 1"));
        }
        Ok(())
    }
}

/// Independent random streams within a trial.
#[derive(Debug, Clone, Copy)]
enum Purpose {
    Population = 1,
    Dataset = 2,
    TargetsIn = 3,
    TargetsOut = 4,
    Proxy = 5,
}

fn stream(seed: u64, trial: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 8) | purpose as u64);
    rng
}

/// Scores of one attack in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackScores {
    pub attack: AttackSpec,
    pub scores_in: Vec<f64>,
    pub scores_out: Vec<f64>,
    /// The attacker's model gave the released counts probability zero; all
    /// scores are `-inf`.
    pub impossible_evidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: u64,
    pub counts: ReleasedCounts,
    pub attacks: Vec<AttackScores>,
}

struct Attacker {
    bn: BayesianNetwork,
    mu: Vec<f64>,
}

fn attacker_model(
    config: &ExperimentConfig,
    population: &BayesianNetwork,
    trial: u64,
) -> Result<Attacker> {
    let Some(m) = config.threat.proxy_size() else {
        return Ok(Attacker {
            bn: population.clone(),
            mu: population.attribute_marginals()?,
        });
    };
    let mut rng = stream(config.seed, trial, Purpose::Proxy);
    let records = (0..m).map(|_| population.sample(&mut rng)).collect();
    let proxy = ProxyDataset::from_network(population, records)?;
    let outputs = population.output_names();
    let encoding = population.encoding();
    let mu = empirical_marginals(&proxy, &outputs, encoding)?;
    let bn = match config.threat {
        Threat::Weak(_) => mle_fit(population, &proxy, config.alpha)?,
        _ => chow_liu_fit(&proxy, config.alpha, &outputs, encoding)?,
    };
    Ok(Attacker { bn, mu })
}

/// One trial: sample the private dataset, release its counts, draw IN and
/// OUT targets, and score every target under every configured attack.
pub fn run_trial(config: &ExperimentConfig, trial: u64) -> Result<TrialResult> {
    config.validate()?;
    let population =
        config
            .population
            .instantiate(&mut stream(config.seed, trial, Purpose::Population))?;

    let mut rng = stream(config.seed, trial, Purpose::Dataset);
    let private: Vec<Record> = (0..config.n)
        .map(|_| population.project(&population.sample(&mut rng)))
        .collect();
    let dataset = Dataset::new(private)?;
    let counts = population.dataset_counts(&dataset)?;

    let mut rng = stream(config.seed, trial, Purpose::TargetsIn);
    let targets_in: Vec<EncodedVector> = (0..config.targets_in)
        .map(|_| {
            let pick = rng.random_range(0..dataset.len());
            population.encode(&dataset.records()[pick])
        })
        .collect::<Result<_>>()?;
    let mut rng = stream(config.seed, trial, Purpose::TargetsOut);
    let targets_out: Vec<EncodedVector> = (0..config.targets_out)
        .map(|_| population.encode(&population.project(&population.sample(&mut rng))))
        .collect::<Result<_>>()?;

    let attacker = attacker_model(config, &population, trial)?;
    let d = population.dim();

    let mut law = None;
    let mut results = Vec::with_capacity(config.attacks.len());
    for &attack in &config.attacks {
        let score_all =
            |f: &dyn Fn(&EncodedVector) -> Result<f64>| -> Result<(Vec<f64>, Vec<f64>)> {
                Ok((
                    targets_in.iter().map(f).collect::<Result<_>>()?,
                    targets_out.iter().map(f).collect::<Result<_>>()?,
                ))
            };
        let mu = &attacker.mu;
        let clipped =
            |range: ClipRange| score_all(&|y| Ok(lrt_clipped_score(mu, &counts, y, range)?.value));
        let side = || -> Result<crate::populations::Side> {
            Ok(choose_side(counts.counts(), d)?.resolve())
        };
        let mut impossible = false;
        let (scores_in, scores_out) = match attack {
            AttackSpec::Lrt => score_all(&|y| Ok(lrt_score(mu, &counts, y)?.value))?,
            AttackSpec::LrtClipped(range) => clipped(range)?,
            AttackSpec::LrtClippedHalf => clipped(ClipRange::half_repeated(d))?,
            AttackSpec::LrtClippedSide => clipped(ClipRange::for_side(side()?, d))?,
            AttackSpec::LrtClippedFlip => clipped(ClipRange::for_side(side()?.flipped(), d))?,
            AttackSpec::InnerProduct => {
                score_all(&|y| Ok(inner_product_score(mu, &counts, y)?.value))?
            }
            AttackSpec::Bayes => {
                if law.is_none() {
                    law = Some(attacker.bn.output_marginal_law()?);
                }
                let law = law.as_ref().expect("law computed above");
                match PosteriorEngine::new(law, &counts) {
                    Ok(engine) => score_all(&|y| Ok(bayes_score_with(&engine, y)?.value))?,
                    Err(Error::ImpossibleEvidence) => {
                        impossible = true;
                        (
                            vec![f64::NEG_INFINITY; targets_in.len()],
                            vec![f64::NEG_INFINITY; targets_out.len()],
                        )
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        results.push(AttackScores {
            attack,
            scores_in,
            scores_out,
            impossible_evidence: impossible,
        });
    }
    Ok(TrialResult {
        trial,
        counts,
        attacks: results,
    })
}

/// ROC points from the highest threshold to the lowest, and the area under
/// the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RocResult {
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Pair-count AUC (ties count one half) and the ROC swept over every
/// distinct score.
pub fn roc_and_auc(scores_in: &[f64], scores_out: &[f64]) -> Result<RocResult> {
    if scores_in.is_empty() || scores_out.is_empty() {
        return Err(Error::contract("both score lists must be nonempty"));
    }
    if scores_in.iter().chain(scores_out).any(|s| s.is_nan()) {
        return Err(Error::contract("scores must not be NaN"));
    }
    let mut sorted_in = scores_in.to_vec();
    let mut sorted_out = scores_out.to_vec();
    sorted_in.sort_by(f64::total_cmp);
    sorted_out.sort_by(f64::total_cmp);

    // Twice the number of correctly ordered pairs, ties counting once.
    let mut twice: u64 = 0;
    for &s in &sorted_in {
        let below = sorted_out.partition_point(|&o| o < s) as u64;
        let not_above = sorted_out.partition_point(|&o| o <= s) as u64;
        twice += 2 * below + (not_above - below);
    }
    let pairs = (scores_in.len() * scores_out.len()) as f64;
    let auc = twice as f64 / (2.0 * pairs);

    let mut thresholds: Vec<f64> = sorted_in.iter().chain(&sorted_out).copied().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let (ni, no) = (scores_in.len() as f64, scores_out.len() as f64);
    let mut points = vec![(0.0, 0.0)];
    for t in thresholds {
        let tp = sorted_in.len() - sorted_in.partition_point(|&s| s < t);
        let fp = sorted_out.len() - sorted_out.partition_point(|&s| s < t);
        points.push((fp as f64 / no, tp as f64 / ni));
    }
    Ok(RocResult { points, auc })
}

/// Trapezoidal area under a ROC curve.
pub fn trapezoid_area(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialAuc {
    pub attack: AttackSpec,
    pub trial: u64,
    pub auc: f64,
    pub impossible_evidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub attack: AttackSpec,
    pub mean_auc: f64,
    /// Population standard deviation over per-trial AUCs.
    pub std_auc: f64,
    pub trials: usize,
    pub impossible_trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub d: usize,
    pub n: u32,
    pub threat: Threat,
    pub trials: Vec<TrialAuc>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentReport {
    pub fn mean_auc(&self, attack: AttackSpec) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| r.attack == attack)
            .map(|r| r.mean_auc)
    }

    fn prefix(&self) -> [String; 5] {
        [
            self.name.clone(),
            self.d.to_string(),
            self.n.to_string(),
            self.threat.name().to_string(),
            self.threat
                .proxy_size()
                .map_or(String::new(), |m| m.to_string()),
        ]
    }

    /// `population,d,n,threat,m,attack,trial,auc`
    pub fn write_trials_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "population",
            "d",
            "n",
            "threat",
            "m",
            "attack",
            "trial",
            "auc",
        ])?;
        for row in &self.trials {
            let mut rec = self.prefix().to_vec();
            rec.extend([
                row.attack.to_string(),
                row.trial.to_string(),
                row.auc.to_string(),
            ]);
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `population,d,n,threat,m,attack,mean_auc,std_auc,trials`
    pub fn write_summary_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "population",
            "d",
            "n",
            "threat",
            "m",
            "attack",
            "mean_auc",
            "std_auc",
            "trials",
        ])?;
        for row in &self.summary {
            let mut rec = self.prefix().to_vec();
            rec.extend([
                row.attack.to_string(),
                row.mean_auc.to_string(),
                row.std_auc.to_string(),
                row.trials.to_string(),
            ]);
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs every trial on the worker pool and summarizes AUCs per attack.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut results: Vec<TrialResult> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect::<Result<_>>()?;
    results.sort_by_key(|r| r.trial);

    let mut trials = Vec::new();
    for r in &results {
        for a in &r.attacks {
            trials.push(TrialAuc {
                attack: a.attack,
                trial: r.trial,
                auc: roc_and_auc(&a.scores_in, &a.scores_out)?.auc,
                impossible_evidence: a.impossible_evidence,
            });
        }
    }
    let summary = config
        .attacks
        .iter()
        .map(|&attack| {
            let rows: Vec<&TrialAuc> = trials.iter().filter(|t| t.attack == attack).collect();
            let k = rows.len() as f64;
            let mean = rows.iter().map(|t| t.auc).sum::<f64>() / k;
            let var = rows.iter().map(|t| (t.auc - mean).powi(2)).sum::<f64>() / k;
            SummaryRow {
                attack,
                mean_auc: mean,
                std_auc: var.sqrt(),
                trials: rows.len(),
                impossible_trials: rows.iter().filter(|t| t.impossible_evidence).count(),
            }
        })
        .collect();
    Ok(ExperimentReport {
        name: config.name.clone(),
        d: config.population.dim(),
        n: config.n,
        threat: config.threat,
        trials,
        summary,
    })
}

/// One timing row: network size and mean seconds per posterior call.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub nodes: usize,
    pub params: usize,
    pub output_nodes: usize,
    pub output_params: usize,
    pub d: usize,
    pub n: u32,
    pub calls: usize,
    pub mean_seconds: f64,
}

impl BenchRow {
    pub fn csv_header() -> &'static str {
        "network,nodes,params,output_nodes,output_params,d,n,calls,mean_seconds"
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.name,
            self.nodes,
            self.params,
            self.output_nodes,
            self.output_params,
            self.d,
            self.n,
            self.calls,
            self.mean_seconds
        )
    }
}

/// Mean wall-clock time of [`posterior_ratio`] over `datasets` sampled
/// releases and `targets` targets each, half IN and half OUT.
pub fn bench_posterior(
    name: &str,
    bn: &BayesianNetwork,
    n: u32,
    datasets: usize,
    targets: usize,
    seed: u64,
) -> Result<BenchRow> {
    if n == 0 || datasets == 0 || targets == 0 {
        return Err(Error::contract(
            "n, datasets and targets must be at least 1",
        ));
    }
    let mut total = 0.0;
    let mut calls = 0;
    for t in 0..datasets as u64 {
        let mut rng = stream(seed, t, Purpose::Dataset);
        let records: Vec<Record> = (0..n).map(|_| bn.project(&bn.sample(&mut rng))).collect();
        let ds = Dataset::new(records)?;
        let counts = bn.dataset_counts(&ds)?;
        let mut rng = stream(seed, t, Purpose::TargetsOut);
        for k in 0..targets {
            let y = if k % 2 == 0 {
                bn.encode(&ds.records()[rng.random_range(0..ds.len())])?
            } else {
                bn.encode(&bn.project(&bn.sample(&mut rng)))?
            };
            let start = Instant::now();
            let r = posterior_ratio(bn, &counts, &y)?;
            total += start.elapsed().as_secs_f64();
            std::hint::black_box(r);
            calls += 1;
        }
    }
    Ok(BenchRow {
        name: name.to_string(),
        nodes: bn.node_count(),
        params: bn.param_count(),
        output_nodes: bn.outputs().len(),
        output_params: bn.output_param_count(),
        d: bn.dim(),
        n,
        calls,
        mean_seconds: total / calls as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_hand_cases() {
        assert_eq!(roc_and_auc(&[1.0, 1.0], &[0.0, 0.0]).unwrap().auc, 1.0);
        assert_eq!(roc_and_auc(&[0.3, 0.7], &[0.7, 0.3]).unwrap().auc, 0.5);
        assert_eq!(roc_and_auc(&[0.9, 0.4], &[0.6, 0.1]).unwrap().auc, 0.75);
        assert!(roc_and_auc(&[], &[1.0]).is_err());
        assert!(roc_and_auc(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn roc_endpoints_and_trapezoid() {
        let r = roc_and_auc(&[0.9, 0.4, f64::NEG_INFINITY], &[0.6, 0.1, 0.4]).unwrap();
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
        assert!((trapezoid_area(&r.points) - r.auc).abs() < 1e-12);
        assert!(r
            .points
            .windows(2)
            .all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
    }

    fn toy(kind: ToyKind, d: usize, n: u32) -> ExperimentConfig {
        let mut c = ExperimentConfig::new("toy", PopulationSpec::Toy { kind, d }, n);
        c.trials = 3;
        c.targets_in = 5;
        c.targets_out = 5;
        c.seed = 11;
        c
    }

    #[test]
    fn trials_are_deterministic() {
        let c = toy(ToyKind::HalfRepeated, 5, 3);
        assert_eq!(run_trial(&c, 2).unwrap(), run_trial(&c, 2).unwrap());
        assert_ne!(
            run_trial(&c, 1).unwrap().counts,
            run_trial(&c, 2).unwrap().counts
        );
    }

    #[test]
    fn adding_attacks_keeps_the_data() {
        let mut c = toy(ToyKind::LrRepeated, 6, 3);
        let a = run_trial(&c, 0).unwrap();
        c.attacks.push(AttackSpec::LrtClippedSide);
        let b = run_trial(&c, 0).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.attacks[..], b.attacks[..a.attacks.len()]);
    }

    #[test]
    fn strong_bayes_matches_lrt_on_product() {
        let c = toy(ToyKind::Product, 4, 3);
        let r = run_trial(&c, 0).unwrap();
        let lrt = &r.attacks[0];
        let bayes = &r.attacks[2];
        for (a, b) in lrt.scores_in.iter().zip(&bayes.scores_in) {
            assert!(a == b || (a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn single_record_in_target_is_certain() {
        // With n = 1 the IN target is the released record: R = 1/P(y).
        let c = toy(ToyKind::Product, 3, 1);
        let r = run_trial(&c, 0).unwrap();
        let bayes = &r.attacks[2];
        assert!(bayes.scores_in.iter().all(|s| s.is_finite() && *s > 0.0));
        let auc = roc_and_auc(&bayes.scores_in, &bayes.scores_out)
            .unwrap()
            .auc;
        assert!(auc > 0.5);
    }

    #[test]
    fn single_trial_std_is_zero() {
        let mut c = toy(ToyKind::Product, 3, 2);
        c.trials = 1;
        let rep = run_experiment(&c).unwrap();
        assert!(rep
            .summary
            .iter()
            .all(|r| r.std_auc == 0.0 && r.trials == 1));
    }

    #[test]
    fn csv_schemas() {
        let rep = run_experiment(&toy(ToyKind::Product, 2, 2)).unwrap();
        let mut buf = Vec::new();
        rep.write_trials_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(
            text.starts_with("population,d,n,threat,m,attack,trial,auc\ntoy,2,2,strong,,lrt,0,")
        );
        let mut buf = Vec::new();
        rep.write_summary_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("population,d,n,threat,m,attack,mean_auc,std_auc,trials\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn weak_threats_run() {
        let bn = crate::networks::builtin_network("cancer").unwrap();
        for threat in [Threat::Weak(10), Threat::Weakest(10)] {
            let mut c = ExperimentConfig::new("cancer", PopulationSpec::Fixed(bn.clone()), 3);
            c.trials = 2;
            c.threat = threat;
            let rep = run_experiment(&c).unwrap();
            assert_eq!(rep.summary.len(), 3);
        }
    }

    #[test]
    fn bench_rows() {
        let bn = make_product(&[0.5; 4]).unwrap();
        let row = bench_posterior("product", &bn, 3, 2, 4, 0).unwrap();
        assert_eq!(
            (row.nodes, row.params, row.output_nodes, row.output_params),
            (4, 4, 4, 4)
        );
        assert!(row.mean_seconds >= 0.0);
        assert_eq!(row.calls, 8);
    }
}
