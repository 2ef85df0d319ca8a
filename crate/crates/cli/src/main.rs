use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use bayesmia::attacks::{bayes_score, inner_product_score, lrt_clipped_score, lrt_score};
use bayesmia::verify::verify_all;
use bayesmia::{
    bench_posterior, load_network, make_half_repeated, make_lr_repeated, make_product,
    run_experiment, AttackKind, AttackSpec, BayesianNetwork, ClipRange, EncodedVector, Encoding,
    ExperimentConfig, NetworkFormat, PopulationSpec, ProxyDataset, ReleasedCounts, Threat, ToyKind,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "bayesmia",
    version,
    about = "Membership inference on released marginals of Bayesian-network populations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample records from a network and write them as CSV.
    Sample(SampleArgs),
    /// Score one target against released counts.
    Attack(AttackArgs),
    /// Run repeated trials and report AUC per attack.
    Eval(EvalArgs),
    /// Run the numerical equivalence suites.
    Verify(VerifyArgs),
    /// Time the exact posterior on a set of networks.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Sexp,
    Bif,
}

impl From<FormatArg> for NetworkFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Sexp => NetworkFormat::Sexpr,
            FormatArg::Bif => NetworkFormat::Bif,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EncodingArg {
    OneHot,
    RawBinary,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::OneHot => Encoding::OneHot,
            EncodingArg::RawBinary => Encoding::RawBinary,
        }
    }
}

#[derive(Args, Debug)]
struct NetworkArgs {
    /// Builtin network name or path to a `.sexp`/`.bif` file.
    #[arg(long)]
    network: String,
    /// File format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Comma-separated output nodes (default: the network's own).
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
}

impl NetworkArgs {
    fn load(&self) -> Result<BayesianNetwork, CliError> {
        let bn = load_network(&self.network, self.format.map(Into::into))
            .with_context(|| format!("loading network `{}`", self.network))?;
        with_outputs(bn, self.outputs.as_deref(), self.encoding)
    }
}

fn with_outputs(
    bn: BayesianNetwork,
    outputs: Option<&[String]>,
    encoding: Option<EncodingArg>,
) -> Result<BayesianNetwork, CliError> {
    if outputs.is_none() && encoding.is_none() {
        return Ok(bn);
    }
    let outputs = outputs.map_or_else(|| bn.output_names(), <[String]>::to_vec);
    let encoding = encoding.map_or(bn.encoding(), Into::into);
    Ok(bn
        .with_outputs(&outputs, encoding)
        .context("selecting outputs")?)
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Number of records.
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AttackArgs {
    #[command(flatten)]
    net: NetworkArgs,
    /// Comma-separated released counts, one per attribute.
    #[arg(long, value_delimiter = ',', required = true)]
    counts: Vec<u32>,
    /// Records in the private dataset.
    #[arg(long)]
    n: u32,
    /// Comma-separated target bits.
    #[arg(long, value_delimiter = ',', required = true)]
    target: Vec<u8>,
    /// lrt, lrt_clipped, inner_product or bayes.
    #[arg(long, default_value = "bayes")]
    attack: String,
    /// First attribute (1-based) kept by lrt_clipped.
    #[arg(long)]
    clip_lo: Option<usize>,
    /// Last attribute (1-based) kept by lrt_clipped.
    #[arg(long)]
    clip_hi: Option<usize>,
    /// Decision threshold; IN iff the score is strictly greater.
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ThreatArg {
    Strong,
    Weak,
    Weakest,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Builtin network, network file, or `product:D`, `half:D`, `lr:D`.
    #[arg(long)]
    population: String,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
    /// Records per private dataset.
    #[arg(long, default_value_t = 4)]
    n: u32,
    #[arg(long, default_value_t = 40)]
    trials: usize,
    #[arg(long, default_value_t = 20)]
    targets_in: usize,
    #[arg(long, default_value_t = 20)]
    targets_out: usize,
    #[arg(long, value_enum, default_value_t = ThreatArg::Strong)]
    threat: ThreatArg,
    /// Proxy records for the weak and weakest threats.
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated attacks: lrt, inner_product, bayes, lrt_clipped_half,
    /// lrt_clipped_side, lrt_clipped_flip, or lrt_clipped:LO-HI.
    #[arg(long, value_delimiter = ',', default_value = "lrt,inner_product,bayes")]
    attacks: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Additive smoothing for learned attacker networks.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Per-trial AUC CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary CSV (default: printed to stdout).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated builtin names, files, or `product:D`, `half:D`, `lr:D`.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "product:10,half:10,lr:10,cancer,earthquake,asia,survey,sachs-path-left"
    )]
    networks: Vec<String>,
    #[arg(long, default_value_t = 4)]
    n: u32,
    #[arg(long, default_value_t = 20)]
    datasets: usize,
    #[arg(long, default_value_t = 40)]
    targets: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<bayesmia::Error> for CliError {
    fn from(e: bayesmia::Error) -> Self {
        CliError::Data(e.into())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sample(args: SampleArgs) -> Result<(), CliError> {
    use rand::SeedableRng;
    let bn = args.net.load()?;
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let records = (0..args.n).map(|_| bn.sample(&mut rng)).collect();
    let proxy = ProxyDataset::from_network(&bn, records)?;
    proxy.write_csv(output(args.out.as_deref())?)?;
    Ok(())
}

fn attack(args: AttackArgs) -> Result<(), CliError> {
    let kind: AttackKind = args
        .attack
        .parse()
        .map_err(|e: bayesmia::Error| usage(e.to_string()))?;
    let bn = args.net.load()?;
    let d = bn.dim();
    if args.counts.len() != d || args.target.len() != d {
        return Err(usage(format!(
            "network has d = {d} attributes; got {} counts and {} target bits",
            args.counts.len(),
            args.target.len()
        )));
    }
    let counts = ReleasedCounts::new(args.counts, args.n)?;
    let y = EncodedVector(args.target);
    let score = match kind {
        AttackKind::Bayes => bayes_score(&bn, &counts, &y)?,
        AttackKind::InnerProduct => inner_product_score(&bn.attribute_marginals()?, &counts, &y)?,
        AttackKind::Lrt => lrt_score(&bn.attribute_marginals()?, &counts, &y)?,
        AttackKind::LrtClipped => {
            let lo = args.clip_lo.unwrap_or(1);
            let hi = args.clip_hi.unwrap_or(d);
            let range = ClipRange::new(lo, hi, d).map_err(|e| usage(e.to_string()))?;
            lrt_clipped_score(&bn.attribute_marginals()?, &counts, &y, range)?
        }
    };
    let label = match bayesmia::decide(&score, args.threshold) {
        bayesmia::Label::In => "IN",
        bayesmia::Label::Out => "OUT",
    };
    println!(
        "attack={} score={} decision={label}",
        score.kind, score.value
    );
    Ok(())
}

fn parse_toy(spec: &str) -> Result<Option<(ToyKind, usize)>, CliError> {
    let Some((kind, d)) = spec.split_once(':') else {
        return Ok(None);
    };
    let kind = match kind {
        "product" => ToyKind::Product,
        "half" => ToyKind::HalfRepeated,
        "lr" => ToyKind::LrRepeated,
        _ => return Ok(None),
    };
    let d: usize = d
        .parse()
        .ok()
        .filter(|&d| d >= 1)
        .ok_or_else(|| usage(format!("bad dimension in `{spec}`")))?;
    Ok(Some((kind, d)))
}

fn parse_attack(s: &str) -> Result<AttackSpec, CliError> {
    Ok(match s {
        "lrt" => AttackSpec::Lrt,
        "inner_product" | "ip" => AttackSpec::InnerProduct,
        "bayes" => AttackSpec::Bayes,
        "lrt_clipped_half" => AttackSpec::LrtClippedHalf,
        "lrt_clipped_side" => AttackSpec::LrtClippedSide,
        "lrt_clipped_flip" => AttackSpec::LrtClippedFlip,
        other => {
            let range = other
                .strip_prefix("lrt_clipped:")
                .and_then(|r| r.split_once('-'))
                .and_then(|(lo, hi)| Some((lo.parse().ok()?, hi.parse().ok()?)))
                .ok_or_else(|| usage(format!("unknown attack `{other}`")))?;
            // Checked against d once the population is known.
            AttackSpec::LrtClipped(
                ClipRange::new(range.0, range.1, range.1).map_err(|e| usage(e.to_string()))?,
            )
        }
    })
}

fn eval(args: EvalArgs) -> Result<(), CliError> {
    let attacks = args
        .attacks
        .iter()
        .map(|a| parse_attack(a))
        .collect::<Result<Vec<_>, _>>()?;
    let threat = match (args.threat, args.m) {
        (ThreatArg::Strong, _) => Threat::Strong,
        (ThreatArg::Weak, Some(m)) => Threat::Weak(m),
        (ThreatArg::Weakest, Some(m)) => Threat::Weakest(m),
        (_, None) => return Err(usage("--m is required for the weak and weakest threats")),
    };
    let (name, population) = match parse_toy(&args.population)? {
        Some((kind, d)) => (
            args.population.replace(':', "-"),
            PopulationSpec::Toy { kind, d },
        ),
        None => {
            let bn = load_network(&args.population, args.format.map(Into::into))
                .with_context(|| format!("loading network `{}`", args.population))?;
            let bn = with_outputs(bn, args.outputs.as_deref(), args.encoding)?;
            let name = Path::new(&args.population)
                .file_stem()
                .map_or(args.population.clone(), |s| {
                    s.to_string_lossy().into_owned()
                });
            (name, PopulationSpec::Fixed(bn))
        }
    };
    let d = population.dim();
    if let Some(AttackSpec::LrtClipped(r)) = attacks
        .iter()
        .find(|a| matches!(a, AttackSpec::LrtClipped(r) if r.hi() > d))
    {
        return Err(usage(format!("clip range {r} exceeds d = {d}")));
    }
    let mut config = ExperimentConfig::new(name, population, args.n);
    config.trials = args.trials;
    config.targets_in = args.targets_in;
    config.targets_out = args.targets_out;
    config.threat = threat;
    config.attacks = attacks;
    config.seed = args.seed;
    config.alpha = args.alpha;
    config.validate().map_err(|e| usage(e.to_string()))?;

    let report = run_experiment(&config)?;
    if let Some(path) = &args.out {
        report.write_trials_csv(output(Some(path))?)?;
    }
    report.write_summary_csv(output(args.summary.as_deref())?)?;
    for row in &report.summary {
        if row.impossible_trials > 0 {
            eprintln!(
                "note: {} trials of {} had counts impossible under the attacker's model",
                row.impossible_trials, row.attack
            );
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let report = verify_all(args.seed)?;
    for suite in &report.suites {
        println!("{suite}");
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Verification(
            "one or more suites exceeded tolerance".into(),
        ))
    }
}

fn bench_network(spec: &str) -> Result<BayesianNetwork, CliError> {
    match parse_toy(spec)? {
        Some((ToyKind::Product, d)) => Ok(make_product(&vec![0.5; d])?),
        Some((ToyKind::HalfRepeated, d)) => Ok(make_half_repeated(d, &vec![0.5; d / 2 + 1])?),
        Some((ToyKind::LrRepeated, d)) => {
            let p = vec![0.5; d / 2 + 1];
            Ok(make_lr_repeated(d, &p, &p)?)
        }
        None => Ok(load_network(spec, None).with_context(|| format!("loading network `{spec}`"))?),
    }
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let mut out = output(None)?;
    writeln!(out, "{}", bayesmia::BenchRow::csv_header())?;
    for spec in &args.networks {
        let bn = bench_network(spec)?;
        let row = bench_posterior(spec, &bn, args.n, args.datasets, args.targets, args.seed)?;
        writeln!(out, "{}", row.csv_line())?;
        out.flush()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(a) => sample(a),
        Command::Attack(a) => attack(a),
        Command::Eval(a) => eval(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}
