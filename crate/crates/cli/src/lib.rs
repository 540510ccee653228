//! Command-line front end for `rlc-core`.
//!
//! [`run`] parses an argument vector, computes the requested reports and
//! returns the exit code with the rendered output. Exit codes: 0 on success,
//! 1 on malformed input, 2 when a bound's hypotheses fail for the instance.

pub mod emit;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rlc_core::compound::{
    compound_poisson_pmf, geometric_bound_compound_geometric, geometric_bound_compound_poisson, yu_check,
    CompoundGeometricSpec, CompoundPoissonSpec,
};
use rlc_core::continuous::{
    builtin, exp_kolmogorov_bound, gamma_bound_case_i, gamma_case_ii_report, GammaParams, BUILTIN_NAMES,
};
use rlc_core::dist::{is_log_concave, DiscreteDist, DEFAULT_TAIL_BUDGET};
use rlc_core::intrinsic::{iv_ball, iv_box, iv_cube, poisson_iv_bound, product_report, IVSequence, ProductFactor};
use rlc_core::logconcave::LogConcavityCertificate;
use rlc_core::matroids::{
    mason_check, matroid_binomial_bound, matroid_poisson_bound, partition_half_report, profile_from_set_system,
    profile_partition, profile_uniform, uniform_rare_bound, IndepProfile, PartitionMatroidSpec, SetSystem,
};
use rlc_core::numeric::{biguint_to_f64, CERT_SLACK};
use rlc_core::relbound::{BoundReport, CertifyOptions, NamedBound, DOMINANCE_TOLERANCE};
use rlc_core::sums::{geometric_sum_bound, pb_binomial_report, pb_poisson_report, BernoulliVector};
use rlc_core::sweep::{run_sweep, Execution, Suite, SweepReport};
use rlc_core::Error;
use serde::{Deserialize, Serialize};

pub use emit::Format;

/// Output of every subcommand except `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub command: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    /// Independent-set counts `I(0), ..., I(n)` for matroid inputs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub certificates: BTreeMap<String, LogConcavityCertificate>,
    pub reports: BTreeMap<String, BoundReport>,
}

impl Record {
    fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            profile: Vec::new(),
            certificates: BTreeMap::new(),
            reports: BTreeMap::new(),
        }
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.into(), value);
        self
    }

    fn report(mut self, key: &str, r: BoundReport) -> Self {
        self.reports.insert(key.into(), r);
        self
    }

    /// No report carries a usable bound: every one failed its hypotheses.
    pub fn not_applicable(&self) -> bool {
        self.reports
            .values()
            .all(|r| r.reason.is_some() && r.best_bound().is_none())
    }
}

/// Error body printed on exit codes 1 and 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Parser)]
#[command(
    name = "rlc",
    version,
    about = "Total-variation bounds for relatively log-concave distributions"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Mass allowed to be dropped when truncating infinite families.
    #[arg(long, global = true, default_value_t = DEFAULT_TAIL_BUDGET)]
    tail_budget: f64,
    /// Absolute slack in the dominance verdict.
    #[arg(long, global = true, default_value_t = DOMINANCE_TOLERANCE)]
    tolerance: f64,
    /// Relative slack of float log-concavity certificates.
    #[arg(long, global = true, default_value_t = CERT_SLACK)]
    cert_slack: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

impl GlobalOpts {
    fn certify(&self) -> CertifyOptions {
        CertifyOptions {
            certificate_slack: self.cert_slack,
            dominance_tolerance: self.tolerance,
            ..CertifyOptions::default()
        }
    }
}

#[derive(Debug, Args)]
struct BernoulliArgs {
    /// Success probabilities, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required_unless_present = "input",
        allow_negative_numbers = true
    )]
    p: Vec<f64>,
    /// JSON file holding an array of success probabilities.
    #[arg(long, conflicts_with = "p")]
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Poisson-binomial law against its ratio-matched binomial.
    PbBinomial(BernoulliArgs),
    /// Poisson-binomial law against Poisson(lambda_n).
    PbPoisson(BernoulliArgs),
    /// Sum of independent log-concave variables against a geometric law.
    SumGeometric {
        /// One summand PMF on {0, 1, ...}, comma separated; repeatable.
        #[arg(long = "pmf", value_delimiter = ',', num_args = 1, action = clap::ArgAction::Append)]
        pmf: Vec<String>,
        /// JSON file with an array of PMFs (arrays of masses or distribution objects).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Independent-set counts of a matroid against binomial and Poisson laws.
    Matroid(MatroidArgs),
    /// Intrinsic-volume distribution of a convex body against a Poisson law.
    Iv(IvArgs),
    /// Compound laws against geometric targets.
    Compound {
        #[command(subcommand)]
        kind: CompoundKind,
    },
    /// Gamma against Gamma.
    Gamma {
        /// `shape,rate` of nu.
        #[arg(long)]
        a: GammaParams,
        /// `shape,rate` of mu.
        #[arg(long)]
        b: GammaParams,
        #[arg(long, value_parser = ["i", "ii"], default_value = "i")]
        case: String,
        /// Anchor for case (ii).
        #[arg(long)]
        z: Option<f64>,
    },
    /// Exponential approximation of a log-concave density in Kolmogorov distance.
    Expapprox {
        /// `builtin:<name>` with name one of exp, tilted, half-normal.
        #[arg(long)]
        density: String,
    },
    /// Randomized dominance sweep.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "dominance")]
        suite: String,
        #[arg(long, default_value_t = 500)]
        n: usize,
        /// Evaluate instances on one thread.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "matroid_source")]
struct MatroidSource {
    /// `n,r`: uniform matroid of rank r on n elements.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    uniform: Option<Vec<usize>>,
    /// `size:capacity,...` for a partition matroid.
    #[arg(long)]
    partition: Option<String>,
    /// JSON file with the independent sets as arrays of elements.
    #[arg(long)]
    sets: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MatroidArgs {
    #[command(flatten)]
    source: MatroidSource,
    /// Anchor cardinality.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Normalize nu over k >= 0 instead of k >= 1.
    #[arg(long)]
    include_empty: bool,
    /// Ground-set size for `--sets`; defaults to one past the largest element.
    #[arg(long)]
    n: Option<usize>,
    /// Epsilon of the uniform rare-independence bound.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "iv_body")]
struct IvBody {
    /// Box side lengths.
    #[arg(long = "box", value_delimiter = ',', num_args = 1)]
    sides: Option<Vec<f64>>,
    /// `n,s`: cube of side s in dimension n.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    cube: Option<Vec<f64>>,
    /// Unit ball in dimension n.
    #[arg(long)]
    ball: Option<usize>,
    /// JSON file with product factors.
    #[arg(long)]
    product: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IvArgs {
    #[command(flatten)]
    body: IvBody,
    /// Anchor index.
    #[arg(long, default_value_t = 0)]
    m: usize,
}

#[derive(Debug, Subcommand)]
enum CompoundKind {
    /// Compound Poisson with severity F.
    Poisson {
        #[arg(long)]
        lambda: f64,
        /// Severity masses F_0, F_1, ...
        #[arg(long, value_delimiter = ',', num_args = 1)]
        severity: Vec<f64>,
    },
    /// Compound geometric: N ~ count law, summands (1 - p) p^j.
    Geometric {
        /// JSON file with the count law.
        #[arg(long)]
        count: PathBuf,
        #[arg(long)]
        p: f64,
    },
}

/// A PMF in a JSON input: a bare array of weights starting at 0, or a
/// distribution object.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PmfInput {
    Masses(Vec<f64>),
    Dist {
        #[serde(default)]
        offset: i64,
        masses: Vec<f64>,
    },
}

impl PmfInput {
    fn build(self) -> rlc_core::Result<DiscreteDist> {
        match self {
            PmfInput::Masses(m) => DiscreteDist::new(0, m),
            PmfInput::Dist { offset, masses } => DiscreteDist::new(offset, masses),
        }
    }
}

/// Factor of a product body in a `--product` file.
#[derive(Debug, Deserialize)]
struct FactorInput {
    scale: f64,
    #[serde(flatten)]
    body: BodyInput,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BodyInput {
    Box(Vec<f64>),
    Cube(usize, f64),
    Ball(usize),
    /// Raw intrinsic volumes `V_0, ..., V_n`.
    V(Vec<f64>),
}

impl BodyInput {
    fn build(self) -> rlc_core::Result<IVSequence> {
        match self {
            BodyInput::Box(s) => iv_box(&s),
            BodyInput::Cube(n, s) => iv_cube(n, s),
            BodyInput::Ball(n) => iv_ball(n),
            BodyInput::V(v) => IVSequence::new(v),
        }
    }
}

enum Failure {
    Input(String),
    NotApplicable(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_not_applicable() {
            Failure::NotApplicable(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome = std::result::Result<Output, Failure>;

enum Output {
    Record(Record),
    Sweep(SweepReport),
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Input(format!("{t:?}: {e}")))
        })
        .collect()
}

fn bernoulli(args: &BernoulliArgs) -> std::result::Result<BernoulliVector, Failure> {
    let p = match &args.input {
        Some(path) => read_json::<Vec<f64>>(path)?,
        None => args.p.clone(),
    };
    Ok(BernoulliVector::new(p)?)
}

fn parse_partition(s: &str) -> std::result::Result<PartitionMatroidSpec, Failure> {
    let mut sizes = Vec::new();
    let mut caps = Vec::new();
    for block in s.split(',') {
        let (c, d) = block
            .split_once(':')
            .ok_or_else(|| Failure::Input(format!("{block:?} is not size:capacity")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Failure::Input(format!("{t:?}: {e}")))
        };
        sizes.push(parse(c)?);
        caps.push(parse(d)?);
    }
    Ok(PartitionMatroidSpec::new(sizes, caps)?)
}

fn profile_record(prof: &IndepProfile) -> Record {
    let mut rec = Record::new("matroid")
        .param("n", prof.n() as f64)
        .param("rank", prof.rank() as f64);
    rec.profile = prof.counts().iter().map(biguint_to_f64).collect();
    rec.certificates.insert("mason".into(), mason_check(prof));
    rec
}

fn matroid(args: &MatroidArgs, g: &GlobalOpts) -> Outcome {
    let opts = g.certify();
    let (prof, partition) = if let Some(u) = &args.source.uniform {
        let [n, r] = u[..] else {
            return Err(Failure::Input("--uniform takes n,r".into()));
        };
        (profile_uniform(n, r)?, None)
    } else if let Some(p) = &args.source.partition {
        let spec = parse_partition(p)?;
        (profile_partition(&spec), Some(spec))
    } else {
        let path = args.source.sets.as_ref().expect("clap enforces one source");
        let lists: Vec<Vec<usize>> = read_json(path)?;
        let sys = SetSystem::from_lists(args.n, &lists)?;
        sys.verify()?;
        (profile_from_set_system(&sys)?, None)
    };
    let mut rec = profile_record(&prof).param("m", args.m as f64);
    let zero = args.include_empty;
    rec = rec.report("binomial", matroid_binomial_bound(&prof, args.m, zero, &opts)?);
    rec = rec.report(
        "poisson",
        matroid_poisson_bound(&prof, args.m, zero, g.tail_budget, &opts)?,
    );
    if let Some(spec) = partition {
        match partition_half_report(&spec, &opts) {
            Ok(r) => rec = rec.report("partition_half", r),
            Err(e) if e.is_not_applicable() => {
                rec = rec.report(
                    "partition_half",
                    BoundReport::not_applicable(mason_check(&prof), e.to_string()),
                )
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let (Some(eps), Some(u)) = (args.eps, &args.source.uniform) {
        let mut r = BoundReport::empty(mason_check(&prof));
        r.push_bound(NamedBound::claimed(
            "uniform_rare",
            uniform_rare_bound(u[0], u[1], eps)?,
        ));
        rec = rec.param("eps", eps).report("uniform_rare", r);
    }
    Ok(Output::Record(rec))
}

fn iv(args: &IvArgs, g: &GlobalOpts) -> Outcome {
    let opts = g.certify();
    let b = &args.body;
    if let Some(path) = &b.product {
        let factors: Vec<FactorInput> = read_json(path)?;
        let factors = factors
            .into_iter()
            .map(|f| ProductFactor::new(f.scale, f.body.build()?))
            .collect::<rlc_core::Result<Vec<_>>>()?;
        let r = product_report(&factors, g.tail_budget, &opts)?;
        return Ok(Output::Record(
            Record::new("iv")
                .param("factors", factors.len() as f64)
                .report("product", r),
        ));
    }
    let (body, is_ball) = if let Some(s) = &b.sides {
        (iv_box(s)?, false)
    } else if let Some(c) = &b.cube {
        let [n, s] = c[..] else {
            return Err(Failure::Input("--cube takes n,s".into()));
        };
        if n < 0.0 || n.fract() != 0.0 {
            return Err(Failure::Input(format!(
                "cube dimension {n} is not a non-negative integer"
            )));
        }
        (iv_cube(n as usize, s)?, false)
    } else {
        (iv_ball(b.ball.expect("clap enforces one body"))?, true)
    };
    let mut report = poisson_iv_bound(&body, args.m, g.tail_budget, &opts)?;
    if is_ball && report.dominated != Some(true) {
        let reason = format!(
            "Poisson bound at m = {} does not dominate the oracle TV for the ball; hypothesis holds: {}",
            args.m, report.hypothesis.holds
        );
        let mut flagged = BoundReport::not_applicable(report.hypothesis.clone(), reason);
        flagged.oracle_tv = report.oracle_tv;
        flagged.details = std::mem::take(&mut report.details);
        report = flagged;
    }
    let rec = Record::new("iv")
        .param("n", body.n as f64)
        .param("m", args.m as f64)
        .param("w", body.w);
    Ok(Output::Record(rec.report("poisson_iv", report)))
}

fn compound(kind: &CompoundKind, g: &GlobalOpts) -> Outcome {
    let opts = g.certify();
    match kind {
        CompoundKind::Poisson { lambda, severity } => {
            let spec = CompoundPoissonSpec::from_masses(*lambda, severity)?;
            let yu = yu_check(&spec)?;
            let mut rec = Record::new("compound-poisson").param("lambda", *lambda);
            rec.certificates.insert("yu".into(), yu.clone());
            let pmf = compound_poisson_pmf(&spec, g.tail_budget)?;
            rec.certificates.insert("pmf_log_concave".into(), is_log_concave(&pmf)?);
            let report = match geometric_bound_compound_poisson(&spec, g.tail_budget, &opts) {
                Ok(r) => r,
                Err(e) if e.is_not_applicable() => BoundReport::not_applicable(yu, e.to_string()),
                Err(e) => return Err(e.into()),
            };
            Ok(Output::Record(rec.report("geometric", report)))
        }
        CompoundKind::Geometric { count, p } => {
            let count: PmfInput = read_json(count)?;
            let spec = CompoundGeometricSpec::new(count.build()?, *p)?;
            let report = geometric_bound_compound_geometric(&spec, g.tail_budget, &opts)?;
            Ok(Output::Record(
                Record::new("compound-geometric")
                    .param("p", *p)
                    .report("geometric", report),
            ))
        }
    }
}

fn gamma(a: &GammaParams, b: &GammaParams, case: &str, z: Option<f64>, g: &GlobalOpts) -> Outcome {
    let opts = g.certify();
    let rec = Record::new("gamma")
        .param("kappa_a", a.kappa())
        .param("lambda_a", a.lambda())
        .param("kappa_b", b.kappa())
        .param("lambda_b", b.lambda());
    let report = if case == "ii" {
        let z = z.ok_or_else(|| Failure::Input("--case ii needs --z".into()))?;
        gamma_case_ii_report(a, b, z, &opts)?
    } else {
        gamma_bound_case_i(a, b, &opts)?
    };
    Ok(Output::Record(rec.report(&format!("case_{case}"), report)))
}

fn expapprox(density: &str, g: &GlobalOpts) -> Outcome {
    let name = density
        .strip_prefix("builtin:")
        .ok_or_else(|| Failure::Input(format!("{density:?}: expected builtin:<name>")))?;
    if !BUILTIN_NAMES.contains(&name) {
        return Err(Failure::Input(format!(
            "unknown builtin {name:?}; known: {}",
            BUILTIN_NAMES.join(", ")
        )));
    }
    let d = builtin(name)?;
    let report = exp_kolmogorov_bound(&d, &g.certify())?;
    Ok(Output::Record(Record::new("expapprox").report(name, report)))
}

fn verify(suite: &str, n: usize, sequential: bool, g: &GlobalOpts) -> Outcome {
    let exec = if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let opts = g.certify();
    if suite == "all" {
        let mut merged: Option<SweepReport> = None;
        for s in Suite::ALL {
            let r = run_sweep(s, n, g.seed, exec, &opts)?;
            merged = Some(match merged {
                None => r,
                Some(mut m) => {
                    m.instances += r.instances;
                    m.dominance_passes += r.dominance_passes;
                    m.dominance_failures.extend(r.dominance_failures);
                    m.worst_slack = match (m.worst_slack, r.worst_slack) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                    m
                }
            });
        }
        return Ok(Output::Sweep(merged.expect("at least one suite")));
    }
    let s: Suite = suite.parse()?;
    Ok(Output::Sweep(run_sweep(s, n, g.seed, exec, &opts)?))
}

fn dispatch(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let opts = g.certify();
    match &cli.command {
        Command::PbBinomial(a) => {
            let bv = bernoulli(a)?;
            Ok(Output::Record(
                Record::new("pb-binomial")
                    .param("n", bv.n() as f64)
                    .report("binomial", pb_binomial_report(&bv, &opts)),
            ))
        }
        Command::PbPoisson(a) => {
            let bv = bernoulli(a)?;
            let r = pb_poisson_report(&bv, g.tail_budget, &opts)?;
            Ok(Output::Record(
                Record::new("pb-poisson").param("n", bv.n() as f64).report("poisson", r),
            ))
        }
        Command::SumGeometric { pmf, input } => {
            let mut xis = Vec::new();
            if let Some(path) = input {
                let list: Vec<PmfInput> = read_json(path)?;
                for p in list {
                    xis.push(p.build()?);
                }
            }
            for s in pmf {
                xis.push(DiscreteDist::new(0, parse_floats(s)?)?);
            }
            let r = geometric_sum_bound(&xis, g.tail_budget, &opts)?;
            Ok(Output::Record(
                Record::new("sum-geometric")
                    .param("n", xis.len() as f64)
                    .report("geometric", r),
            ))
        }
        Command::Matroid(a) => matroid(a, g),
        Command::Iv(a) => iv(a, g),
        Command::Compound { kind } => compound(kind, g),
        Command::Gamma { a, b, case, z } => gamma(a, b, case, *z, g),
        Command::Expapprox { density } => expapprox(density, g),
        Command::Verify { suite, n, sequential } => verify(suite, *n, *sequential, g),
    }
}

fn failure_text(kind: &str, message: String, format: Format) -> String {
    match format {
        Format::Json => {
            emit::canonical_json(&ErrorRecord {
                kind: kind.into(),
                message,
            }) + "\n"
        }
        _ => format!("{kind}: {message}\n"),
    }
}

/// Run the CLI on `argv` (including the program name). Returns the exit code
/// and the text for standard output.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let format = cli.global.format;
    match dispatch(&cli) {
        Ok(Output::Record(rec)) => {
            let code = if rec.not_applicable() { 2 } else { 0 };
            (code, emit::emit_record(&rec, format))
        }
        Ok(Output::Sweep(s)) => (0, emit::emit_sweep(&s, format)),
        Err(Failure::Input(m)) => (1, failure_text("invalid_input", m, format)),
        Err(Failure::NotApplicable(m)) => (2, failure_text("not_applicable", m, format)),
    }
}
