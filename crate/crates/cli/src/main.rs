//! clusterforge — drive the partition/identity checks and the bounds engine
//! from the command line.
//!
//! Every command emits one report (JSON by default, `--format csv` for flat
//! tables) and exits with:
//!   0  all checks passed (or the command is purely informational),
//!   1  a verification failed; the report carries the offending cases,
//!   2  configuration or usage errors.
//!
//! A JSON run-configuration document (`--config run.json`) supplies defaults
//! for any flag; explicit flags win. Unknown keys in the document are errors,
//! not warnings. `--deterministic` pins execution to one worker; results are
//! designed to be byte-identical either way, this just makes timings
//! reproducible too. The CLUSTERFORGE_THREADS environment variable caps the
//! worker count without changing any output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use clusterforge::bounds::{self, BoundsReport, TreeShape};
use clusterforge::potentials::lookup_builtin;
use clusterforge::scheme::{verify_partition, WeightTable};
use clusterforge::ursell;
use clusterforge::{Configuration, PairPotential};

#[derive(Parser)]
#[command(name = "clusterforge", version, about = "cluster-expansion identities and convergence bounds")]
struct Cli {
    /// JSON run-configuration file; explicit flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// pin execution to a single worker
    #[arg(long, global = true)]
    deterministic: bool,
    /// report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// write the report to this file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustively check that minimum-spanning-tree intervals partition the
    /// connected graphs for sampled configurations
    VerifyPartition(PartitionArgs),
    /// Compare the direct connected-graph sum with the tree resummation
    VerifyIdentity(IdentityArgs),
    /// Coefficient-bound integrals and every convergence radius
    Radii(RadiiArgs),
    /// Evaluate sampled configurations all ways at once
    Ursell(UrsellArgs),
    /// Tabulate the virial optimization constant g(u) on a log grid
    Gfun(GfunArgs),
    /// Monte Carlo Mayer coefficient against its tree-graph bound
    #[command(name = "mayer-mc")]
    MayerMc(McArgs),
    /// Monte Carlo single-tree integral against |Λ|·Ĉ^{n−1}
    #[command(name = "lemma3")]
    Lemma3(Lemma3Args),
}

/// Flags shared by every command that needs a pair potential.
#[derive(Args, Clone)]
struct PotentialArgs {
    /// family: lennard-jones (alias lj), hard-sphere, square-well,
    /// inverse-power, zero
    #[arg(long)]
    potential: Option<String>,
    /// hard-core diameter (hard-sphere) or core radius (square-well)
    #[arg(long)]
    a: Option<f64>,
    /// well depth ε (square-well)
    #[arg(long)]
    depth: Option<f64>,
    /// outer range R (square-well)
    #[arg(long)]
    range: Option<f64>,
    /// exponent s (inverse-power)
    #[arg(long)]
    exponent: Option<f64>,
    /// stability constant B; required for square-well, override elsewhere
    #[arg(long)]
    stability: Option<f64>,
    /// ambient dimension, 1-3
    #[arg(long)]
    dimension: Option<usize>,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// cluster sizes to sweep (2-7)
    #[arg(long, value_delimiter = ',', action = ArgAction::Append)]
    n: Vec<usize>,
    /// random configurations per size
    #[arg(long)]
    configs: Option<u64>,
    /// base seed; each (n, config) pair gets its own stream
    #[arg(long)]
    seed: Option<u64>,
    /// half-width L of the sampling box [−L, L]^d
    #[arg(long = "box")]
    box_half_width: Option<f64>,
    /// accepted for interface symmetry; the edge weights that drive the
    /// partition are temperature-independent
    #[arg(long, value_delimiter = ',', action = ArgAction::Append)]
    beta: Vec<f64>,
}

#[derive(Args)]
struct IdentityArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// cluster sizes to sweep (2-7)
    #[arg(long, value_delimiter = ',', action = ArgAction::Append)]
    n: Vec<usize>,
    /// inverse temperatures
    #[arg(long, value_delimiter = ',', action = ArgAction::Append)]
    beta: Vec<f64>,
    /// random configurations per (n, β)
    #[arg(long)]
    configs: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "box")]
    box_half_width: Option<f64>,
    /// maximum allowed |lhs − rhs| / max(1, |lhs|)
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct RadiiArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// inverse temperatures, one report row each
    #[arg(long, value_delimiter = ',', action = ArgAction::Append)]
    beta: Vec<f64>,
    /// use Ĉ instead of C in the classical virial radius
    #[arg(long)]
    literal_lp: bool,
}

#[derive(Args)]
struct UrsellArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// cluster size (2-7)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Append)]
    beta: Vec<f64>,
    #[arg(long)]
    configs: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "box")]
    box_half_width: Option<f64>,
}

#[derive(Args)]
struct GfunArgs {
    /// lower end of the u grid (≥ 1)
    #[arg(long)]
    u_min: Option<f64>,
    /// upper end of the u grid
    #[arg(long)]
    u_max: Option<f64>,
    /// number of logarithmically spaced points
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    potential: PotentialArgs,
    /// coefficient order (2-4)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Append)]
    beta: Vec<f64>,
    #[arg(long = "box")]
    box_half_width: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Lemma3Args {
    #[command(flatten)]
    potential: PotentialArgs,
    /// tree size (3-4)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Append)]
    beta: Vec<f64>,
    /// spanning-tree shape to integrate
    #[arg(long, value_enum)]
    tree_shape: Option<ShapeArg>,
    #[arg(long = "box")]
    box_half_width: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Star,
    Path,
}

impl From<ShapeArg> for TreeShape {
    fn from(s: ShapeArg) -> TreeShape {
        match s {
            ShapeArg::Star => TreeShape::Star,
            ShapeArg::Path => TreeShape::Path,
        }
    }
}

/// On-disk defaults. Field names are kebab-case in the document; unknown
/// keys are rejected so typos cannot silently change a run.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct RunConfig {
    potential: Option<String>,
    a: Option<f64>,
    depth: Option<f64>,
    range: Option<f64>,
    exponent: Option<f64>,
    stability: Option<f64>,
    dimension: Option<usize>,
    n: Option<Vec<usize>>,
    beta: Option<Vec<f64>>,
    seed: Option<u64>,
    configs: Option<u64>,
    box_half_width: Option<f64>,
    samples: Option<u64>,
    tolerance: Option<f64>,
    literal_lp: Option<bool>,
    u_min: Option<f64>,
    u_max: Option<f64>,
    points: Option<usize>,
    tree_shape: Option<String>,
    deterministic: Option<bool>,
}

struct CliError(String);

macro_rules! config_error_from {
    ($($t:ty),* $(,)?) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError(e.to_string())
            }
        })*
    };
}

config_error_from!(
    std::io::Error,
    serde_json::Error,
    clusterforge::potentials::PotentialError,
    clusterforge::scheme::SchemeError,
    clusterforge::ursell::UrsellError,
    clusterforge::bounds::BoundsError,
);

/// Everything a command hands back for the envelope.
struct Outcome {
    command: &'static str,
    passed: bool,
    seed: Option<u64>,
    tolerances: Value,
    potential: Option<Value>,
    results: Value,
    csv: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg: RunConfig = match &cli.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    let deterministic = cli.deterministic || cfg.deterministic.unwrap_or(false);
    if deterministic {
        clusterforge::set_max_threads(1);
    }

    let out = match &cli.command {
        Command::VerifyPartition(a) => cmd_verify_partition(a, &cfg)?,
        Command::VerifyIdentity(a) => cmd_verify_identity(a, &cfg)?,
        Command::Radii(a) => cmd_radii(a, &cfg)?,
        Command::Ursell(a) => cmd_ursell(a, &cfg)?,
        Command::Gfun(a) => cmd_gfun(a, &cfg)?,
        Command::MayerMc(a) => cmd_mayer_mc(a, &cfg)?,
        Command::Lemma3(a) => cmd_lemma3(a, &cfg)?,
    };

    let text = match cli.format {
        Format::Json => {
            let report = json!({
                "tool": "clusterforge",
                "version": clusterforge::VERSION,
                "command": out.command,
                "seed": out.seed,
                "tolerances": out.tolerances,
                "deterministic": deterministic,
                "potential": out.potential,
                "results": out.results,
                "passed": out.passed,
            });
            serde_json::to_string_pretty(&report)? + "\n"
        }
        Format::Csv => out.csv,
    };
    match &cli.output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(out.passed)
}

fn build_potential(pa: &PotentialArgs, cfg: &RunConfig) -> Result<PairPotential, CliError> {
    let family = pa
        .potential
        .clone()
        .or_else(|| cfg.potential.clone())
        .unwrap_or_else(|| "lennard-jones".into());
    let mut spec = lookup_builtin(&family)
        .ok_or_else(|| CliError(format!("unknown potential family '{family}'")))?;
    // --a means "diameter" for hard spheres and "core" for square wells; for
    // other families the key is passed through so build() can reject it
    let core_key = if spec.family == "hard-sphere" {
        "diameter"
    } else {
        "core"
    };
    if let Some(v) = pa.a.or(cfg.a) {
        spec.parameters.insert(core_key.into(), v);
    }
    if let Some(v) = pa.depth.or(cfg.depth) {
        spec.parameters.insert("depth".into(), v);
    }
    if let Some(v) = pa.range.or(cfg.range) {
        spec.parameters.insert("range".into(), v);
    }
    if let Some(v) = pa.exponent.or(cfg.exponent) {
        spec.parameters.insert("exponent".into(), v);
    }
    if let Some(v) = pa.stability.or(cfg.stability) {
        spec.stability_constant = Some(v);
    }
    if let Some(v) = pa.dimension.or(cfg.dimension) {
        spec.dimension = Some(v);
    }
    Ok(spec.build()?)
}

fn potential_json(p: &PairPotential) -> Value {
    json!({
        "name": p.name(),
        "dimension": p.dimension(),
        "stability_constant": p.stability(),
    })
}

fn pick<T: Copy>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

fn pick_list<T: Clone>(flag: &[T], config: &Option<Vec<T>>, default: Vec<T>) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        config.clone().unwrap_or(default)
    }
}

fn check_betas(betas: &[f64]) -> Result<(), CliError> {
    for &b in betas {
        if !(b.is_finite() && b > 0.0) {
            return Err(CliError(format!("beta must be positive and finite, got {b}")));
        }
    }
    Ok(())
}

/// One RNG stream per (n, configuration index), all derived from the base
/// seed, so runs are reproducible and configurations independent.
fn config_rng(seed: u64, n: usize, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | k);
    rng
}

fn cmd_verify_partition(args: &PartitionArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = build_potential(&args.potential, cfg)?;
    check_betas(&args.beta)?; // validated even though the weights ignore it
    let ns = pick_list(&args.n, &cfg.n, vec![4]);
    let seed = pick(args.seed, cfg.seed, 0);
    let configs = pick(args.configs, cfg.configs, 5).max(1);
    let half_width = pick(args.box_half_width, cfg.box_half_width, 2.0);

    let mut results = Vec::new();
    let mut csv = String::from("n,config,graph_count,interval_total,distinct_interval_sizes,passed\n");
    let mut passed = true;
    for &n in &ns {
        for k in 0..configs {
            let mut rng = config_rng(seed, n, k);
            let c = Configuration::random_in_box(n, p.dimension(), half_width, &mut rng);
            let table = WeightTable::from_configuration(&p, &c)?;
            let report = verify_partition(n, &table)?;
            passed &= report.passed;
            csv.push_str(&format!(
                "{n},{k},{},{},{},{}\n",
                report.graph_count,
                report.interval_total,
                report.histogram.len(),
                report.passed
            ));
            results.push(json!({ "n": n, "config": k, "report": report }));
        }
    }
    Ok(Outcome {
        command: "verify-partition",
        passed,
        seed: Some(seed),
        tolerances: json!({}),
        potential: Some(potential_json(&p)),
        results: Value::Array(results),
        csv,
    })
}

fn cmd_verify_identity(args: &IdentityArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = build_potential(&args.potential, cfg)?;
    let ns = pick_list(&args.n, &cfg.n, vec![2, 3, 4]);
    let betas = pick_list(&args.beta, &cfg.beta, vec![1.0]);
    check_betas(&betas)?;
    let seed = pick(args.seed, cfg.seed, 0);
    let configs = pick(args.configs, cfg.configs, 5).max(1);
    let half_width = pick(args.box_half_width, cfg.box_half_width, 2.0);
    let tolerance = pick(args.tolerance, cfg.tolerance, 1e-9);

    let mut results = Vec::new();
    let mut csv = String::from("n,beta,config,lhs_direct,rhs_identity,rel_discrepancy,ok\n");
    let mut passed = true;
    for &n in &ns {
        for k in 0..configs {
            let mut rng = config_rng(seed, n, k);
            let c = Configuration::random_in_box(n, p.dimension(), half_width, &mut rng);
            for &beta in &betas {
                let lhs = ursell::ursell_direct(&p, beta, &c)?;
                let rhs = ursell::penrose_rhs(&p, beta, &c)?;
                let rel = (lhs - rhs).abs() / lhs.abs().max(1.0);
                let ok = rel <= tolerance;
                passed &= ok;
                csv.push_str(&format!("{n},{beta},{k},{lhs},{rhs},{rel},{ok}\n"));
                results.push(json!({
                    "n": n,
                    "beta": beta,
                    "config": k,
                    "lhs_direct": lhs,
                    "rhs_identity": rhs,
                    "rel_discrepancy": rel,
                    "ok": ok,
                }));
            }
        }
    }
    Ok(Outcome {
        command: "verify-identity",
        passed,
        seed: Some(seed),
        tolerances: json!({ "identity_rel": tolerance }),
        potential: Some(potential_json(&p)),
        results: Value::Array(results),
        csv,
    })
}

fn cmd_radii(args: &RadiiArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = build_potential(&args.potential, cfg)?;
    let betas = pick_list(&args.beta, &cfg.beta, vec![1.0]);
    check_betas(&betas)?;
    let literal = args.literal_lp || cfg.literal_lp.unwrap_or(false);

    let mut reports = Vec::new();
    let mut csv = String::from(BoundsReport::csv_header());
    csv.push('\n');
    for &beta in &betas {
        let r = bounds::bounds_report(&p, beta, literal)?;
        csv.push_str(&r.csv_row());
        csv.push('\n');
        reports.push(serde_json::to_value(&r)?);
    }
    Ok(Outcome {
        command: "radii",
        passed: true,
        seed: None,
        tolerances: json!({ "radial_rel_target": 1e-10 }),
        potential: Some(potential_json(&p)),
        results: Value::Array(reports),
        csv,
    })
}

fn cmd_ursell(args: &UrsellArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = build_potential(&args.potential, cfg)?;
    let n = pick(args.n, cfg.n.as_ref().and_then(|v| v.first().copied()), 4);
    let betas = pick_list(&args.beta, &cfg.beta, vec![1.0]);
    check_betas(&betas)?;
    let seed = pick(args.seed, cfg.seed, 0);
    let configs = pick(args.configs, cfg.configs, 3).max(1);
    let half_width = pick(args.box_half_width, cfg.box_half_width, 2.0);
    let b = p.stability_value()?;

    let mut results = Vec::new();
    let mut csv = String::from(
        "n,beta,config,lhs_direct,rhs_identity,corollary_bound,prop1_bound,rel_discrepancy,chain_ok\n",
    );
    let mut passed = true;
    for k in 0..configs {
        let mut rng = config_rng(seed, n, k);
        let c = Configuration::random_in_box(n, p.dimension(), half_width, &mut rng);
        for &beta in &betas {
            let eval = ursell::evaluate(&p, beta, &c, b)?;
            let ok = eval.chain_ok() && eval.rel_discrepancy <= 1e-9;
            passed &= ok;
            csv.push_str(&format!(
                "{n},{beta},{k},{},{},{},{},{},{}\n",
                eval.lhs_direct,
                eval.rhs_identity,
                eval.corollary_bound,
                eval.prop1_bound,
                eval.rel_discrepancy,
                eval.chain_ok()
            ));
            results.push(json!({ "config": k, "evaluation": eval, "ok": ok }));
        }
    }
    Ok(Outcome {
        command: "ursell",
        passed,
        seed: Some(seed),
        tolerances: json!({ "identity_rel": 1e-9 }),
        potential: Some(potential_json(&p)),
        results: Value::Array(results),
        csv,
    })
}

fn cmd_gfun(args: &GfunArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let u_min = pick(args.u_min, cfg.u_min, 1.0);
    let u_max = pick(args.u_max, cfg.u_max, 1e6);
    let points = pick(args.points, cfg.points, 25).max(2);
    if !(u_min >= 1.0 && u_max >= u_min && u_max.is_finite()) {
        return Err(CliError(format!(
            "need 1 <= u-min <= u-max < inf, got [{u_min}, {u_max}]"
        )));
    }

    let mut results = Vec::new();
    let mut csv = String::from("u,value,argmax\n");
    let (lo, hi) = (u_min.ln(), u_max.ln());
    for k in 0..points {
        let t = k as f64 / (points - 1) as f64;
        let u = (lo + t * (hi - lo)).exp();
        let g = bounds::g_function(u)?;
        csv.push_str(&format!("{},{},{}\n", g.u, g.value, g.argmax));
        results.push(serde_json::to_value(g)?);
    }
    Ok(Outcome {
        command: "gfun",
        passed: true,
        seed: None,
        tolerances: json!({ "argmax_abs": 1e-8 }),
        potential: None,
        results: Value::Array(results),
        csv,
    })
}

fn cmd_mayer_mc(args: &McArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = build_potential(&args.potential, cfg)?;
    let n = pick(args.n, cfg.n.as_ref().and_then(|v| v.first().copied()), 3);
    let betas = pick_list(&args.beta, &cfg.beta, vec![1.0]);
    check_betas(&betas)?;
    let half_width = pick(args.box_half_width, cfg.box_half_width, 2.0);
    let samples = pick(args.samples, cfg.samples, 100_000);
    let seed = pick(args.seed, cfg.seed, 0);

    let mut results = Vec::new();
    let mut csv = String::from(
        "n,beta,samples,seed,box_half_width,estimate,std_error,bound,within_bound,range_warning\n",
    );
    let mut passed = true;
    for &beta in &betas {
        let r = bounds::mayer_cn_mc(&p, beta, n, half_width, samples, seed)?;
        passed &= r.within_bound;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.beta,
            r.samples,
            r.seed,
            r.box_half_width,
            r.estimate,
            r.std_error,
            r.bound,
            r.within_bound,
            r.range_warning
        ));
        results.push(serde_json::to_value(&r)?);
    }
    Ok(Outcome {
        command: "mayer-mc",
        passed,
        seed: Some(seed),
        tolerances: json!({ "sigma": 3.0 }),
        potential: Some(potential_json(&p)),
        results: Value::Array(results),
        csv,
    })
}

fn cmd_lemma3(args: &Lemma3Args, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = build_potential(&args.potential, cfg)?;
    let n = pick(args.n, cfg.n.as_ref().and_then(|v| v.first().copied()), 3);
    let betas = pick_list(&args.beta, &cfg.beta, vec![1.0]);
    check_betas(&betas)?;
    let shape: TreeShape = match (args.tree_shape, cfg.tree_shape.as_deref()) {
        (Some(s), _) => s.into(),
        (None, Some("star")) => TreeShape::Star,
        (None, Some("path")) => TreeShape::Path,
        (None, Some(other)) => {
            return Err(CliError(format!("unknown tree-shape '{other}' (star|path)")))
        }
        (None, None) => TreeShape::Star,
    };
    let half_width = pick(args.box_half_width, cfg.box_half_width, 2.0);
    let samples = pick(args.samples, cfg.samples, 100_000);
    let seed = pick(args.seed, cfg.seed, 0);

    let mut results = Vec::new();
    let mut csv = String::from(
        "n,beta,samples,seed,box_half_width,estimate,std_error,bound,ok\n",
    );
    let mut passed = true;
    for &beta in &betas {
        let r = bounds::lemma3_check(&p, beta, n, shape, half_width, samples, seed)?;
        passed &= r.ok;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.beta,
            r.samples,
            r.seed,
            r.box_half_width,
            r.estimate,
            r.std_error,
            r.bound,
            r.ok
        ));
        results.push(serde_json::to_value(&r)?);
    }
    Ok(Outcome {
        command: "lemma3",
        passed,
        seed: Some(seed),
        tolerances: json!({ "sigma": 3.0 }),
        potential: Some(potential_json(&p)),
        results: Value::Array(results),
        csv,
    })
}
