use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gfcsd::io::{write_csv, UNEVEN_SIGMA};
use gfcsd::report::{read_json, read_memberships_csv, write_json, SweepReport};
use gfcsd::{
    align_and_score, fcm_xie_sweep, gen_gaussian_mixture, gfc_sd, load_csv, read_report,
    variance_normalize, write_report, DispersionNorm, EngineConfig, FitReport, GfcSdConfig,
    LabeledDataset, MixtureSpec,
};
use serde::Deserialize;

/// Fuzzy clustering with automatic choice of the number of clusters.
#[derive(Debug, Parser)]
#[command(name = "gfcsd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster a CSV file, merging an overspecified partition down.
    Fit(FitArgs),
    /// Fuzzy c-means for every c in a range, scored by the Xie-Beni index.
    Sweep(SweepArgs),
    /// Write a labelled Gaussian mixture as CSV.
    Generate(GenerateArgs),
    /// Score a fit report against known labels.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV, one point per row.
    #[arg(long)]
    input: PathBuf,
    /// The input has no header row.
    #[arg(long)]
    no_header: bool,
    /// 0-based column holding class labels, excluded from the features.
    /// `last` selects the final column.
    #[arg(long, value_name = "INDEX|last")]
    label_column: Option<String>,
    /// Standardize every row to zero mean and unit variance first.
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Report path (JSON); memberships go to `<stem>.memberships.csv`.
    #[arg(long)]
    output: PathBuf,
    /// Random seed; drawn at random and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// TOML file with parameter overrides (flat keys, same names as the
    /// report's config section).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Initial number of clusters [default: 20].
    #[arg(long)]
    cmax: Option<usize>,
    #[command(flatten)]
    engine: EngineFlags,
    /// Similarity below which clusters are never merged [default: 1].
    #[arg(long)]
    tau1: Option<f64>,
    /// Similarity above which clusters are always merged [default: 2].
    #[arg(long)]
    tau2: Option<f64>,
}

#[derive(Debug, Args)]
struct EngineFlags {
    /// Fuzziness exponent, > 1 [default: 2].
    #[arg(long)]
    m: Option<f64>,
    /// Principal-axis weight in [0, 1] [default: 0.5].
    #[arg(long)]
    g: Option<f64>,
    /// Norm order; only 2 is supported for fitting [default: 2].
    #[arg(long)]
    p: Option<f64>,
    /// Convergence tolerance on memberships [default: 0.001].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Minimum number of principal axes per cluster [default: 1].
    #[arg(long)]
    r1: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Report path (JSON).
    #[arg(long)]
    output: PathBuf,
    /// Random seed; drawn at random and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// TOML file with parameter overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Smallest cluster count [default: 2].
    #[arg(long)]
    cmin: Option<usize>,
    /// Largest cluster count [default: 20].
    #[arg(long)]
    cmax: Option<usize>,
    /// Random starts per cluster count; the best is kept [default: 1].
    #[arg(long)]
    restarts: Option<usize>,
    /// Fuzziness exponent, > 1 [default: 2].
    #[arg(long)]
    m: Option<f64>,
    /// Convergence tolerance on memberships [default: 0.001].
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Built-in mixture: `paper-artificial` (four 2-D groups of 300, 30,
    /// 30 and 50 points).
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<Preset>,
    /// Mixture description (TOML or JSON) with `groups` of `center`,
    /// `sigma` and `count`.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Spread of every group of the preset [default: 0.1].
    #[arg(long, requires = "preset")]
    sigma: Option<f64>,
    /// Output CSV; the last column holds the group index.
    #[arg(long)]
    output: PathBuf,
    /// Random seed; overrides the spec file's seed. Drawn at random and
    /// printed when neither is given.
    #[arg(long)]
    seed: Option<u64>,
    /// Accepted for symmetry with the other commands; unused.
    #[arg(long, hide = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Preset {
    PaperArtificial,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Report written by `fit`.
    #[arg(long)]
    input: PathBuf,
    /// CSV with the true labels.
    #[arg(long)]
    labels: PathBuf,
    /// 0-based column of the labels file holding the labels, or `last`
    /// [default: last].
    #[arg(long, value_name = "INDEX|last")]
    label_column: Option<String>,
    /// The labels file has no header row.
    #[arg(long)]
    no_header: bool,
    /// Also write the confusion matrix and accuracy as JSON.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Flat configuration file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    c_max: Option<usize>,
    c_min: Option<usize>,
    restarts: Option<usize>,
    m: Option<f64>,
    p: Option<f64>,
    g: Option<f64>,
    epsilon: Option<f64>,
    max_iters: Option<usize>,
    r1: Option<usize>,
    tau1: Option<f64>,
    tau2: Option<f64>,
    anneal_decay: Option<f64>,
    max_outer_iters: Option<usize>,
    dispersion: Option<DispersionNorm>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn usage(e: impl Display) -> Self {
        Self::Usage(e.to_string())
    }

    fn runtime(e: impl Display) -> Self {
        Self::Runtime(e.to_string())
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => fit(a),
        Command::Sweep(a) => sweep(a),
        Command::Generate(a) => generate(a),
        Command::Eval(a) => eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    println!("seed: {seed}");
    seed
}

fn read_config(path: Option<&Path>) -> Outcome<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn label_index(
    spec: Option<&str>,
    columns: impl FnOnce() -> Outcome<usize>,
) -> Outcome<Option<usize>> {
    match spec {
        None => Ok(None),
        Some("last") => Ok(Some(columns()?.saturating_sub(1))),
        Some(s) => s.parse().map(Some).map_err(|_| {
            Failure::usage(format!(
                "label column must be an index or `last`, got {s:?}"
            ))
        }),
    }
}

/// Number of fields in the first line of a CSV file.
fn column_count(path: &Path) -> Outcome<usize> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    Ok(text.lines().next().map_or(0, |l| l.split(',').count()))
}

fn load_input(args: &InputArgs) -> Outcome<LabeledDataset> {
    let label = label_index(args.label_column.as_deref(), || column_count(&args.input))?;
    let mut ds = load_csv(&args.input, !args.no_header, label).map_err(Failure::runtime)?;
    if args.normalize {
        ds.data = variance_normalize(&ds.data);
    }
    Ok(ds)
}

fn fit(args: FitArgs) -> Outcome {
    let file = read_config(args.config.as_deref())?;
    let mut cfg = GfcSdConfig::default();
    let e = &mut cfg.engine;
    let p = &mut cfg.policy;
    macro_rules! layer {
        ($target:expr, $($source:expr),+) => {
            $( if let Some(v) = $source { $target = v; } )+
        };
    }
    layer!(cfg.c_max, file.c_max, args.cmax);
    layer!(e.m, file.m, args.engine.m);
    layer!(e.p, file.p, args.engine.p);
    layer!(e.g, file.g, args.engine.g);
    layer!(e.epsilon, file.epsilon, args.engine.epsilon);
    layer!(e.max_iters, file.max_iters);
    layer!(e.r1, file.r1, args.engine.r1);
    layer!(p.tau1, file.tau1, args.tau1);
    layer!(p.tau2, file.tau2, args.tau2);
    layer!(p.anneal_decay, file.anneal_decay);
    layer!(p.max_outer_iters, file.max_outer_iters);
    layer!(p.dispersion, file.dispersion);
    if cfg.engine.p != 2.0 {
        return Err(Failure::usage(format!(
            "only p = 2 is supported for fitting, got {}",
            cfg.engine.p
        )));
    }

    let ds = load_input(&args.input)?;
    cfg.validate(ds.data.rows()).map_err(Failure::usage)?;
    let seed = resolve_seed(args.seed);
    let result = gfc_sd(&ds.data, &cfg, seed).map_err(Failure::runtime)?;
    let mut report = FitReport::new(&ds.data, &result, &cfg, seed).map_err(Failure::runtime)?;
    if let Some(truth) = &ds.labels {
        let (cm, acc) = align_and_score(&result.memberships.argmax_labels(), truth)
            .map_err(Failure::runtime)?;
        report.indices.accuracy = Some(acc);
        report.indices.confusion = Some(cm);
    }
    write_report(&mut report, &result.memberships, &args.output).map_err(Failure::runtime)?;
    println!("final c: {}", report.final_c);
    println!("cluster counts: {:?}", result.trace.c_sequence());
    if let Some(acc) = report.indices.accuracy {
        println!("accuracy: {acc:.4}");
    }
    println!("report: {}", args.output.display());
    Ok(())
}

fn sweep(args: SweepArgs) -> Outcome {
    let file = read_config(args.config.as_deref())?;
    let mut engine = EngineConfig::fcm();
    let mut c_min = 2;
    let mut c_max = 20;
    let mut restarts = 1;
    if let Some(v) = args.cmin.or(file.c_min) {
        c_min = v;
    }
    if let Some(v) = args.cmax.or(file.c_max) {
        c_max = v;
    }
    if let Some(v) = args.restarts.or(file.restarts) {
        restarts = v;
    }
    if let Some(v) = args.m.or(file.m) {
        engine.m = v;
    }
    if let Some(v) = args.epsilon.or(file.epsilon) {
        engine.epsilon = v;
    }
    if let Some(v) = file.max_iters {
        engine.max_iters = v;
    }
    engine.validate().map_err(Failure::usage)?;

    let ds = load_input(&args.input)?;
    let n = ds.data.rows();
    if c_min < 2 || c_min > c_max || c_max >= n {
        return Err(Failure::usage(format!(
            "cluster range must satisfy 2 <= cmin <= cmax < N = {n}, got [{c_min}, {c_max}]"
        )));
    }
    if restarts == 0 {
        return Err(Failure::usage("restarts must be positive"));
    }
    let seed = resolve_seed(args.seed);
    let result =
        fcm_xie_sweep(&ds.data, c_min, c_max, &engine, seed, restarts).map_err(Failure::runtime)?;
    let report = SweepReport::new(&result, c_min, c_max, restarts, seed);
    write_json(&report, &args.output).map_err(Failure::runtime)?;
    println!("best c: {}", result.best_c);
    println!("report: {}", args.output.display());
    Ok(())
}

fn read_spec(path: &Path) -> Outcome<MixtureSpec> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        return read_json(path).map_err(Failure::usage);
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn generate(args: GenerateArgs) -> Outcome {
    let mut spec = match (&args.preset, &args.spec) {
        (Some(Preset::PaperArtificial), _) => {
            MixtureSpec::uneven_four_groups(args.sigma.unwrap_or(UNEVEN_SIGMA), 0)
        }
        (None, Some(path)) => read_spec(path)?,
        (None, None) => unreachable!("clap requires one of --preset and --spec"),
    };
    // a spec file's own seed counts as given
    let from_file = args.spec.is_some() && args.seed.is_none();
    spec.seed = if from_file {
        println!("seed: {}", spec.seed);
        spec.seed
    } else {
        resolve_seed(args.seed)
    };
    spec.validate().map_err(Failure::usage)?;
    let ds = gen_gaussian_mixture(&spec).map_err(Failure::runtime)?;
    write_csv(&args.output, &ds.data, ds.labels.as_deref()).map_err(Failure::runtime)?;
    println!("rows: {}", ds.data.rows());
    println!("output: {}", args.output.display());
    Ok(())
}

fn eval(args: EvalArgs) -> Outcome {
    let report = read_report(&args.input).map_err(Failure::runtime)?;
    let base = args.input.parent().unwrap_or(Path::new("."));
    let u = read_memberships_csv(base.join(&report.memberships_path)).map_err(Failure::runtime)?;
    let label = label_index(Some(args.label_column.as_deref().unwrap_or("last")), || {
        column_count(&args.labels)
    })?;
    let ds = load_csv(&args.labels, !args.no_header, label).map_err(Failure::runtime)?;
    let truth = ds.labels.expect("label column was requested");
    let predicted = u.argmax_labels();
    let (cm, acc) = align_and_score(&predicted, &truth).map_err(Failure::usage)?;

    let names = ds.label_names.unwrap_or_default();
    println!(
        "clusters: {}  classes: {}  points: {}",
        u.clusters(),
        names.len(),
        truth.len()
    );
    println!("confusion (rows: true class, columns: aligned cluster)");
    for (t, row) in cm.counts.iter().enumerate() {
        let name = names.get(t).map_or("-", String::as_str);
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>5}")).collect();
        println!("{name:>12} {}", cells.join(""));
    }
    println!("accuracy: {acc:.4}");
    if let Some(out) = &args.output {
        let doc = serde_json::json!({ "accuracy": acc, "confusion": cm, "class_names": names });
        write_json(&doc, out).map_err(Failure::runtime)?;
    }
    Ok(())
}
