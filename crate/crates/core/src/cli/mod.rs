//! The `dvclust` command-line tool.
//!
//! Exit codes: 0 on success, 2 for I/O, parse and usage errors, 3 when the
//! input is well formed but violates a precondition (too few objects, an
//! invalid `k`, a constant column under `--standardize`, zero replicates).

pub mod bench;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cluster::{
    distance_vectors, run_method, CentroidRule, KmeansConfig, Method, Source,
};
use crate::evaluation::{adjusted_rand_index, error_count};
use crate::heatmap::Heatmap;
use crate::io::{read_data_file, read_labels_file, write_data_csv, DatasetMetadata, IoError};
use crate::pairwise::{euclidean_distance_matrix, gram_matrix, standardize_columns};
use crate::simgen::{
    gen_example2, gen_example3, gen_setting_replicate, prop1_probe, GeneratedDataset, Setting,
    SettingSpec, TwoClusterFamily, PI_BALANCED, PI_SKEW,
};
use crate::types::{DataMatrix, LabelVector};
use bench::{run_bench, BenchConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invariant(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Invalid(e) => CliError::Invariant(e),
            other => CliError::Io(other.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "dvclust", version, about = "Distance-vector clustering for HDLSS data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster the rows of a CSV matrix.
    Cluster(ClusterArgs),
    /// Mean ARI per method over replicated synthetic datasets.
    Bench(BenchArgs),
    /// Render D, S or Xi as a grayscale PGM.
    Heatmap(HeatmapArgs),
    /// Compare scaled norms, distances and inner products with their
    /// large-p limits.
    Prop1(Prop1Args),
    /// Write a synthetic dataset as CSV plus a JSON sidecar.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    pub input: PathBuf,
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long)]
    pub k: usize,
    /// Scale every column to mean 0 and unit sample variance first.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, env = "DVCLUST_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::CountMatched)]
    pub centroid_rule: RuleArg,
    /// True labels (text or sidecar JSON); adds ARI and error counts.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp and timing fields.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    CountMatched,
    Literal,
}

impl From<RuleArg> for CentroidRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::CountMatched => CentroidRule::CountMatched,
            RuleArg::Literal => CentroidRule::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PiArg {
    Skew,
    Balanced,
    /// Both sub-studies, skewed first.
    Both,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_setting)]
    pub setting: Setting,
    #[arg(long, default_value_t = 1000)]
    pub p: usize,
    /// Mean shift (Settings I and II).
    #[arg(long)]
    pub mu: Option<f64>,
    /// First-cluster variance (Settings III and IV).
    #[arg(long)]
    pub sigma_sq: Option<f64>,
    #[arg(long, value_enum, default_value_t = PiArg::Both)]
    pub pi: PiArg,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, env = "DVCLUST_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated method names; all nine when absent.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Option<Vec<Method>>,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Worker threads for replicates; all cores when absent.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixArg {
    Distance,
    Gram,
    Xi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Input,
    Truth,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    /// CSV input; omit when using --example2.
    #[arg(required_unless_present = "example2", conflicts_with = "example2")]
    pub input: Option<PathBuf>,
    /// Generate the two-scale example with this dimension instead.
    #[arg(long, value_name = "P")]
    pub example2: Option<usize>,
    /// Variance ratio of the second cluster in --example2.
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    #[arg(long, default_value_t = 10)]
    pub n_per: usize,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MatrixArg::Distance)]
    pub matrix: MatrixArg,
    /// Pairwise matrix under Xi.
    #[arg(long, value_enum, default_value_t = SourceArg::Distance)]
    pub source: SourceArg,
    #[arg(long, value_enum, default_value_t = OrderArg::Input)]
    pub order: OrderArg,
    #[arg(long, env = "DVCLUST_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Distance,
    Gram,
}

#[derive(Debug, Args)]
pub struct Prop1Args {
    /// `standard`, `example2[:c]`, `example3` or `m1:v1,m2:v2`.
    #[arg(long, default_value = "standard", value_parser = parse_family)]
    pub family: TwoClusterFamily,
    /// Comma-separated dimensions.
    #[arg(long, default_value = "100,1000,10000,100000")]
    pub p_grid: String,
    #[arg(long, default_value_t = 30)]
    pub reps: usize,
    #[arg(long, env = "DVCLUST_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("kind").required(true).args(["setting", "example2", "example3"])))]
pub struct GenerateArgs {
    #[arg(long, value_parser = parse_setting)]
    pub setting: Option<Setting>,
    #[arg(long, value_name = "P")]
    pub example2: Option<usize>,
    #[arg(long, value_name = "P")]
    pub example3: Option<usize>,
    /// Dimension for --setting.
    #[arg(long, default_value_t = 1000)]
    pub p: usize,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub sigma_sq: Option<f64>,
    #[arg(long, value_enum, default_value_t = PiArg::Balanced)]
    pub pi: PiArg,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub replicate: u64,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    #[arg(long, default_value_t = 10)]
    pub n_per: usize,
    #[arg(long, env = "DVCLUST_SEED", default_value_t = 0)]
    pub seed: u64,
    /// CSV path; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_setting(s: &str) -> Result<Setting, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_family(s: &str) -> Result<TwoClusterFamily, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// Writes to `path`, or to stdout when `path` is `None`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            w.write_all(bytes).and_then(|_| w.flush()).map_err(io_err(p))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("report types serialize");
    s.push(b'\n');
    s
}

#[derive(Serialize)]
struct ClusterConfig {
    standardize: bool,
    variance_divisor: &'static str,
    seed: u64,
    restarts: usize,
    max_iter: usize,
    centroid_rule: CentroidRule,
    ward_variant: &'static str,
}

#[derive(Serialize)]
struct Evaluation {
    ari: f64,
    /// Misassigned objects under the best label matching.
    errors: Option<usize>,
}

#[derive(Serialize)]
struct ClusterReport {
    input: String,
    method: Method,
    k: usize,
    n: usize,
    p: usize,
    labels: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    heights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective_non_increasing: Option<bool>,
    config: ClusterConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<Evaluation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

fn evaluate(labels: &LabelVector, truth: &LabelVector) -> CliResult<Evaluation> {
    Ok(Evaluation {
        ari: adjusted_rand_index(labels, truth)?,
        errors: error_count(labels, truth).ok(),
    })
}

fn cmd_cluster(a: &ClusterArgs) -> CliResult<()> {
    let start = Instant::now();
    let raw = read_data_file(&a.input)?;
    let truth = a.truth.as_deref().map(read_labels_file).transpose()?;
    let x = if a.standardize {
        standardize_columns(&raw)?
    } else {
        raw
    };
    let cfg = KmeansConfig::new(a.k, a.seed)
        .with_restarts(a.restarts)
        .with_max_iter(a.max_iter)
        .with_centroid_rule(a.centroid_rule.into());
    let out = run_method(&x, a.method, &cfg)?;
    let evaluation = truth.as_ref().map(|t| evaluate(&out.labels, t)).transpose()?;
    let report = ClusterReport {
        input: a.input.display().to_string(),
        method: a.method,
        k: a.k,
        n: x.n_rows(),
        p: x.n_cols(),
        labels: out.labels.to_one_based(),
        objective: out.objective,
        heights: out.heights,
        converged: out.converged,
        objective_non_increasing: out.objective_non_increasing,
        config: ClusterConfig {
            standardize: a.standardize,
            variance_divisor: "n-1",
            seed: a.seed,
            restarts: a.restarts,
            max_iter: a.max_iter,
            centroid_rule: cfg.centroid_rule,
            ward_variant: "ward.D2",
        },
        evaluation,
        elapsed_ms: (!a.no_timestamp).then(|| start.elapsed().as_secs_f64() * 1e3),
        timestamp: (!a.no_timestamp).then(unix_now),
    };
    emit(a.out.as_deref(), &to_json(&report))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn pi_list(pi: PiArg) -> Vec<(&'static str, [f64; 3])> {
    match pi {
        PiArg::Skew => vec![("skew", PI_SKEW)],
        PiArg::Balanced => vec![("balanced", PI_BALANCED)],
        PiArg::Both => vec![("skew", PI_SKEW), ("balanced", PI_BALANCED)],
    }
}

fn setting_spec(
    setting: Setting,
    p: usize,
    mu: Option<f64>,
    sigma_sq: Option<f64>,
    n: usize,
    seed: u64,
) -> SettingSpec {
    let mut spec = SettingSpec::new(setting, p).with_n(n).with_seed(seed);
    if let Some(mu) = mu {
        spec = spec.with_mu(mu);
    }
    if let Some(s) = sigma_sq {
        spec = spec.with_sigma_sq(s);
    }
    spec
}

fn cmd_bench(a: &BenchArgs) -> CliResult<()> {
    if a.reps == 0 {
        return Err(crate::Error::InvalidParameter("reps must be >= 1".into()).into());
    }
    let methods = a.methods.clone().unwrap_or_else(|| Method::ALL.to_vec());
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = a.jobs {
            b = b.num_threads(j.max(1));
        }
        b.build()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?
    };
    let mut csv_out = String::from(
        "setting,p,n,pi,mu,sigma_sq,method,reps,mean_ari,sd_ari,se_ari,rejections,q_monotone\n",
    );
    for (pi_name, pi) in pi_list(a.pi) {
        let spec = setting_spec(a.setting, a.p, a.mu, a.sigma_sq, a.n, a.seed).with_pi(pi);
        let cfg = BenchConfig {
            spec,
            methods: methods.clone(),
            reps: a.reps,
            restarts: a.restarts,
            max_iter: a.max_iter,
        };
        let rows = pool.install(|| run_bench(&cfg))?;
        let sigma = spec.sigma_sq.map(|s| s.to_string()).unwrap_or_default();
        for r in rows {
            let q = r.q_monotone.map(|q| q.to_string()).unwrap_or_default();
            csv_out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{},{}\n",
                spec.setting,
                spec.p,
                spec.n,
                pi_name,
                spec.mu,
                sigma,
                r.method.display_name(),
                r.reps,
                r.mean_ari,
                r.sd_ari,
                r.se_ari,
                r.rejections,
                q,
            ));
        }
    }
    emit(a.out.as_deref(), csv_out.as_bytes())
}

/// Indices sorted stably by label.
fn truth_order(truth: &LabelVector) -> Vec<usize> {
    let mut order: Vec<usize> = (0..truth.len()).collect();
    order.sort_by_key(|&i| truth.as_slice()[i]);
    order
}

fn cmd_heatmap(a: &HeatmapArgs) -> CliResult<()> {
    let (x, mut truth) = match (a.example2, &a.input) {
        (Some(p), _) => {
            let d = gen_example2(p, a.c, a.n_per, a.seed)?;
            (d.x, Some(d.truth))
        }
        (None, Some(path)) => (read_data_file(path)?, None),
        (None, None) => unreachable!("clap requires an input"),
    };
    if let Some(path) = &a.truth {
        truth = Some(read_labels_file(path)?);
    }
    let order = match a.order {
        OrderArg::Input => (0..x.n_rows()).collect(),
        OrderArg::Truth => {
            let t = truth.ok_or_else(|| {
                CliError::Io("--order truth needs --truth or --example2".into())
            })?;
            if t.len() != x.n_rows() {
                return Err(crate::Error::LengthMismatch(t.len(), x.n_rows()).into());
            }
            truth_order(&t)
        }
    };
    let source = match a.source {
        SourceArg::Distance => Source::Distance,
        SourceArg::Gram => Source::Gram,
    };
    let img = match a.matrix {
        MatrixArg::Distance => Heatmap::from_matrix(&euclidean_distance_matrix(&x), &order),
        MatrixArg::Gram => Heatmap::from_matrix(&gram_matrix(&x), &order),
        MatrixArg::Xi => Heatmap::from_matrix(&distance_vectors(&x, source)?, &order),
    };
    if img.degenerate {
        eprintln!("warning: all matrix entries are equal; writing an all-zero image");
    }
    let mut bytes = Vec::new();
    img.write_pgm(&mut bytes).map_err(io_err(&a.out))?;
    emit(Some(&a.out), &bytes)
}

fn parse_grid(s: &str) -> CliResult<Vec<usize>> {
    let grid = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| CliError::Io(format!("invalid dimension {t:?} in --p-grid")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(grid)
}

fn cmd_prop1(a: &Prop1Args) -> CliResult<()> {
    let grid = parse_grid(&a.p_grid)?;
    let rows = prop1_probe(&a.family, &grid, a.reps, a.seed)?;
    let mut out = String::from("p,statistic,empirical,std_error,limit,rel_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.p,
            r.statistic.name(),
            r.empirical,
            r.std_error,
            r.limit,
            r.rel_error
        ));
    }
    emit(a.out.as_deref(), out.as_bytes())
}

fn cmd_generate(a: &GenerateArgs) -> CliResult<()> {
    let (generator, spec_json, data): (&str, serde_json::Value, GeneratedDataset) =
        if let Some(setting) = a.setting {
            let pi = match a.pi {
                PiArg::Skew => PI_SKEW,
                PiArg::Balanced => PI_BALANCED,
                PiArg::Both => {
                    return Err(CliError::Io("generate takes --pi skew or balanced".into()))
                }
            };
            let spec = setting_spec(setting, a.p, a.mu, a.sigma_sq, a.n, a.seed).with_pi(pi);
            let mut v = serde_json::to_value(spec).expect("spec serializes");
            v["replicate"] = a.replicate.into();
            ("setting", v, gen_setting_replicate(&spec, a.replicate)?)
        } else if let Some(p) = a.example2 {
            let v = serde_json::json!({ "p": p, "c": a.c, "n_per": a.n_per });
            ("example2", v, gen_example2(p, a.c, a.n_per, a.seed)?)
        } else {
            let p = a.example3.expect("clap enforces one generator");
            ("example3", serde_json::json!({ "p": p }), gen_example3(p, a.seed)?)
        };
    let meta = DatasetMetadata {
        generator: generator.into(),
        seed: a.seed,
        n: data.x.n_rows(),
        p: data.x.n_cols(),
        spec: spec_json,
        realized_rho: data.realized_rho.clone(),
        rejections: data.rejections,
        truth: data.truth.to_one_based(),
    };
    write_dataset(&a.out, &data.x)?;
    emit(Some(&a.out.with_extension("json")), &to_json(&meta))
}

fn write_dataset(path: &Path, x: &DataMatrix) -> CliResult<()> {
    let f = File::create(path).map_err(io_err(path))?;
    write_data_csv(BufWriter::new(f), x).map_err(io_err(path))
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Cluster(a) => cmd_cluster(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Heatmap(a) => cmd_heatmap(a),
        Command::Prop1(a) => cmd_prop1(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dvclust: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn truth_order_is_stable() {
        let t = LabelVector::new(vec![1, 0, 1, 0], 2).unwrap();
        assert_eq!(truth_order(&t), vec![1, 3, 0, 2]);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("10, 100,").unwrap(), vec![10, 100]);
        assert!(parse_grid("").unwrap().is_empty());
        assert!(parse_grid("ten").is_err());
    }
}
