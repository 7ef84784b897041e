//! The `ik` command line. [`run`] parses arguments, does the work and
//! returns the process exit code: 0 on success, 2 on a usage error, 1 on a
//! data error.

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datasets::{self, Dataset, GeneratorSpec};
use crate::error::Error;
use crate::experiments::{self, MeasureKind, PartitionSource, QueryKind};
use crate::index::{self, MetricSpace};
use crate::kernel::{self, io as kio, IkModel, PreparedMeasure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "ik", version, about = "Isolation Kernel: fit, encode, search and experiments")]
struct Cli {
    /// Worker threads. Outputs do not depend on this.
    #[arg(long, global = true, value_parser = positive)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic two-cluster dataset.
    Gen(GenArgs),
    /// Fit an IK model and write it as IKM1.
    Fit(FitArgs),
    /// Encode a dataset with a fitted model and write IKC1 codes.
    Encode(EncodeArgs),
    /// k nearest neighbors through the ball tree.
    Knn(KnnArgs),
    /// Distance evaluations and wall time, ball tree versus brute force.
    BenchIndex(BenchArgs),
    /// Label precision of each point's k nearest neighbors.
    Precision(PrecisionArgs),
    /// Variance ratio and N_eps across dimensions on two-cluster Gaussians.
    Instability(InstabilityArgs),
    /// N_eps as the number of partitionings grows.
    VaryT(VaryTArgs),
    /// Monte Carlo frequency of each Voronoi cell.
    Lemma2(Lemma2Args),
    /// Monte Carlo rate at which two points share every cell.
    Theorem2(Theorem2Args),
    /// Distribution of k-occurrences on uniform random data.
    Hubness(HubnessArgs),
    /// Density-peaks clustering.
    ClusterDp(ClusterArgs),
    /// Adjusted mutual information between two labelings.
    Ami(AmiArgs),
    /// Write the IK Gram matrix as dense CSV.
    ExportGram(ExportArgs),
    /// Write the IK feature map as LIBSVM.
    ExportFeatures(ExportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Gaussians,
    WGaussians,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DataFormat {
    Libsvm,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Distance,
    Lk,
    Ik,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QueryArg {
    Between,
    SparseCenter,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SourceArg {
    GivenData,
    Uniform,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistArg {
    Uniform,
    Gaussian,
    TwoCluster,
}

impl DistArg {
    fn dist(self) -> experiments::Distribution {
        match self {
            DistArg::Uniform => experiments::Distribution::Uniform,
            DistArg::Gaussian => experiments::Distribution::Gaussian,
            DistArg::TwoCluster => experiments::Distribution::TwoCluster,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Dimension (gaussians).
    #[arg(long, default_value_t = 2, value_parser = positive)]
    d: usize,
    /// Points per cluster.
    #[arg(long, default_value_t = 200, value_parser = positive)]
    n: usize,
    /// Offset of the second cluster mean along every axis (gaussians).
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    /// Block width (w-gaussians); points live in 2w dimensions.
    #[arg(long, default_value_t = 500, value_parser = positive)]
    w: usize,
    #[arg(long, default_value_t = 1.0)]
    sd1: f64,
    #[arg(long, default_value_t = 1.0)]
    sd2: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = DataFormat::Libsvm)]
    format: DataFormat,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// LIBSVM dataset.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = at_least_two)]
    psi: usize,
    #[arg(long, default_value_t = 200, value_parser = positive)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    /// IKM1 model.
    #[arg(long)]
    model: PathBuf,
    /// LIBSVM dataset.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// How an IK space is obtained when a command needs one.
#[derive(Args, Debug)]
struct IkArgs {
    /// Sample size per partitioning.
    #[arg(long, default_value_t = 16, value_parser = at_least_two)]
    psi: usize,
    /// Grid of psi values: comma list, `a..=b` or `a..=b:step`, or `pow2`
    /// for 2,4,...,1024. Overrides --psi.
    #[arg(long, value_parser = parse_psi_grid)]
    psi_grid: Option<PsiGrid>,
    /// Number of partitionings.
    #[arg(long, default_value_t = 200, value_parser = positive)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl IkArgs {
    fn psis(&self) -> Vec<usize> {
        match &self.psi_grid {
            Some(g) => g.0.clone(),
            None => vec![self.psi],
        }
    }
}

#[derive(Clone, Debug)]
struct PsiGrid(Vec<usize>);

#[derive(Args, Debug)]
struct KnnArgs {
    /// LIBSVM dataset to index.
    #[arg(long)]
    input: PathBuf,
    /// LIBSVM queries; the indexed points themselves when absent.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    k: usize,
    #[arg(long, value_enum, default_value_t = MetricArg::Distance)]
    metric: MetricArg,
    /// IKM1 model for the IK metric; fitted on the input when absent.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 16, value_parser = at_least_two)]
    psi: usize,
    #[arg(long, default_value_t = 200, value_parser = positive)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = index::DEFAULT_LEAF_SIZE, value_parser = positive)]
    leaf_size: usize,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    /// Metrics to compare; repeat the flag or separate with commas.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MetricArg::Distance, MetricArg::Lk, MetricArg::Ik])]
    metric: Vec<MetricArg>,
    #[command(flatten)]
    ik: IkArgs,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    k: usize,
    #[arg(long, default_value_t = index::DEFAULT_LEAF_SIZE, value_parser = positive)]
    leaf_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PrecisionArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MetricArg::Distance, MetricArg::Lk, MetricArg::Ik])]
    metric: Vec<MetricArg>,
    #[command(flatten)]
    ik: IkArgs,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InstabilityArgs {
    /// Dimensions to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [10, 100, 1000, 10000])]
    dims: Vec<usize>,
    /// Points per cluster.
    #[arg(long, default_value_t = 200, value_parser = positive)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    /// Measures such as `ik:16`, `gk:5`, `lk`, `lp:0.5`, `snn:10`, `ag:200`.
    #[arg(long, value_delimiter = ',', default_values = ["ik:16", "gk:5"])]
    measures: Vec<String>,
    /// Adds `ik:<psi>` for every psi in the grid.
    #[arg(long, value_parser = parse_psi_grid)]
    psi_grid: Option<PsiGrid>,
    #[arg(long, default_value_t = 200, value_parser = positive)]
    t: usize,
    #[arg(long, default_value_t = 0.005)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VaryTArgs {
    /// Labeled LIBSVM dataset with clusters 0 and 1; two-cluster Gaussians
    /// are generated when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    d: usize,
    #[arg(long, default_value_t = 200, value_parser = positive)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    #[arg(long, value_enum, default_value_t = QueryArg::SparseCenter)]
    query: QueryArg,
    #[arg(long, default_value_t = 16, value_parser = at_least_two)]
    psi: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000])]
    t_values: Vec<usize>,
    #[arg(long, default_value_t = 10, value_parser = positive)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = SourceArg::Both)]
    source: SourceArg,
    #[arg(long, default_value_t = 0.005)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Lemma2Args {
    #[arg(long, default_value_t = 4, value_parser = positive)]
    psi: usize,
    /// Overrides --psi.
    #[arg(long, value_parser = parse_psi_grid)]
    psi_grid: Option<PsiGrid>,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 100, 1000])]
    dims: Vec<usize>,
    /// Distributions the reference points are drawn from.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [DistArg::Uniform, DistArg::Gaussian, DistArg::TwoCluster])]
    g: Vec<DistArg>,
    /// Distribution the probe point is drawn from.
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    f: DistArg,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Theorem2Args {
    #[arg(long, default_value_t = 16, value_parser = at_least_two)]
    psi: usize,
    #[arg(long, default_value_t = 4, value_parser = positive)]
    t: usize,
    #[arg(long, default_value_t = 100, value_parser = positive)]
    d: usize,
    #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
    dist: DistArg,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HubnessArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [3, 20, 100])]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    n: usize,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_values = ["ik:32", "gk:5"])]
    measures: Vec<String>,
    #[arg(long, default_value_t = 200, value_parser = positive)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Measure such as `ik:16` or `gk:5`; `gkmu:<mu>` sets sigma to d*mu,
    /// or to mu on sparse data with under 1% nonzeros.
    #[arg(long, default_value = "ik:16")]
    measure: String,
    /// Tries `ik:<psi>` for every psi and keeps the best AMI. Overrides
    /// --measure.
    #[arg(long, value_parser = parse_psi_grid)]
    psi_grid: Option<PsiGrid>,
    /// Number of clusters; the number of distinct labels when absent.
    #[arg(long, value_parser = positive)]
    k: Option<usize>,
    /// Density radius as a fraction of the largest dissimilarity; the best
    /// of 0.01..0.99 by AMI against the labels when absent.
    #[arg(long)]
    eps_fraction: Option<f64>,
    /// Skip min-max normalization.
    #[arg(long)]
    no_normalize: bool,
    #[arg(long, default_value_t = 200, value_parser = positive)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Labels CSV.
    #[arg(long)]
    out: PathBuf,
    /// Summary CSV `dataset,measure,ami`.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AmiArgs {
    /// Labels: CSV whose last column is the label, or `.libsvm`.
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn at_least_two(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 2 => Ok(v),
        Ok(_) => Err("must be at least 2".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_psi_grid(s: &str) -> Result<PsiGrid, String> {
    let mut out = Vec::new();
    if s == "pow2" {
        out.extend((1..=10).map(|e| 1usize << e));
    } else {
        for part in s.split(',') {
            let part = part.trim();
            if let Some((lo, rest)) = part.split_once("..=") {
                let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
                let lo = at_least_two(lo)?;
                let hi = at_least_two(hi)?;
                let step = positive(step)?;
                if hi < lo {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend((lo..=hi).step_by(step));
            } else {
                out.push(at_least_two(part)?);
            }
        }
    }
    Ok(PsiGrid(out))
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::KOutOfRange { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the command line given by `argv` (program name first) and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Failure::Data(format!("cannot start worker pool: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("ik: usage error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(m)) => {
            eprintln!("ik: error: {m}");
            EXIT_DATA
        }
    }
}

fn dispatch(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Fit(a) => fit(a),
        Command::Encode(a) => encode(a),
        Command::Knn(a) => knn(a),
        Command::BenchIndex(a) => bench(a),
        Command::Precision(a) => precision(a),
        Command::Instability(a) => instability(a),
        Command::VaryT(a) => vary_t(a),
        Command::Lemma2(a) => lemma2(a),
        Command::Theorem2(a) => theorem2(a),
        Command::Hubness(a) => hubness(a),
        Command::ClusterDp(a) => cluster_dp(a),
        Command::Ami(a) => ami(a),
        Command::ExportGram(a) => export_gram(a),
        Command::ExportFeatures(a) => export_features(a),
    }
}

/// Comment lines written at the top of every output.
fn header(command: &str, seed: Option<u64>, args: &impl Debug) -> Vec<String> {
    let mut h = vec![format!("isokernel {VERSION}"), format!("command: {command}")];
    if let Some(s) = seed {
        h.push(format!("seed: {s}"));
    }
    h.push(format!("params: {args:?}"));
    h
}

fn check_input(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Data(format!("input file not found: {}", path.display())))
    }
}

fn check_output(path: &Path) -> CliResult<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    match parent {
        Some(dir) if !dir.is_dir() => Err(Failure::Data(format!(
            "output directory does not exist: {}",
            dir.display()
        ))),
        _ if path.is_dir() => Err(Failure::Data(format!("output path is a directory: {}", path.display()))),
        _ => Ok(()),
    }
}

fn check_paths(inputs: &[&Path], outputs: &[Option<&Path>]) -> CliResult<()> {
    inputs.iter().try_for_each(|p| check_input(p))?;
    outputs.iter().flatten().try_for_each(|p| check_output(p))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Data(format!("cannot create {}: {e}", path.display())))
}

/// Runs `f` on the file at `path`, or on stdout.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Data(format!("cannot open {}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Failure {
    match Failure::from(e) {
        Failure::Data(m) => Failure::Data(format!("{}: {m}", path.display())),
        u => u,
    }
}

fn load(path: &Path, dim: Option<usize>) -> CliResult<Dataset> {
    let mut ds = datasets::parse_libsvm_with_dim(open(path)?, dim).map_err(|e| in_file(path, e))?;
    if ds.is_empty() {
        return Err(Failure::Data(format!("{}: no data rows", path.display())));
    }
    ds.name = path
        .file_stem()
        .map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned());
    Ok(ds)
}

fn load_model(path: &Path) -> CliResult<IkModel> {
    kio::read_model(open(path)?).map_err(|e| in_file(path, e))
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn write_header(out: &mut dyn Write, lines: &[String]) -> CliResult<()> {
    for l in lines {
        writeln!(out, "# {l}")?;
    }
    Ok(())
}

fn gen(a: &GenArgs) -> CliResult<()> {
    check_paths(&[], &[Some(&a.out)])?;
    let spec = match a.kind {
        GenKind::Gaussians => GeneratorSpec::Gaussians {
            d: a.d,
            n_per_cluster: a.n,
            separation: a.separation,
            seed: a.seed,
        },
        GenKind::WGaussians => GeneratorSpec::WGaussians {
            w: a.w,
            n_per_cluster: a.n,
            sd1: a.sd1,
            sd2: a.sd2,
            seed: a.seed,
        },
    };
    let ds = datasets::generate(&spec)?;
    let mut h = header("gen", Some(a.seed), a);
    h.push(format!("generator: {spec:?}"));
    with_output(Some(&a.out), |w| {
        match a.format {
            DataFormat::Libsvm => datasets::write_libsvm(&ds, &h, w)?,
            DataFormat::Csv => datasets::write_csv(&ds, &h, w)?,
        }
        Ok(())
    })
}

fn fit(a: &FitArgs) -> CliResult<()> {
    check_paths(&[&a.input], &[Some(&a.out)])?;
    let ds = load(&a.input, None)?;
    let model = IkModel::fit(&ds.points, a.psi, a.t, a.seed)?;
    with_output(Some(&a.out), |w| {
        write_header(w, &header("fit", Some(a.seed), a))?;
        kio::write_model(&model, w)?;
        Ok(())
    })
}

fn encode(a: &EncodeArgs) -> CliResult<()> {
    check_paths(&[&a.model, &a.input], &[Some(&a.out)])?;
    let model = load_model(&a.model)?;
    let ds = load(&a.input, Some(model.dim()))?;
    let codes = model.encode_all(&ds.points)?;
    with_output(Some(&a.out), |w| {
        write_header(w, &header("encode", Some(model.seed()), a))?;
        kio::write_codes(&codes, w)?;
        Ok(())
    })
}

fn space_for(metric: MetricArg, ds: &Dataset, psi: usize, t: usize, seed: u64) -> CliResult<MetricSpace> {
    Ok(match metric {
        MetricArg::Distance => MetricSpace::RawEuclidean,
        MetricArg::Lk => MetricSpace::NormalizedLinear,
        MetricArg::Ik => MetricSpace::IkFeature(IkModel::fit(&ds.points, psi, t, seed)?),
    })
}

/// One `(label, space)` per metric, with IK expanded over the psi grid.
fn spaces(metrics: &[MetricArg], ds: &Dataset, ik: &IkArgs) -> CliResult<Vec<(String, MetricSpace)>> {
    let mut out = Vec::new();
    for &m in metrics {
        if m == MetricArg::Ik {
            for psi in ik.psis() {
                out.push((format!("IK(psi={psi})"), space_for(m, ds, psi, ik.t, ik.seed)?));
            }
        } else {
            let s = space_for(m, ds, 2, 1, 0)?;
            out.push((s.name().to_string(), s));
        }
    }
    Ok(out)
}

fn knn(a: &KnnArgs) -> CliResult<()> {
    let mut inputs: Vec<&Path> = vec![&a.input];
    inputs.extend(a.queries.as_deref());
    inputs.extend(a.model.as_deref());
    check_paths(&inputs, &[a.out.as_deref()])?;
    let ds = load(&a.input, None)?;
    let queries = match &a.queries {
        Some(p) => load(p, Some(ds.dim))?,
        None => ds.clone(),
    };
    if queries.dim != ds.dim {
        return Err(Failure::Data(format!(
            "queries have dimension {} but the data has {}",
            queries.dim, ds.dim
        )));
    }
    let space = match (&a.model, a.metric) {
        (Some(p), MetricArg::Ik) => {
            let m = load_model(p)?;
            if m.dim() != ds.dim {
                return Err(Failure::Data(format!("model dimension {} does not match data dimension {}", m.dim(), ds.dim)));
            }
            MetricSpace::IkFeature(m)
        }
        (Some(_), _) => return Err(usage("--model only applies to --metric ik")),
        (None, m) => space_for(m, &ds, a.psi, a.t, a.seed)?,
    };
    let results = index::knn(&ds.points, &queries.points, &space, a.k, a.leaf_size)?;
    let seed = match &space {
        MetricSpace::IkFeature(m) => Some(m.seed()),
        _ => None,
    };
    with_output(a.out.as_deref(), |w| {
        index::write_knn_csv(&results, &header("knn", seed, a), w)?;
        Ok(())
    })
}

fn bench(a: &BenchArgs) -> CliResult<()> {
    check_paths(&[&a.input], &[a.out.as_deref()])?;
    let ds = load(&a.input, None)?;
    let mut reports = Vec::new();
    for (label, space) in spaces(&a.metric, &ds, &a.ik)? {
        let mut r = index::bench_index(&ds, &space, a.k, a.leaf_size)?;
        r.metric = label;
        reports.push(r);
    }
    with_output(a.out.as_deref(), |w| {
        index::write_bench_csv(&reports, &header("bench-index", Some(a.ik.seed), a), w)?;
        Ok(())
    })
}

fn precision(a: &PrecisionArgs) -> CliResult<()> {
    check_paths(&[&a.input], &[a.out.as_deref()])?;
    let ds = load(&a.input, None)?;
    let mut rows = Vec::new();
    for (label, space) in spaces(&a.metric, &ds, &a.ik)? {
        rows.push((label, index::precision_at_k(&ds, &space, a.k)?));
    }
    with_output(a.out.as_deref(), |w| {
        write_header(w, &header("precision", Some(a.ik.seed), a))?;
        writeln!(w, "dataset,metric,k,precision")?;
        for (label, p) in &rows {
            writeln!(w, "{},{label},{},{p}", ds.name, a.k)?;
        }
        Ok(())
    })
}

fn parse_measures(specs: &[String]) -> CliResult<Vec<MeasureKind>> {
    specs
        .iter()
        .map(|s| s.parse::<MeasureKind>().map_err(Failure::from))
        .collect()
}

fn instability(a: &InstabilityArgs) -> CliResult<()> {
    check_paths(&[], &[a.out.as_deref()])?;
    if a.dims.is_empty() || a.dims.contains(&0) {
        return Err(usage("--dims must be positive"));
    }
    if !(a.epsilon > 0.0) {
        return Err(usage("--epsilon must be positive"));
    }
    let mut measures = parse_measures(&a.measures)?;
    if let Some(g) = &a.psi_grid {
        measures.extend(g.0.iter().map(|&psi| MeasureKind::Ik { psi }));
    }
    let cfg = experiments::InstabilityConfig {
        dims: a.dims.clone(),
        n_per_cluster: a.n,
        separation: a.separation,
        measures,
        t: a.t,
        epsilon: a.epsilon,
        seed: a.seed,
    };
    let rows = experiments::instability_sweep(&cfg)?;
    with_output(a.out.as_deref(), |w| {
        experiments::write_instability_csv(&rows, &header("instability", Some(a.seed), a), w)?;
        Ok(())
    })
}

fn vary_t(a: &VaryTArgs) -> CliResult<()> {
    let inputs: Vec<&Path> = a.input.iter().map(|p| p.as_path()).collect();
    check_paths(&inputs, &[a.out.as_deref()])?;
    let ds = match &a.input {
        Some(p) => load(p, None)?,
        None => datasets::gen_gaussians(a.d, a.n, a.separation, a.seed)?,
    };
    let wanted = match a.query {
        QueryArg::Between => QueryKind::BetweenClusters,
        QueryArg::SparseCenter => QueryKind::SparseCenter,
    };
    let q = experiments::cluster_queries(&ds)?
        .into_iter()
        .find(|(k, _)| *k == wanted)
        .map(|(_, q)| q)
        .expect("both query kinds are produced");
    let sources: &[PartitionSource] = match a.source {
        SourceArg::GivenData => &[PartitionSource::GivenData],
        SourceArg::Uniform => &[PartitionSource::Uniform],
        SourceArg::Both => &[PartitionSource::GivenData, PartitionSource::Uniform],
    };
    let mut rows = Vec::new();
    for &src in sources {
        rows.extend(experiments::vary_t_sweep(&ds, &q, a.psi, &a.t_values, a.trials, src, a.epsilon, a.seed)?);
    }
    with_output(a.out.as_deref(), |w| {
        experiments::write_tsweep_csv(&rows, &header("vary-t", Some(a.seed), a), w)?;
        Ok(())
    })
}

fn lemma2(a: &Lemma2Args) -> CliResult<()> {
    check_paths(&[], &[a.out.as_deref()])?;
    let psis = match &a.psi_grid {
        Some(g) => g.0.clone(),
        None => vec![a.psi],
    };
    let mut reports = Vec::new();
    for &psi in &psis {
        for &d in &a.dims {
            for g in &a.g {
                reports.push(experiments::cell_probability_test(psi, g.dist(), a.f.dist(), d, a.trials, a.seed)?);
            }
        }
    }
    with_output(a.out.as_deref(), |w| {
        write_header(w, &header("lemma2", Some(a.seed), a))?;
        writeln!(w, "psi,d,g,f,trials,cell,frequency,band,within_band")?;
        for r in &reports {
            for (cell, f) in r.frequencies.iter().enumerate() {
                let inside = (f - 1.0 / r.psi as f64).abs() <= r.band;
                writeln!(
                    w,
                    "{},{},{},{},{},{cell},{f},{},{inside}",
                    r.psi,
                    r.d,
                    r.g.name(),
                    r.f.name(),
                    r.trials,
                    r.band
                )?;
            }
        }
        Ok(())
    })?;
    let ok = reports.iter().filter(|r| r.within_band()).count();
    eprintln!("lemma2: {ok}/{} configurations within the 3-sigma band", reports.len());
    Ok(())
}

fn theorem2(a: &Theorem2Args) -> CliResult<()> {
    check_paths(&[], &[a.out.as_deref()])?;
    let r = experiments::collision_test(a.psi, a.t, a.d, a.dist.dist(), a.trials, a.seed)?;
    with_output(a.out.as_deref(), |w| {
        write_header(w, &header("theorem2", Some(a.seed), a))?;
        writeln!(w, "psi,t,d,dist,trials,collisions,rate,bound,band,within_bound")?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.psi,
            r.t,
            r.d,
            a.dist.dist().name(),
            r.trials,
            r.collisions,
            r.rate,
            r.bound,
            r.band,
            r.within_bound()
        )?;
        Ok(())
    })
}

fn hubness(a: &HubnessArgs) -> CliResult<()> {
    check_paths(&[], &[a.out.as_deref()])?;
    if a.dims.is_empty() || a.dims.contains(&0) {
        return Err(usage("--dims must be positive"));
    }
    if a.k >= a.n {
        return Err(usage(format!("--k {} must be below --n {}", a.k, a.n)));
    }
    let measures = parse_measures(&a.measures)?;
    let results = experiments::hubness_sweep(&a.dims, a.n, a.k, &measures, a.t, a.seed)?;
    let rows: Vec<_> = results
        .iter()
        .flat_map(|(d, kind, res)| res.rows(&kind.label(), *d))
        .collect();
    with_output(a.out.as_deref(), |w| {
        experiments::write_hubness_csv(&rows, &header("hubness", Some(a.seed), a), w)?;
        Ok(())
    })?;
    for (d, kind, res) in &results {
        eprintln!("hubness: {} d={d} skewness={:.4}", kind.label(), res.skewness);
    }
    Ok(())
}

/// `gkmu:<mu>` resolves to a Gaussian kernel with sigma `d * mu`, or `mu`
/// when under 1% of the attributes are nonzero.
fn resolve_measure(spec: &str, ds: &Dataset) -> CliResult<MeasureKind> {
    if let Some(mu) = spec.strip_prefix("gkmu:") {
        let mu: f64 = mu.parse().map_err(|_| usage(format!("bad measure `{spec}`")))?;
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(usage(format!("bad measure `{spec}`")));
        }
        let nonzeros: usize = ds.points.iter().map(|p| p.iter_nonzero().count()).sum();
        let density = nonzeros as f64 / (ds.len() * ds.dim.max(1)) as f64;
        let sigma = if density < 0.01 { mu } else { ds.dim as f64 * mu };
        return Ok(MeasureKind::Gaussian { sigma });
    }
    Ok(spec.parse()?)
}

fn cluster_dp(a: &ClusterArgs) -> CliResult<()> {
    let mut outs = vec![Some(a.out.as_path())];
    outs.push(a.summary.as_deref());
    check_paths(&[&a.input], &outs)?;
    let raw = load(&a.input, None)?;
    let ds = if a.no_normalize { raw } else { datasets::minmax_normalize(&raw)? };
    let truth = ds.labels.clone();
    let k = match (a.k, &truth) {
        (Some(k), _) => k,
        (None, Some(l)) => l.iter().collect::<BTreeSet<_>>().len(),
        (None, None) => return Err(usage("--k is required for unlabeled data")),
    };
    if let Some(f) = a.eps_fraction {
        if !(f > 0.0 && f <= 1.0) {
            return Err(usage("--eps-fraction must be in (0, 1]"));
        }
    }
    let kinds = match &a.psi_grid {
        Some(g) => g.0.iter().map(|&psi| MeasureKind::Ik { psi }).collect(),
        None => vec![resolve_measure(&a.measure, &ds)?],
    };
    let mut best: Option<(MeasureKind, experiments::ClusterResult)> = None;
    for kind in kinds {
        let spec = kind.fit(&ds.points, a.t, a.seed)?;
        let matrix = PreparedMeasure::new(&spec, &ds.points)?.matrix();
        let res = match (a.eps_fraction, &truth) {
            (Some(f), _) => {
                let mut r = experiments::dp_cluster(&matrix, k, f)?;
                if let Some(tr) = &truth {
                    let labels: Vec<i64> = r.labels.iter().map(|&l| l as i64).collect();
                    r.ami_vs_truth = Some(experiments::ami(tr, &labels)?);
                }
                r
            }
            (None, Some(tr)) => experiments::dp_best(&matrix, k, tr, &experiments::eps_grid())?,
            (None, None) => return Err(usage("--eps-fraction is required for unlabeled data")),
        };
        let better = match &best {
            None => true,
            Some((_, b)) => res.ami_vs_truth.unwrap_or(f64::NEG_INFINITY) > b.ami_vs_truth.unwrap_or(f64::NEG_INFINITY),
        };
        if better {
            best = Some((kind, res));
        }
    }
    let (kind, res) = best.expect("at least one measure");
    let mut h = header("cluster-dp", Some(a.seed), a);
    h.push(format!("chosen: measure={} eps_fraction={} centers={:?}", kind, res.eps_fraction, res.centers));
    let mut w = create(&a.out)?;
    experiments::write_clustering_csv(&res.labels, &h, &mut w)?;
    w.flush()?;
    if let Some(ami) = res.ami_vs_truth {
        if let Some(p) = &a.summary {
            let mut w = create(p)?;
            experiments::write_summary_csv(&[(ds.name.clone(), kind.label(), ami)], &h, &mut w)?;
            w.flush()?;
        }
        println!("{},{},{ami}", ds.name, kind.label());
    }
    Ok(())
}

/// Labels from a LIBSVM file or from the last column of a CSV whose first
/// non-comment line is a header.
fn read_labels(path: &Path) -> CliResult<Vec<i64>> {
    if path.extension().is_some_and(|e| e == "libsvm") {
        let ds = load(path, None)?;
        return Ok(ds.labels.unwrap_or_default());
    }
    let text = std::fs::read_to_string(path)?;
    let mut labels = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            seen_header = true;
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or("").trim();
        let v = field.parse::<i64>().map_err(|_| {
            Failure::Data(format!("{}: line {}: bad label `{field}`", path.display(), i + 1))
        })?;
        labels.push(v);
    }
    if labels.is_empty() {
        return Err(Failure::Data(format!("{}: no labels", path.display())));
    }
    Ok(labels)
}

fn ami(a: &AmiArgs) -> CliResult<()> {
    check_paths(&[&a.a, &a.b], &[a.out.as_deref()])?;
    let la = read_labels(&a.a)?;
    let lb = read_labels(&a.b)?;
    let v = experiments::ami(&la, &lb).map_err(|e| match e {
        Error::LengthMismatch(x, y) => Failure::Data(format!("label files differ in length: {x} vs {y}")),
        e => e.into(),
    })?;
    with_output(a.out.as_deref(), |w| {
        write_header(w, &header("ami", None, a))?;
        writeln!(w, "ami")?;
        writeln!(w, "{v}")?;
        Ok(())
    })
}

fn export_prepare(a: &ExportArgs) -> CliResult<(IkModel, Dataset, Vec<kernel::IkCode>)> {
    check_paths(&[&a.model, &a.input], &[Some(&a.out)])?;
    let model = load_model(&a.model)?;
    let ds = load(&a.input, Some(model.dim()))?;
    let codes = model.encode_all(&ds.points)?;
    Ok((model, ds, codes))
}

fn export_gram(a: &ExportArgs) -> CliResult<()> {
    let (model, _, codes) = export_prepare(a)?;
    let g = kernel::gram_from_codes(&codes);
    with_output(Some(&a.out), |w| {
        write_header(w, &header("export-gram", Some(model.seed()), a))?;
        let mut line = String::new();
        for row in &g {
            line.clear();
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&v.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    })
}

fn export_features(a: &ExportArgs) -> CliResult<()> {
    let (model, ds, codes) = export_prepare(a)?;
    with_output(Some(&a.out), |w| {
        let mut h = header("export-features", Some(model.seed()), a);
        h.push(format!("columns: {}", model.t() * model.psi()));
        write_header(w, &h)?;
        let mut line = String::new();
        for (i, c) in codes.iter().enumerate() {
            line.clear();
            let label = ds.labels.as_ref().map_or(0, |l| l[i]);
            line.push_str(&label.to_string());
            for (j, v) in kernel::feature_row(c) {
                line.push_str(&format!(" {}:{v}", j + 1));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    })
}
