use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use flexbayes::classifier::{ClassifierModel, EstimatorChoice, KernelWidth, TrainConfig};
use flexbayes::data::{Cell, Dataset};
use flexbayes::density::{DensityModel, SigmaConvention, Smoothing};
use flexbayes::evaluation::{cross_validate, learning_curve, CurveConfig, CvConfig};
use flexbayes::io::tsv::{self, DatasetSummary};
use flexbayes::io::{self as fio, CsvOptions, Grid, SchemaFile};
use flexbayes::synthetic::{bayes_error_with_tolerance, hypothesis1_spec, hypothesis2_spec, sample, SyntheticSpec};

/// Naive Bayes with single-Gaussian or kernel density estimates for
/// continuous attributes.
#[derive(Parser)]
#[command(name = "flexbayes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier and write it as a model file.
    Train(TrainArgs),
    /// Label every row of a CSV file with a trained model.
    Predict(PredictArgs),
    /// Cross-validate the estimators on a dataset and compare them.
    Cv(CvArgs),
    /// Learning curves on a synthetic domain.
    Curve(CurveArgs),
    /// Bayes-optimal error rate of a two-class synthetic domain.
    BayesError(BayesErrorArgs),
    /// Fitted densities and a histogram of one attribute, on a grid.
    PlotDensity(PlotArgs),
    /// Draw a labeled sample from a synthetic domain as CSV.
    Sample(SampleArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV data file.
    data: PathBuf,
    /// Schema sidecar describing the CSV columns.
    schema: PathBuf,
    /// The CSV file has no header row.
    #[arg(long)]
    no_header: bool,
}

impl DataArgs {
    fn load(&self) -> Result<(SchemaFile, Dataset<f64>)> {
        let options = CsvOptions {
            has_header: !self.no_header,
            class_optional: false,
        };
        Ok(fio::load_dataset(&self.data, &self.schema, options)?)
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Nominal probability estimate: mle or laplace.
    #[arg(long, default_value = "mle", value_parser = parse_smoothing)]
    smoothing: Smoothing,
    /// Standard deviation divisor for the Gaussian estimator: ml (n) or unbiased (n - 1).
    #[arg(long, default_value = "ml", value_parser = parse_sigma)]
    sigma: SigmaConvention,
    /// Kernel width rule: scaled (attribute std / sqrt(n_c)) or unit (1 / sqrt(n_c)).
    #[arg(long, default_value = "scaled", value_parser = parse_kernel_width)]
    kernel_width: KernelWidth,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Continuous estimator: gaussian or kernel.
    #[arg(long, default_value = "gaussian", value_parser = parse_estimator)]
    estimator: EstimatorChoice,
    #[command(flatten)]
    model: ModelArgs,
    /// Model file to write.
    #[arg(short, long = "out", alias = "output")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Model file written by `train`.
    model: PathBuf,
    /// CSV data in the training layout; the class column may be omitted or `?`.
    data: PathBuf,
    /// The CSV file has no header row.
    #[arg(long)]
    no_header: bool,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of folds.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Seed for every random choice; equal seeds give identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated estimators; the first two are compared.
    #[arg(long, default_value = "gaussian,kernel", value_parser = parse_estimators)]
    estimators: Estimators,
    /// Keep class proportions equal across folds.
    #[arg(long)]
    stratified: bool,
    #[command(flatten)]
    model: ModelArgs,
    /// Dataset name in the report (defaults to the data file stem).
    #[arg(long)]
    name: Option<String>,
    /// Also write the per-fold accuracy table to this file.
    #[arg(long)]
    folds: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpecArg {
    /// Domain: builtin:h1, builtin:h2, or a domain file.
    #[arg(long, default_value = "builtin:h1")]
    spec: String,
}

impl SpecArg {
    fn load(&self) -> Result<SyntheticSpec<f64>> {
        match self.spec.as_str() {
            "builtin:h1" => Ok(hypothesis1_spec()),
            "builtin:h2" => Ok(hypothesis2_spec()),
            s if s.starts_with("builtin:") => bail!("unknown builtin domain `{s}` (expected builtin:h1 or builtin:h2)"),
            path => Ok(fio::load_spec(path)?),
        }
    }
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Comma-separated ascending training-set sizes.
    #[arg(long, default_value = "10,20,50,100,200,500,1000", value_parser = parse_sizes)]
    sizes: Sizes,
    /// Training sets per size.
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// Size of the test set.
    #[arg(long, default_value_t = 1000)]
    test: usize,
    /// Seed for every random choice; equal seeds give identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated estimators to run at every size.
    #[arg(long, default_value = "gaussian,kernel", value_parser = parse_estimators)]
    estimators: Estimators,
    /// Draw a new test set for every run instead of sharing one.
    #[arg(long)]
    fresh_test_sets: bool,
    #[command(flatten)]
    model: ModelArgs,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BayesErrorArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = flexbayes::synthetic::BAYES_ERROR_TOLERANCE)]
    tolerance: f64,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Continuous attribute to plot.
    #[arg(long)]
    attribute: String,
    /// Restrict to one class (default: all rows, fitted as one sample).
    #[arg(long)]
    class: Option<String>,
    /// Grid as lo,hi,steps (default: the data range padded by three standard deviations, 200 steps).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(f64, f64, usize)>,
    #[command(flatten)]
    model: ModelArgs,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Number of instances.
    #[arg(short, long)]
    n: usize,
    /// Seed for every random choice; equal seeds give identical output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the matching schema sidecar here.
    #[arg(long)]
    schema_out: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone)]
struct Sizes(Vec<usize>);

#[derive(Clone)]
struct Estimators(Vec<EstimatorChoice>);

fn parse_estimator(s: &str) -> Result<EstimatorChoice, String> {
    EstimatorChoice::from_name(s).ok_or_else(|| format!("unknown estimator `{s}` (expected gaussian or kernel)"))
}

fn parse_estimators(s: &str) -> Result<Estimators, String> {
    let list = match s {
        "both" => EstimatorChoice::BOTH.to_vec(),
        _ => s
            .split(',')
            .map(|e| parse_estimator(e.trim()))
            .collect::<Result<_, _>>()?,
    };
    if list.is_empty() {
        return Err("no estimators given".into());
    }
    Ok(Estimators(list))
}

fn parse_smoothing(s: &str) -> Result<Smoothing, String> {
    Smoothing::from_name(s).ok_or_else(|| format!("unknown smoothing `{s}` (expected mle or laplace)"))
}

fn parse_sigma(s: &str) -> Result<SigmaConvention, String> {
    SigmaConvention::from_name(s).ok_or_else(|| format!("unknown sigma convention `{s}` (expected ml or unbiased)"))
}

fn parse_kernel_width(s: &str) -> Result<KernelWidth, String> {
    KernelWidth::from_name(s).ok_or_else(|| format!("unknown kernel width `{s}` (expected scaled or unit)"))
}

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("bad size `{x}`: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Sizes)
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err("expected lo,hi,steps".into());
    };
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("bad grid bound `{x}`: {e}"));
    Ok((
        num(lo)?,
        num(hi)?,
        steps.parse().map_err(|e| format!("bad step count `{steps}`: {e}"))?,
    ))
}

fn train_config(choice: EstimatorChoice, m: &ModelArgs) -> TrainConfig {
    TrainConfig::new(choice)
        .with_smoothing(m.smoothing)
        .with_sigma(m.sigma)
        .with_kernel_width(m.kernel_width)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn train(args: &TrainArgs) -> Result<()> {
    let (layout, data) = args.data.load()?;
    let model = flexbayes::classifier::train(&data, train_config(args.estimator, &args.model))?;
    fio::save_model(&model, &layout, &args.out)?;
    Ok(())
}

fn predict(args: &PredictArgs) -> Result<()> {
    let (model, layout) = fio::load_model::<f64>(&args.model)?;
    let file = std::fs::File::open(&args.data).with_context(|| format!("opening {}", args.data.display()))?;
    let options = CsvOptions {
        has_header: !args.no_header,
        class_optional: true,
    };
    let data: Dataset<f64> = fio::read_dataset(file, &layout, options, &args.data)?;
    let posteriors = model
        .predict_batch(data.instances())
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.with_context(|| format!("instance {i}")))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<_> = data
        .instances()
        .iter()
        .zip(&posteriors)
        .map(|(inst, p)| (inst.label.as_deref(), p))
        .collect();
    emit(args.output.as_deref(), &tsv::predictions(model.schema(), &rows))
}

fn cv(args: &CvArgs) -> Result<()> {
    let (_, data) = args.data.load()?;
    let config = CvConfig {
        k: args.k,
        seed: args.seed,
        stratified: args.stratified,
        smoothing: args.model.smoothing,
        sigma: args.model.sigma,
        kernel_width: args.model.kernel_width,
    };
    let report = cross_validate(&data, &args.estimators.0, &config)?;
    let name = match &args.name {
        Some(n) => n.clone(),
        None => args
            .data
            .data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "data".into()),
    };
    if let Some(path) = &args.folds {
        emit(Some(path), &tsv::cv_folds(&report))?;
    }
    let summary = DatasetSummary::of(name, &data);
    emit(args.output.as_deref(), &tsv::cv_summary(&[(summary, report)]))
}

fn curve(args: &CurveArgs) -> Result<()> {
    let spec = args.spec.load()?;
    let config = CurveConfig {
        runs: args.runs,
        test_size: args.test,
        seed: args.seed,
        fresh_test_sets: args.fresh_test_sets,
        smoothing: args.model.smoothing,
        sigma: args.model.sigma,
        kernel_width: args.model.kernel_width,
        ..CurveConfig::new(args.sizes.0.clone())
    };
    let curves = args
        .estimators
        .0
        .iter()
        .map(|&choice| learning_curve(&spec, choice, &config))
        .collect::<flexbayes::Result<Vec<_>>>()?;
    emit(args.output.as_deref(), &tsv::learning_curves(&curves))
}

fn bayes_error(args: &BayesErrorArgs) -> Result<()> {
    let spec = args.spec.load()?;
    if args.tolerance.is_nan() || args.tolerance <= 0.0 {
        bail!("tolerance must be positive");
    }
    let result = bayes_error_with_tolerance(&spec, args.tolerance)?;
    emit(args.output.as_deref(), &format!("{}\n", tsv::num(result.error)))
}

fn plot_density(args: &PlotArgs) -> Result<()> {
    let (_, data) = args.data.load()?;
    let schema = data.schema();
    let j = schema
        .attribute_index(&args.attribute)
        .ok_or_else(|| anyhow!("no attribute named `{}`", args.attribute))?;
    if !schema.attribute(j).kind.is_continuous() {
        bail!(
            "attribute `{}` is nominal; only continuous attributes can be plotted",
            args.attribute
        );
    }
    let class = match &args.class {
        Some(label) => Some(
            schema
                .label_index(label)
                .ok_or_else(|| anyhow!("no class label `{label}`"))?,
        ),
        None => None,
    };
    let values: Vec<f64> = data
        .instances()
        .iter()
        .filter(|inst| match (class, &inst.label) {
            (None, _) => true,
            (Some(c), Some(l)) => l == &schema.labels()[c],
            (Some(_), None) => false,
        })
        .filter_map(|inst| match inst.values[j] {
            Cell::Continuous(x) => Some(x),
            _ => None,
        })
        .collect();
    if values.is_empty() {
        bail!("no observed values of `{}` to plot", args.attribute);
    }

    // Fit both estimators exactly as training would: per class, or on all
    // rows relabeled to a single class.
    let fitted = |choice| -> Result<DensityModel<f64>> {
        let config = train_config(choice, &args.model);
        let (model, c) = match class {
            Some(c) => (flexbayes::classifier::train(&data, config)?, c),
            None => {
                let pooled: Vec<_> = data
                    .instances()
                    .iter()
                    .map(|inst| flexbayes::data::Instance::labeled(inst.values.clone(), schema.labels()[0].clone()))
                    .collect();
                let pooled = Dataset::new(data.shared_schema(), pooled);
                (
                    ClassifierModel::train(pooled.shared_schema(), pooled.instances(), config)?,
                    0,
                )
            }
        };
        model
            .conditional(c, j)
            .cloned()
            .ok_or_else(|| anyhow!("no observed values of `{}` to fit", args.attribute))
    };
    let (DensityModel::Gaussian(g), DensityModel::Kernel(k)) = (
        fitted(EstimatorChoice::SingleGaussian)?,
        fitted(EstimatorChoice::KernelDensity)?,
    ) else {
        bail!("unexpected estimator kinds for a continuous attribute");
    };
    let grid = match args.grid {
        Some((lo, hi, steps)) => Grid::new(lo, hi, steps)?,
        None => Grid::covering(&values, 3.0, 200)?,
    };
    let series = fio::density_plot_fitted(&g, &k, &values, &grid)?;
    emit(args.output.as_deref(), &tsv::plot_series(&series))
}

fn sample_cmd(args: &SampleArgs) -> Result<()> {
    let spec = args.spec.load()?;
    let data = sample(&spec, args.n, args.seed);
    let layout = SchemaFile::trailing_class(data.shared_schema());
    let mut text = format!("{}\n", layout.column_names().join(","));
    for inst in data.instances() {
        let Cell::Continuous(x) = inst.values[0] else {
            unreachable!("synthetic instances have one continuous value")
        };
        text.push_str(&format!("{x},{}\n", inst.label.as_deref().unwrap_or("?")));
    }
    if let Some(path) = &args.schema_out {
        emit(Some(path), &layout.to_text())?;
    }
    emit(args.output.as_deref(), &text)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Cv(a) => cv(a),
        Command::Curve(a) => curve(a),
        Command::BayesError(a) => bayes_error(a),
        Command::PlotDensity(a) => plot_density(a),
        Command::Sample(a) => sample_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("flexbayes: error: {message}");
            ExitCode::FAILURE
        }
    }
}
