//! K-fold cross-validation with paired t-tests, and learning curves on
//! synthetic domains.
//!
//! Every random choice is drawn from a ChaCha stream derived from the
//! caller's seed, so reports are reproducible bit for bit.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classifier::{ClassifierModel, EstimatorChoice, KernelWidth, TrainConfig};
use crate::data::{label_index_of, Dataset, Instance};
use crate::density::{SigmaConvention, Smoothing};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::student_t_cdf;
use crate::synthetic::SyntheticSpec;

/// One-sided significance at or above which a comparison names a winner.
pub const WINNER_SIGNIFICANCE: f64 = 0.95;

/// Assignment of instances to folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    seed: u64,
    k: usize,
    assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Fold id of every instance.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    /// Training and test indices for `fold`, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.assignments.len()).partition(|&i| self.assignments[i] != fold)
    }
}

fn check_folds(n: usize, k: usize) -> Result<()> {
    if k < 2 || n < k {
        return Err(Error::InvalidFolds { n, k });
    }
    Ok(())
}

/// Uniform random partition of `0..n` into `k` folds whose sizes differ by
/// at most one.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    check_folds(n, k)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan { seed, k, assignments })
}

/// Like [`make_folds`] but deals each class round-robin so class
/// proportions are close to equal across folds.
pub fn make_stratified_folds(labels: &[usize], k: usize, seed: u64) -> Result<FoldPlan> {
    check_folds(labels.len(), k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut assignments = vec![0; labels.len()];
    let mut next = 0;
    for c in 0..num_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignments[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldPlan { seed, k, assignments })
}

/// Outcome of a one-sample t-test on paired differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedT {
    pub t: f64,
    pub dof: usize,
    /// One-sided confidence `F_t(|t|)` that the mean difference has the sign
    /// of `t`; 0.5 when there is no difference.
    pub significance: f64,
}

/// Paired t-test on `differences` with `n - 1` degrees of freedom.
///
/// Zero-variance inputs follow fixed conventions: all-zero differences give
/// `t = 0` and significance 0.5; a constant non-zero difference gives
/// `t = ±inf` and significance 1.
pub fn paired_t(differences: &[f64]) -> Result<PairedT> {
    let n = differences.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a paired t-test needs at least two differences, got {n}"
        )));
    }
    let dof = n - 1;
    let mean = differences.iter().sum::<f64>() / n as f64;
    let var = differences.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / dof as f64;
    let se = (var / n as f64).sqrt();

    // Differences of fold accuracies are exact multiples of 1/|fold|; treat
    // rounding-level spread as none.
    let scale = differences.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if se <= 1e-12 * scale.max(f64::MIN_POSITIVE) || se == 0.0 {
        if mean.abs() <= 1e-12 * scale || mean == 0.0 {
            return Ok(PairedT {
                t: 0.0,
                dof,
                significance: 0.5,
            });
        }
        return Ok(PairedT {
            t: mean.signum() * f64::INFINITY,
            dof,
            significance: 1.0,
        });
    }
    let t = mean / se;
    Ok(PairedT {
        t,
        dof,
        significance: student_t_cdf(t.abs(), dof as f64),
    })
}

/// Mean and sample standard deviation (`n - 1`); the deviation is 0 for a
/// single value.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvConfig {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub smoothing: Smoothing,
    pub sigma: SigmaConvention,
    pub kernel_width: KernelWidth,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            k: 10,
            seed: 0,
            stratified: false,
            smoothing: Smoothing::Mle,
            sigma: SigmaConvention::MaximumLikelihood,
            kernel_width: KernelWidth::Scaled,
        }
    }
}

impl CvConfig {
    pub fn train_config(&self, choice: EstimatorChoice) -> TrainConfig {
        TrainConfig::new(choice)
            .with_smoothing(self.smoothing)
            .with_sigma(self.sigma)
            .with_kernel_width(self.kernel_width)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub choice: EstimatorChoice,
    pub per_fold_accuracy: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// `std / sqrt(k)`.
    pub std_error: f64,
    /// Test predictions that fell back to the priors.
    pub degenerate_predictions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub baseline: EstimatorChoice,
    pub challenger: EstimatorChoice,
    /// Test on `challenger - baseline` per-fold accuracy differences.
    pub test: PairedT,
    pub winner: Option<EstimatorChoice>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub k: usize,
    pub seed: u64,
    pub fold_sizes: Vec<usize>,
    pub methods: Vec<MethodResult>,
    /// Present when at least two methods were evaluated; compares the first
    /// two.
    pub comparison: Option<Comparison>,
    /// Folds whose training portion lacked at least one declared class.
    pub absent_class_folds: Vec<usize>,
}

impl EvalReport {
    pub fn method(&self, choice: EstimatorChoice) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.choice == choice)
    }
}

/// K-fold cross-validation of each method on the same folds.
pub fn cross_validate<T: Scalar>(
    dataset: &Dataset<T>,
    methods: &[EstimatorChoice],
    config: &CvConfig,
) -> Result<EvalReport> {
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no methods to evaluate".into()));
    }
    let labels = dataset.label_indices()?;
    let plan = if config.stratified {
        make_stratified_folds(&labels, config.k, config.seed)?
    } else {
        make_folds(dataset.len(), config.k, config.seed)?
    };
    let schema = dataset.shared_schema();

    let mut accuracies = vec![Vec::with_capacity(config.k); methods.len()];
    let mut degenerate = vec![0; methods.len()];
    let mut absent_class_folds = Vec::new();

    for fold in 0..config.k {
        let (train_idx, test_idx) = plan.split(fold);
        let train_rows = train_idx.iter().map(|&i| &dataset.instances()[i]);
        let mut flagged = false;
        for (m, &choice) in methods.iter().enumerate() {
            let model = ClassifierModel::train(schema.clone(), train_rows.clone(), config.train_config(choice))?;
            flagged |= !model.absent_classes().is_empty();
            let mut correct = 0;
            for &i in &test_idx {
                let p = model.posterior(&dataset.instances()[i])?;
                degenerate[m] += usize::from(p.degenerate);
                correct += usize::from(p.predicted == labels[i]);
            }
            accuracies[m].push(correct as f64 / test_idx.len() as f64);
        }
        if flagged {
            absent_class_folds.push(fold);
        }
    }

    let sqrt_k = (config.k as f64).sqrt();
    let results: Vec<MethodResult> = methods
        .iter()
        .zip(accuracies)
        .zip(degenerate)
        .map(|((&choice, per_fold_accuracy), degenerate_predictions)| {
            let (mean, std) = mean_std(&per_fold_accuracy);
            MethodResult {
                choice,
                per_fold_accuracy,
                mean,
                std,
                std_error: std / sqrt_k,
                degenerate_predictions,
            }
        })
        .collect();

    let comparison = if results.len() >= 2 {
        let (a, b) = (&results[0], &results[1]);
        let diffs: Vec<f64> = b
            .per_fold_accuracy
            .iter()
            .zip(&a.per_fold_accuracy)
            .map(|(y, x)| y - x)
            .collect();
        let test = paired_t(&diffs)?;
        let winner = (test.significance >= WINNER_SIGNIFICANCE && test.t != 0.0).then_some(if test.t > 0.0 {
            b.choice
        } else {
            a.choice
        });
        Some(Comparison {
            baseline: a.choice,
            challenger: b.choice,
            test,
            winner,
        })
    } else {
        None
    };

    Ok(EvalReport {
        k: config.k,
        seed: config.seed,
        fold_sizes: plan.fold_sizes(),
        methods: results,
        comparison,
        absent_class_folds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub train_size: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub choice: EstimatorChoice,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    pub sizes: Vec<usize>,
    pub runs: usize,
    pub test_size: usize,
    pub seed: u64,
    /// Draw a new test set for every training size instead of sharing one.
    pub fresh_test_sets: bool,
    pub smoothing: Smoothing,
    pub sigma: SigmaConvention,
    pub kernel_width: KernelWidth,
}

impl CurveConfig {
    pub fn new(sizes: Vec<usize>) -> Self {
        CurveConfig {
            sizes,
            runs: 10,
            test_size: 1000,
            seed: 0,
            fresh_test_sets: false,
            smoothing: Smoothing::Mle,
            sigma: SigmaConvention::MaximumLikelihood,
            kernel_width: KernelWidth::Scaled,
        }
    }

    fn train_config(&self, choice: EstimatorChoice) -> TrainConfig {
        TrainConfig::new(choice)
            .with_smoothing(self.smoothing)
            .with_sigma(self.sigma)
            .with_kernel_width(self.kernel_width)
    }
}

/// Independent generator for one unit of work. Streams are disjoint for
/// distinct ids under the same seed.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const TEST_STREAM_BASE: u64 = 1 << 62;

fn run_stream(size_index: usize, run: usize) -> u64 {
    ((size_index as u64) << 32) | run as u64
}

/// Accuracy as a function of training-set size on a synthetic domain.
///
/// For a fixed seed every method sees the same training and test samples,
/// so curves for different estimators are paired.
pub fn learning_curve<T: Scalar>(
    spec: &SyntheticSpec<T>,
    choice: EstimatorChoice,
    config: &CurveConfig,
) -> Result<LearningCurve> {
    if config.sizes.is_empty() {
        return Err(Error::InvalidArgument("no training sizes given".into()));
    }
    if config.sizes[0] == 0 || config.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "training sizes must be positive and strictly increasing".into(),
        ));
    }
    if config.runs == 0 || config.test_size == 0 {
        return Err(Error::InvalidArgument("runs and test size must be positive".into()));
    }

    let shared_test = spec.sample_with(config.test_size, &mut substream(config.seed, TEST_STREAM_BASE));
    let mut points = Vec::with_capacity(config.sizes.len());
    for (si, &size) in config.sizes.iter().enumerate() {
        let fresh;
        let test = if config.fresh_test_sets {
            fresh = spec.sample_with(
                config.test_size,
                &mut substream(config.seed, TEST_STREAM_BASE + 1 + si as u64),
            );
            &fresh
        } else {
            &shared_test
        };
        let accs = (0..config.runs)
            .map(|run| {
                let train = spec.sample_with(size, &mut substream(config.seed, run_stream(si, run)));
                let model =
                    ClassifierModel::train(train.shared_schema(), train.instances(), config.train_config(choice))?;
                accuracy(&model, test)
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean_accuracy, std_accuracy) = mean_std(&accs);
        points.push(CurvePoint {
            train_size: size,
            mean_accuracy,
            std_accuracy,
            runs: config.runs,
        });
    }
    Ok(LearningCurve { choice, points })
}

/// Fraction of labeled instances in `test` predicted correctly.
pub fn accuracy<T: Scalar>(model: &ClassifierModel<T>, test: &Dataset<T>) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut correct = 0;
    for (i, inst) in test.instances().iter().enumerate() {
        let truth = label_index_of(model.schema(), i, inst)?;
        correct += usize::from(model.predict(inst)? == truth);
    }
    Ok(correct as f64 / test.len() as f64)
}

/// Accuracy over an arbitrary slice of instances.
pub fn accuracy_on<T: Scalar>(model: &ClassifierModel<T>, instances: &[Instance<T>]) -> Result<f64> {
    accuracy(model, &Dataset::new(model.shared_schema(), instances.to_vec()))
}
