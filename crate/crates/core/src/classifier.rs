//! Naive Bayesian classifier over mixed nominal and continuous attributes.
//!
//! Training is a single pass that estimates class priors from class
//! frequencies and fits one estimator per (class, attribute) pair on the
//! non-missing values of that attribute within that class. The continuous
//! estimator is chosen once per model ([`EstimatorChoice`]); nominal
//! attributes always use frequency tables.
//!
//! Prediction accumulates `ln prior + sum ln p(x_i | c)` per class and
//! normalizes with log-sum-exp.

use std::sync::Arc;

use num_rational::Ratio;

use crate::data::{label_index_of, AttributeKind, Cell, Dataset, Instance, Schema};
use crate::density::{
    mean_and_std, sigma_floor, DensityModel, GaussianModel, KernelModel, NominalModel, SigmaConvention, Smoothing,
};
use crate::error::{Error, Result};
use crate::scalar::{log_sum_exp, Scalar};

/// Estimator used for every continuous attribute of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorChoice {
    /// One normal density per (class, attribute).
    SingleGaussian,
    /// Gaussian kernel density estimate per (class, attribute).
    KernelDensity,
}

impl EstimatorChoice {
    pub const BOTH: [EstimatorChoice; 2] = [EstimatorChoice::SingleGaussian, EstimatorChoice::KernelDensity];

    /// Short name used in file formats and command-line flags.
    pub fn name(self) -> &'static str {
        match self {
            EstimatorChoice::SingleGaussian => "gaussian",
            EstimatorChoice::KernelDensity => "kernel",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "gaussian" => Some(EstimatorChoice::SingleGaussian),
            "kernel" => Some(EstimatorChoice::KernelDensity),
            _ => None,
        }
    }
}

/// Kernel width rule for [`EstimatorChoice::KernelDensity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelWidth {
    /// `1 / sqrt(n_c)` in attribute units.
    Unit,
    /// `s / sqrt(n_c)`, where `s` is the attribute's standard deviation over
    /// the whole training set. Equivalent to the unit rule on standardized
    /// attributes.
    #[default]
    Scaled,
}

impl KernelWidth {
    pub fn name(self) -> &'static str {
        match self {
            KernelWidth::Unit => "unit",
            KernelWidth::Scaled => "scaled",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "unit" => Some(KernelWidth::Unit),
            "scaled" => Some(KernelWidth::Scaled),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainConfig {
    pub choice: EstimatorChoice,
    pub smoothing: Smoothing,
    pub sigma: SigmaConvention,
    pub kernel_width: KernelWidth,
}

impl TrainConfig {
    pub fn new(choice: EstimatorChoice) -> Self {
        TrainConfig {
            choice,
            smoothing: Smoothing::Mle,
            sigma: SigmaConvention::MaximumLikelihood,
            kernel_width: KernelWidth::Scaled,
        }
    }

    pub fn with_smoothing(mut self, smoothing: Smoothing) -> Self {
        self.smoothing = smoothing;
        self
    }

    pub fn with_sigma(mut self, sigma: SigmaConvention) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_kernel_width(mut self, kernel_width: KernelWidth) -> Self {
        self.kernel_width = kernel_width;
        self
    }
}

impl From<EstimatorChoice> for TrainConfig {
    fn from(choice: EstimatorChoice) -> Self {
        TrainConfig::new(choice)
    }
}

/// A trained naive Bayesian classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel<T> {
    schema: Arc<Schema>,
    config: TrainConfig,
    class_counts: Vec<u64>,
    priors: Vec<T>,
    /// Indexed `[class][attribute]`; `None` when the class has no
    /// non-missing value for that attribute.
    conditionals: Vec<Vec<Option<DensityModel<T>>>>,
}

/// Posterior class distribution for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior<T> {
    /// Probabilities in schema label order.
    pub probabilities: Vec<T>,
    /// Unnormalized log scores in schema label order; `-inf` for classes
    /// ruled out by a zero prior or a zero-probability factor.
    pub log_scores: Vec<T>,
    /// Index of the predicted label.
    pub predicted: usize,
    /// Set when every class scored `-inf` and the priors were used instead.
    pub degenerate: bool,
}

impl<T: Scalar> Posterior<T> {
    pub fn predicted_label<'a>(&self, schema: &'a Schema) -> &'a str {
        &schema.labels()[self.predicted]
    }
}

/// Trains on every instance of `dataset`.
pub fn train<T: Scalar>(dataset: &Dataset<T>, config: impl Into<TrainConfig>) -> Result<ClassifierModel<T>> {
    ClassifierModel::train(dataset.shared_schema(), dataset.instances().iter(), config.into())
}

impl<T: Scalar> ClassifierModel<T> {
    pub fn train<'a, I>(schema: Arc<Schema>, instances: I, config: TrainConfig) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Instance<T>>,
    {
        let k = schema.len();
        let num_classes = schema.num_classes();
        let mut class_counts = vec![0u64; num_classes];
        // Non-missing continuous values and nominal symbols, per [class][attribute].
        let mut continuous: Vec<Vec<Vec<T>>> = vec![vec![Vec::new(); k]; num_classes];
        let mut symbols: Vec<Vec<Vec<&'a str>>> = vec![vec![Vec::new(); k]; num_classes];

        for (i, inst) in instances.into_iter().enumerate() {
            inst.conformance(&schema)
                .map_err(|(_, reason)| Error::NonConforming { index: i, reason })?;
            let c = label_index_of(&schema, i, inst)?;
            class_counts[c] += 1;
            for (j, cell) in inst.values.iter().enumerate() {
                match cell {
                    Cell::Continuous(x) => continuous[c][j].push(*x),
                    Cell::Nominal(v) => symbols[c][j].push(v.as_str()),
                    Cell::Missing => {}
                }
            }
        }

        let total: u64 = class_counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyDataset);
        }

        let scales = match (config.choice, config.kernel_width) {
            (EstimatorChoice::KernelDensity, KernelWidth::Scaled) => Some(pooled_scales(&schema, &continuous)),
            _ => None,
        };

        let mut conditionals = Vec::with_capacity(num_classes);
        for c in 0..num_classes {
            let mut row = Vec::with_capacity(k);
            for (j, attr) in schema.attributes().iter().enumerate() {
                let model = match &attr.kind {
                    AttributeKind::Nominal(domain) if !symbols[c][j].is_empty() => Some(DensityModel::Nominal(
                        NominalModel::fit(symbols[c][j].iter().copied(), domain)?,
                    )),
                    AttributeKind::Continuous if !continuous[c][j].is_empty() => {
                        let values = &continuous[c][j];
                        Some(match config.choice {
                            EstimatorChoice::SingleGaussian => {
                                DensityModel::Gaussian(GaussianModel::fit_with(values, config.sigma)?)
                            }
                            EstimatorChoice::KernelDensity => {
                                let scale = scales.as_ref().map_or(T::one(), |s| s[j]);
                                DensityModel::Kernel(KernelModel::fit_scaled(values, scale)?)
                            }
                        })
                    }
                    _ => None,
                };
                row.push(model);
            }
            conditionals.push(row);
        }

        let n = T::from_u64(total).unwrap();
        let priors = class_counts.iter().map(|&c| T::from_u64(c).unwrap() / n).collect();

        Ok(ClassifierModel {
            schema,
            config,
            class_counts,
            priors,
            conditionals,
        })
    }

    /// Reassembles a model from stored parts, checking that every
    /// conditional matches its attribute kind.
    pub fn from_parts(
        schema: Arc<Schema>,
        config: TrainConfig,
        class_counts: Vec<u64>,
        conditionals: Vec<Vec<Option<DensityModel<T>>>>,
    ) -> Result<Self> {
        let bad = |msg: String| Error::Format {
            what: "model",
            message: msg,
        };
        if class_counts.len() != schema.num_classes() || conditionals.len() != schema.num_classes() {
            return Err(bad("class count does not match the schema".into()));
        }
        let total: u64 = class_counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyDataset);
        }
        for row in &conditionals {
            if row.len() != schema.len() {
                return Err(bad("attribute count does not match the schema".into()));
            }
            for (model, attr) in row.iter().zip(schema.attributes()) {
                let ok = match (model, &attr.kind) {
                    (None, _) => true,
                    (Some(DensityModel::Nominal(m)), AttributeKind::Nominal(d)) => m.domain() == d.as_slice(),
                    (Some(DensityModel::Gaussian(_)), AttributeKind::Continuous) => {
                        config.choice == EstimatorChoice::SingleGaussian
                    }
                    (Some(DensityModel::Kernel(_)), AttributeKind::Continuous) => {
                        config.choice == EstimatorChoice::KernelDensity
                    }
                    _ => false,
                };
                if !ok {
                    return Err(bad(format!("estimator for `{}` does not fit its attribute", attr.name)));
                }
            }
        }
        let n = T::from_u64(total).unwrap();
        let priors = class_counts.iter().map(|&c| T::from_u64(c).unwrap() / n).collect();
        Ok(ClassifierModel {
            schema,
            config,
            class_counts,
            priors,
            conditionals,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn shared_schema(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn config(&self) -> TrainConfig {
        self.config
    }

    pub fn choice(&self) -> EstimatorChoice {
        self.config.choice
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    /// Exact class frequency.
    pub fn prior_ratio(&self, class: usize) -> Ratio<u64> {
        Ratio::new(self.class_counts[class], self.class_counts.iter().sum())
    }

    pub fn training_counts(&self) -> &[u64] {
        &self.class_counts
    }

    /// Labels declared in the schema but absent from the training data.
    pub fn absent_classes(&self) -> Vec<usize> {
        (0..self.class_counts.len())
            .filter(|&c| self.class_counts[c] == 0)
            .collect()
    }

    pub fn conditional(&self, class: usize, attribute: usize) -> Option<&DensityModel<T>> {
        self.conditionals[class][attribute].as_ref()
    }

    pub fn conditionals(&self) -> &[Vec<Option<DensityModel<T>>>] {
        &self.conditionals
    }

    pub fn posterior(&self, instance: &Instance<T>) -> Result<Posterior<T>> {
        instance
            .conformance(&self.schema)
            .map_err(|(_, reason)| Error::NonConforming { index: 0, reason })?;

        let num_classes = self.schema.num_classes();
        let mut log_scores = Vec::with_capacity(num_classes);
        for c in 0..num_classes {
            let prior = self.priors[c];
            if prior <= T::zero() {
                log_scores.push(T::neg_infinity());
                continue;
            }
            let mut score = prior.ln();
            for (cell, model) in instance.values.iter().zip(&self.conditionals[c]) {
                if let Some(model) = model {
                    score = score + model.log_density(cell, self.config.smoothing)?;
                }
            }
            log_scores.push(score);
        }

        let norm = log_sum_exp(&log_scores);
        let (probabilities, degenerate) = if norm == T::neg_infinity() || norm.is_nan() {
            (self.priors.clone(), true)
        } else {
            (log_scores.iter().map(|&s| (s - norm).exp()).collect(), false)
        };
        let predicted = argmax_first(&probabilities);
        Ok(Posterior {
            probabilities,
            log_scores,
            predicted,
            degenerate,
        })
    }

    pub fn predict(&self, instance: &Instance<T>) -> Result<usize> {
        self.posterior(instance).map(|p| p.predicted)
    }

    pub fn predict_label(&self, instance: &Instance<T>) -> Result<&str> {
        self.predict(instance).map(|c| self.schema.labels()[c].as_str())
    }

    /// Posterior for each instance, in input order. A failing instance
    /// yields an error in its slot without affecting the others.
    pub fn predict_batch<'a, I>(&self, instances: I) -> Vec<Result<Posterior<T>>>
    where
        I: IntoIterator<Item = &'a Instance<T>>,
    {
        instances
            .into_iter()
            .enumerate()
            .map(|(i, inst)| {
                self.posterior(inst).map_err(|e| match e {
                    Error::NonConforming { reason, .. } => Error::NonConforming { index: i, reason },
                    other => other,
                })
            })
            .collect()
    }
}

/// Pooled standard deviation of each continuous attribute across all
/// classes, floored like a fitted sigma. Attributes without observations
/// get scale 1.
fn pooled_scales<T: Scalar>(schema: &Schema, continuous: &[Vec<Vec<T>>]) -> Vec<T> {
    (0..schema.len())
        .map(|j| {
            let values: Vec<T> = continuous
                .iter()
                .flat_map(|per_class| per_class[j].iter().copied())
                .collect();
            if values.is_empty() {
                return T::one();
            }
            let (mean, std) = mean_and_std(&values, SigmaConvention::MaximumLikelihood);
            std.max(sigma_floor(mean))
        })
        .collect()
}

/// Index of the largest value; the earliest index wins ties.
pub(crate) fn argmax_first<T: Scalar>(xs: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}
