//! Naive Bayesian classification with two estimators for continuous
//! attributes: a single normal density per class, or a Gaussian kernel
//! density estimate whose width shrinks as `1 / sqrt(n_c)`.
//!
//! The crate also carries the experiment machinery used to compare the two:
//! k-fold cross-validation with paired t-tests, synthetic domains with a
//! quadrature-based Bayes-error oracle, learning curves, and text formats
//! for datasets, models and reports.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below name the common double-precision instantiations.

pub mod classifier;
pub mod data;
pub mod density;
pub mod error;
pub mod evaluation;
pub mod integrate;
pub mod io;
pub mod scalar;
pub mod special;
pub mod synthetic;

pub use classifier::{train, ClassifierModel, EstimatorChoice, KernelWidth, Posterior, TrainConfig};
pub use data::{
    class_counts, validate, Attribute, AttributeKind, Cell, ClassCounts, Dataset, Instance, Schema, Violation,
};
pub use density::{DensityModel, GaussianModel, KernelModel, NominalModel, SigmaConvention, Smoothing};
pub use error::{Error, Result};
pub use evaluation::{
    cross_validate, learning_curve, make_folds, paired_t, CurveConfig, CvConfig, EvalReport, FoldPlan, LearningCurve,
    PairedT,
};
pub use scalar::Scalar;
pub use synthetic::{
    bayes_error, hypothesis1_spec, hypothesis2_spec, optimal_classify, sample, BayesErrorResult, Conditional,
    SyntheticSpec,
};

pub type DatasetF64 = Dataset<f64>;
pub type DatasetF32 = Dataset<f32>;
pub type InstanceF64 = Instance<f64>;
pub type CellF64 = Cell<f64>;
pub type ClassifierModelF64 = ClassifierModel<f64>;
pub type ClassifierModelF32 = ClassifierModel<f32>;
pub type PosteriorF64 = Posterior<f64>;
pub type GaussianModelF64 = GaussianModel<f64>;
pub type KernelModelF64 = KernelModel<f64>;
pub type DensityModelF64 = DensityModel<f64>;
pub type SyntheticSpecF64 = SyntheticSpec<f64>;
