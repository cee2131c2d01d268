//! Artificial one-attribute domains with known class-conditional
//! distributions, and the Bayes-optimal error computed by quadrature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::classifier::argmax_first;
use crate::data::{Attribute, Cell, Dataset, Instance, Schema};
use crate::density::normal_density;
use crate::error::{Error, Result};
use crate::integrate::adaptive_simpson_panels;
use crate::scalar::Scalar;
use crate::special::normal_cdf;

/// Name of the single attribute in generated datasets.
pub const ATTRIBUTE_NAME: &str = "x";
/// Name of the class attribute in generated datasets.
pub const CLASS_NAME: &str = "class";

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component<T> {
    pub weight: T,
    pub mean: T,
    pub sigma: T,
}

/// Distribution of the attribute within one class.
#[derive(Debug, Clone, PartialEq)]
pub enum Conditional<T> {
    Gaussian { mean: T, sigma: T },
    Mixture(Vec<Component<T>>),
}

impl<T: Scalar> Conditional<T> {
    pub fn components(&self) -> Vec<Component<T>> {
        match self {
            Conditional::Gaussian { mean, sigma } => vec![Component {
                weight: T::one(),
                mean: *mean,
                sigma: *sigma,
            }],
            Conditional::Mixture(c) => c.clone(),
        }
    }

    pub fn density(&self, x: T) -> T {
        match self {
            Conditional::Gaussian { mean, sigma } => normal_density(x, *mean, *sigma),
            Conditional::Mixture(cs) => cs.iter().map(|c| c.weight * normal_density(x, c.mean, c.sigma)).sum(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components()
            .iter()
            .map(|c| c.weight.as_f64() * normal_cdf((x - c.mean.as_f64()) / c.sigma.as_f64()))
            .sum()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let (mean, sigma) = match self {
            Conditional::Gaussian { mean, sigma } => (*mean, *sigma),
            Conditional::Mixture(cs) => {
                let k = pick(cs.iter().map(|c| c.weight), rng);
                (cs[k].mean, cs[k].sigma)
            }
        };
        let z: f64 = rng.sample(StandardNormal);
        mean + sigma * T::lit(z)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let cs = self.components();
        if cs.is_empty() {
            return Err("mixture has no components".into());
        }
        for c in &cs {
            if !(c.sigma > T::zero() && c.sigma.is_finite()) {
                return Err(format!("component sigma must be positive, got {}", c.sigma));
            }
            if !c.mean.is_finite() {
                return Err(format!("component mean must be finite, got {}", c.mean));
            }
            if c.weight.is_nan() || c.weight < T::zero() {
                return Err(format!("component weight must be non-negative, got {}", c.weight));
            }
        }
        check_sums_to_one(cs.iter().map(|c| c.weight), "mixture weights")
    }
}

/// Inverse-CDF choice among non-negative weights summing to one.
fn pick<T: Scalar, R: Rng + ?Sized>(weights: impl Iterator<Item = T>, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        let w = w.as_f64();
        if w > 0.0 {
            last = i;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding left `u` above the cumulative total.
    last
}

fn check_sums_to_one<T: Scalar>(xs: impl Iterator<Item = T>, what: &str) -> std::result::Result<(), String> {
    let total: f64 = xs.map(Scalar::as_f64).sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(format!("{what} sum to {total}, expected 1"));
    }
    Ok(())
}

/// Generative description of a one-attribute classification domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec<T> {
    labels: Vec<String>,
    priors: Vec<T>,
    conditionals: Vec<Conditional<T>>,
}

impl<T: Scalar> SyntheticSpec<T> {
    pub fn new(labels: Vec<String>, priors: Vec<T>, conditionals: Vec<Conditional<T>>) -> Result<Self> {
        if priors.is_empty() {
            return Err(Error::InvalidSpec("at least one class is required".into()));
        }
        if labels.len() != priors.len() || conditionals.len() != priors.len() {
            return Err(Error::InvalidSpec(format!(
                "{} labels, {} priors and {} conditionals",
                labels.len(),
                priors.len(),
                conditionals.len()
            )));
        }
        if priors.iter().any(|p| p.is_nan() || *p < T::zero()) {
            return Err(Error::InvalidSpec("priors must be non-negative".into()));
        }
        check_sums_to_one(priors.iter().copied(), "priors").map_err(Error::InvalidSpec)?;
        for (label, cond) in labels.iter().zip(&conditionals) {
            cond.validate()
                .map_err(|e| Error::InvalidSpec(format!("class `{label}`: {e}")))?;
        }
        Ok(SyntheticSpec {
            labels,
            priors,
            conditionals,
        })
    }

    /// Labels default to `A`, `B`, `C`, ...
    pub fn with_default_labels(priors: Vec<T>, conditionals: Vec<Conditional<T>>) -> Result<Self> {
        let labels = (0..priors.len()).map(default_label).collect();
        Self::new(labels, priors, conditionals)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    pub fn conditionals(&self) -> &[Conditional<T>] {
        &self.conditionals
    }

    pub fn num_classes(&self) -> usize {
        self.priors.len()
    }

    /// Schema of generated datasets: one continuous attribute and the class.
    /// Single-class specs get a placeholder second label so the schema stays
    /// valid.
    pub fn schema(&self) -> Schema {
        let mut labels = self.labels.clone();
        if labels.len() < 2 {
            let mut i = labels.len();
            while labels.contains(&default_label(i)) {
                i += 1;
            }
            labels.push(default_label(i));
        }
        Schema::new(vec![Attribute::continuous(ATTRIBUTE_NAME)], CLASS_NAME, labels)
            .expect("synthetic schema is well formed")
    }

    /// Joint density `p(c) p(x | c)` for every class.
    pub fn joint_densities(&self, x: T) -> Vec<T> {
        self.priors
            .iter()
            .zip(&self.conditionals)
            .map(|(&p, c)| p * c.density(x))
            .collect()
    }

    /// `[lo, hi]` covering every component mean by ten of its sigmas.
    pub fn support(&self) -> (T, T) {
        let ten = T::lit(10.0);
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for c in self.conditionals.iter().flat_map(Conditional::components) {
            lo = lo.min(c.mean - ten * c.sigma);
            hi = hi.max(c.mean + ten * c.sigma);
        }
        (lo, hi)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Dataset<T> {
        let schema = self.schema();
        let instances = (0..n)
            .map(|_| {
                let c = pick(self.priors.iter().copied(), rng);
                let x = self.conditionals[c].sample(rng);
                Instance::labeled(vec![Cell::Continuous(x)], self.labels[c].clone())
            })
            .collect();
        Dataset::new(schema, instances)
    }
}

fn default_label(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("C{i}")
    }
}

/// Draws `n` labeled instances; identical output for identical `seed`.
pub fn sample<T: Scalar>(spec: &SyntheticSpec<T>, n: usize, seed: u64) -> Dataset<T> {
    spec.sample_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Equal priors; class A is N(0, 1) and class B is N(2, 1).
pub fn hypothesis1_spec<T: Scalar>() -> SyntheticSpec<T> {
    SyntheticSpec::with_default_labels(
        vec![T::lit(0.5), T::lit(0.5)],
        vec![
            Conditional::Gaussian {
                mean: T::zero(),
                sigma: T::one(),
            },
            Conditional::Gaussian {
                mean: T::lit(2.0),
                sigma: T::one(),
            },
        ],
    )
    .expect("builtin domain is valid")
}

/// Equal priors; class A is a two-mode mixture at -3 and 3, class B a
/// three-mode mixture at -6, 0 and 6, all components with sigma 0.7.
///
/// Both classes have mean 0 and variance 9.49, so a single normal fitted to
/// either class is the same curve and cannot separate them.
pub fn hypothesis2_spec<T: Scalar>() -> SyntheticSpec<T> {
    let c = |weight: f64, mean: f64| Component {
        weight: T::lit(weight),
        mean: T::lit(mean),
        sigma: T::lit(HYPOTHESIS2_SIGMA),
    };
    SyntheticSpec::with_default_labels(
        vec![T::lit(0.5), T::lit(0.5)],
        vec![
            Conditional::Mixture(vec![c(0.5, -3.0), c(0.5, 3.0)]),
            Conditional::Mixture(vec![c(0.125, -6.0), c(0.75, 0.0), c(0.125, 6.0)]),
        ],
    )
    .expect("builtin domain is valid")
}

const HYPOTHESIS2_SIGMA: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesErrorResult<T> {
    pub error: T,
    pub integration_tolerance: T,
    pub integrand_evaluations: usize,
}

/// Absolute tolerance used by [`bayes_error`].
pub const BAYES_ERROR_TOLERANCE: f64 = 1e-6;

/// Bayes-optimal error `integral of min_c p(c) p(x | c) dx` of a two-class domain.
pub fn bayes_error<T: Scalar>(spec: &SyntheticSpec<T>) -> Result<BayesErrorResult<T>> {
    bayes_error_with_tolerance(spec, T::lit(BAYES_ERROR_TOLERANCE))
}

pub fn bayes_error_with_tolerance<T: Scalar>(spec: &SyntheticSpec<T>, tol: T) -> Result<BayesErrorResult<T>> {
    if spec.num_classes() != 2 {
        return Err(Error::Unsupported(format!(
            "Bayes error needs exactly two classes, the domain has {}",
            spec.num_classes()
        )));
    }
    let (lo, hi) = spec.support();
    // Panels of at most half the narrowest sigma keep every mode visible to
    // the initial Simpson estimate.
    let min_sigma = spec
        .conditionals()
        .iter()
        .flat_map(Conditional::components)
        .map(|c| c.sigma)
        .fold(T::infinity(), T::min);
    let panels = (T::lit(2.0) * (hi - lo) / min_sigma)
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .clamp(1, 100_000);
    let step = (hi - lo) / T::from_usize(panels).unwrap();
    let mut breaks: Vec<T> = (0..panels).map(|i| lo + step * T::from_usize(i).unwrap()).collect();
    breaks.push(hi);

    let (a, b) = (&spec.conditionals()[0], &spec.conditionals()[1]);
    let (pa, pb) = (spec.priors()[0], spec.priors()[1]);
    let q = adaptive_simpson_panels(|x| (pa * a.density(x)).min(pb * b.density(x)), &breaks, tol);
    Ok(BayesErrorResult {
        error: q.value,
        integration_tolerance: tol,
        integrand_evaluations: q.evaluations,
    })
}

/// Class index maximizing `p(c) p(x | c)`; ties go to the first class.
pub fn optimal_classify<T: Scalar>(spec: &SyntheticSpec<T>, x: T) -> usize {
    argmax_first(&spec.joint_densities(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::class_counts;

    fn gaussian(mean: f64, sigma: f64) -> Conditional<f64> {
        Conditional::Gaussian { mean, sigma }
    }

    fn two(a: Conditional<f64>, b: Conditional<f64>) -> SyntheticSpec<f64> {
        SyntheticSpec::with_default_labels(vec![0.5, 0.5], vec![a, b]).unwrap()
    }

    #[test]
    fn sample_of_zero_has_schema() {
        let ds = sample(&hypothesis1_spec::<f64>(), 0, 3);
        assert!(ds.is_empty());
        assert_eq!(ds.schema().labels(), &["A", "B"]);
        assert_eq!(ds.schema().attribute(0).name, ATTRIBUTE_NAME);
    }

    #[test]
    fn zero_prior_class_is_never_drawn() {
        let spec =
            SyntheticSpec::with_default_labels(vec![1.0, 0.0], vec![gaussian(0.0, 1.0), gaussian(5.0, 1.0)]).unwrap();
        let ds = sample(&spec, 500, 11);
        assert_eq!(class_counts(&ds).unwrap().counts(), &[500, 0]);
    }

    #[test]
    fn sampling_is_seeded() {
        let spec = hypothesis2_spec::<f64>();
        assert_eq!(sample(&spec, 50, 9), sample(&spec, 50, 9));
        assert_ne!(sample(&spec, 50, 9), sample(&spec, 50, 10));
    }

    #[test]
    fn large_sample_moments() {
        let spec = SyntheticSpec::new(vec!["only".into()], vec![1.0], vec![gaussian(0.0, 1.0)]).unwrap();
        let ds = sample(&spec, 100_000, 5);
        let xs: Vec<f64> = ds
            .instances()
            .iter()
            .map(|i| match i.values[0] {
                Cell::Continuous(x) => x,
                _ => unreachable!(),
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((sd - 1.0).abs() < 0.02, "sd {sd}");
    }

    #[test]
    fn builtin_domains() {
        let h1 = hypothesis1_spec::<f64>();
        assert_eq!(h1.priors(), &[0.5, 0.5]);
        assert_eq!(h1, hypothesis1_spec());
        let h2 = hypothesis2_spec::<f64>();
        for c in h2.conditionals() {
            let w: f64 = c.components().iter().map(|c| c.weight).sum();
            assert_eq!(w, 1.0);
        }
        // Matching first and second moments across the two classes.
        let moments = |c: &Conditional<f64>| {
            let cs = c.components();
            let m: f64 = cs.iter().map(|c| c.weight * c.mean).sum();
            let v: f64 = cs
                .iter()
                .map(|c| c.weight * (c.sigma * c.sigma + c.mean * c.mean))
                .sum();
            (m, v - m * m)
        };
        let (a, b) = (moments(&h2.conditionals()[0]), moments(&h2.conditionals()[1]));
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        for x in [-3.0, 3.0] {
            let j = h2.joint_densities(x);
            assert!(j[1] < 1e-3 * j[0]);
            assert_eq!(optimal_classify(&h2, x), 0);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let g = || gaussian(0.0, 1.0);
        assert!(SyntheticSpec::with_default_labels(vec![0.5, 0.6], vec![g(), g()]).is_err());
        assert!(SyntheticSpec::with_default_labels(vec![0.5, 0.5], vec![g(), gaussian(0.0, 0.0)]).is_err());
        assert!(SyntheticSpec::with_default_labels(vec![1.0], vec![g(), g()]).is_err());
        let bad_mix = Conditional::Mixture(vec![Component {
            weight: 0.9,
            mean: 0.0,
            sigma: 1.0,
        }]);
        assert!(SyntheticSpec::with_default_labels(vec![0.5, 0.5], vec![g(), bad_mix]).is_err());
    }

    #[test]
    fn bayes_error_closed_forms() {
        let e = bayes_error(&hypothesis1_spec::<f64>()).unwrap();
        assert!((e.error - 0.158_655_253_931_457_05).abs() < 1e-6, "{e:?}");
        let same = bayes_error(&two(gaussian(1.0, 2.0), gaussian(1.0, 2.0))).unwrap();
        assert!((same.error - 0.5).abs() < 1e-9, "{same:?}");
        let apart = bayes_error(&two(gaussian(0.0, 1.0), gaussian(200.0, 1.0))).unwrap();
        assert!(apart.error.abs() < 1e-6);
        assert!(bayes_error(
            &SyntheticSpec::<f64>::new(vec!["a".into()], vec![1.0], vec![gaussian(0.0, 1.0)]).unwrap()
        )
        .is_err());
    }

    #[test]
    fn hypothesis2_bayes_error_regression() {
        // Frozen from a 30-digit quadrature split at the class-density crossings.
        let e = bayes_error(&hypothesis2_spec::<f64>()).unwrap();
        assert!((e.error - 0.027_320_820_568_079_5).abs() < 1e-9, "{e:?}");
        assert_eq!(e, bayes_error(&hypothesis2_spec::<f64>()).unwrap());
    }

    #[test]
    fn optimal_rule_on_hypothesis1() {
        let h1 = hypothesis1_spec::<f64>();
        assert_eq!(optimal_classify(&h1, 1.0), 0);
        assert_eq!(optimal_classify(&h1, -5.0), 0);
        assert_eq!(optimal_classify(&h1, 1.0 + 1e-9), 1);
    }
}
