//! Per-attribute class-conditional estimators.
//!
//! Continuous attributes use either a single normal density
//! ([`GaussianModel`]) or an equal-weight mixture of normal kernels centred
//! on every training value ([`KernelModel`]). Nominal attributes use sample
//! frequencies ([`NominalModel`]).
//!
//! Continuous densities and nominal probabilities are multiplied together by
//! the classifier without an interval-width factor; the factor is common to
//! every class and cancels when the posterior is normalized.

use num_rational::Ratio;

use crate::data::Cell;
use crate::error::{Error, Result};
use crate::scalar::{ln_sqrt_2pi, Scalar};

/// Normal density `g(x; mean, sigma)`.
#[inline]
pub fn normal_density<T: Scalar>(x: T, mean: T, sigma: T) -> T {
    normal_log_density(x, mean, sigma).exp()
}

#[inline]
pub fn normal_log_density<T: Scalar>(x: T, mean: T, sigma: T) -> T {
    let z = (x - mean) / sigma;
    -T::lit(0.5) * z * z - sigma.ln() - ln_sqrt_2pi()
}

/// Divisor used for the sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaConvention {
    /// Divide by `n` (maximum likelihood).
    #[default]
    MaximumLikelihood,
    /// Divide by `n - 1`. Falls back to `n` for a single observation.
    Unbiased,
}

impl SigmaConvention {
    pub fn name(self) -> &'static str {
        match self {
            SigmaConvention::MaximumLikelihood => "ml",
            SigmaConvention::Unbiased => "unbiased",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "ml" => Some(SigmaConvention::MaximumLikelihood),
            "unbiased" => Some(SigmaConvention::Unbiased),
            _ => None,
        }
    }
}

/// Lower bound applied to fitted standard deviations: `max(1e-9, 1e-6 * |mean|)`.
pub fn sigma_floor<T: Scalar>(mean: T) -> T {
    T::lit(1e-9).max(T::lit(1e-6) * mean.abs())
}

/// Mean and standard deviation of `values`, without flooring.
pub(crate) fn mean_and_std<T: Scalar>(values: &[T], convention: SigmaConvention) -> (T, T) {
    let n = T::from_usize(values.len()).unwrap();
    let mean = values.iter().copied().sum::<T>() / n;
    let ss: T = values.iter().map(|&x| (x - mean) * (x - mean)).sum();
    let dof = match convention {
        SigmaConvention::Unbiased if values.len() > 1 => n - T::one(),
        _ => n,
    };
    (mean, (ss / dof).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel<T> {
    mean: T,
    sigma: T,
    n: usize,
}

impl<T: Scalar> GaussianModel<T> {
    /// Fits the sample mean and maximum-likelihood standard deviation.
    pub fn fit(values: &[T]) -> Result<Self> {
        Self::fit_with(values, SigmaConvention::MaximumLikelihood)
    }

    pub fn fit_with(values: &[T], convention: SigmaConvention) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::no_observations());
        }
        let (mean, sigma) = mean_and_std(values, convention);
        Ok(GaussianModel {
            mean,
            sigma: sigma.max(sigma_floor(mean)),
            n: values.len(),
        })
    }

    /// Builds a model from stored parameters, re-applying the sigma floor.
    pub fn from_parts(mean: T, sigma: T, n: usize) -> Result<Self> {
        if !mean.is_finite() || !sigma.is_finite() || sigma <= T::zero() {
            return Err(Error::InvalidArgument(format!(
                "gaussian parameters must be finite with sigma > 0 (mean {mean}, sigma {sigma})"
            )));
        }
        Ok(GaussianModel {
            mean,
            sigma: sigma.max(sigma_floor(mean)),
            n,
        })
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Number of observations the model was fitted on.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn density(&self, x: T) -> T {
        normal_density(x, self.mean, self.sigma)
    }

    pub fn log_density(&self, x: T) -> T {
        normal_log_density(x, self.mean, self.sigma)
    }
}

/// Gaussian kernel density estimate: the average of one normal kernel per
/// stored training value, all sharing the same width.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelModel<T> {
    centers: Vec<T>,
    width: T,
}

impl<T: Scalar> KernelModel<T> {
    /// Stores `values` as kernel centres with width `1 / sqrt(n)`.
    pub fn fit(values: &[T]) -> Result<Self> {
        Self::fit_scaled(values, T::one())
    }

    /// Width `scale / sqrt(n)`. With `scale` set to the attribute's spread,
    /// this is the unit rule applied to the standardized attribute.
    pub fn fit_scaled(values: &[T], scale: T) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::no_observations());
        }
        let n = T::from_usize(values.len()).unwrap();
        Self::with_width(values.to_vec(), scale / n.sqrt())
    }

    pub fn with_width(centers: Vec<T>, width: T) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::no_observations());
        }
        if !(width > T::zero() && width.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kernel width must be positive, got {width}"
            )));
        }
        Ok(KernelModel { centers, width })
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn density(&self, x: T) -> T {
        let n = T::from_usize(self.centers.len()).unwrap();
        self.centers
            .iter()
            .map(|&c| normal_density(x, c, self.width))
            .sum::<T>()
            / n
    }

    /// Log-mean-exp over the per-kernel log densities.
    pub fn log_density(&self, x: T) -> T {
        let half = T::lit(0.5);
        let inv_w = self.width.recip();
        let mut min_z2 = T::infinity();
        for &c in &self.centers {
            let z = (x - c) * inv_w;
            min_z2 = min_z2.min(z * z);
        }
        let sum: T = self
            .centers
            .iter()
            .map(|&c| {
                let z = (x - c) * inv_w;
                (half * (min_z2 - z * z)).exp()
            })
            .sum();
        let n = T::from_usize(self.centers.len()).unwrap();
        -half * min_z2 + (sum / n).ln() - self.width.ln() - ln_sqrt_2pi()
    }
}

/// How nominal frequencies are turned into probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// Raw sample frequency `count / total`.
    #[default]
    Mle,
    /// Add-one estimate `(count + 1) / (total + |domain|)`.
    Laplace,
}

impl Smoothing {
    pub fn name(self) -> &'static str {
        match self {
            Smoothing::Mle => "mle",
            Smoothing::Laplace => "laplace",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "mle" => Some(Smoothing::Mle),
            "laplace" => Some(Smoothing::Laplace),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NominalModel {
    domain: Vec<String>,
    counts: Vec<u64>,
    total: u64,
}

impl NominalModel {
    pub fn fit<'a>(values: impl IntoIterator<Item = &'a str>, domain: &[String]) -> Result<Self> {
        let mut counts = vec![0u64; domain.len()];
        let mut total = 0;
        for v in values {
            let j = domain
                .iter()
                .position(|d| d == v)
                .ok_or_else(|| Error::SchemaMismatch {
                    attribute: String::new(),
                    value: v.to_string(),
                })?;
            counts[j] += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::no_observations());
        }
        Ok(NominalModel {
            domain: domain.to_vec(),
            counts,
            total,
        })
    }

    pub fn from_counts(domain: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        if domain.len() != counts.len() {
            return Err(Error::InvalidArgument(format!(
                "{} counts for a domain of {} values",
                counts.len(),
                domain.len()
            )));
        }
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::no_observations());
        }
        Ok(NominalModel { domain, counts, total })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, value: &str) -> Option<u64> {
        self.index_of(value).map(|j| self.counts[j])
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    fn index_of(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == value)
    }

    /// Exact sample frequency of `value`.
    pub fn frequency(&self, value: &str) -> Option<Ratio<u64>> {
        self.count(value).map(|c| Ratio::new(c, self.total))
    }

    pub fn probability<T: Scalar>(&self, value: &str, smoothing: Smoothing) -> Result<T> {
        let j = self.index_of(value).ok_or_else(|| Error::SchemaMismatch {
            attribute: String::new(),
            value: value.to_string(),
        })?;
        Ok(self.probability_at(j, smoothing))
    }

    pub(crate) fn probability_at<T: Scalar>(&self, j: usize, smoothing: Smoothing) -> T {
        let (num, den) = match smoothing {
            Smoothing::Mle => (self.counts[j], self.total),
            Smoothing::Laplace => (self.counts[j] + 1, self.total + self.domain.len() as u64),
        };
        T::from_u64(num).unwrap() / T::from_u64(den).unwrap()
    }

    /// Natural log of the probability; `-inf` for an unobserved value under MLE.
    pub fn log_probability<T: Scalar>(&self, value: &str, smoothing: Smoothing) -> Result<T> {
        Ok(self.probability::<T>(value, smoothing)?.ln())
    }
}

/// Any fitted per-(class, attribute) estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityModel<T> {
    Gaussian(GaussianModel<T>),
    Kernel(KernelModel<T>),
    Nominal(NominalModel),
}

impl<T: Scalar> DensityModel<T> {
    /// Natural log of the density (continuous) or probability (nominal) of
    /// `cell`. Missing cells contribute `0`. An unobserved nominal value
    /// under MLE yields `-inf`.
    pub fn log_density(&self, cell: &Cell<T>, smoothing: Smoothing) -> Result<T> {
        match (self, cell) {
            (_, Cell::Missing) => Ok(T::zero()),
            (DensityModel::Gaussian(m), Cell::Continuous(x)) => Ok(m.log_density(*x)),
            (DensityModel::Kernel(m), Cell::Continuous(x)) => Ok(m.log_density(*x)),
            (DensityModel::Nominal(m), Cell::Nominal(v)) => m.log_probability(v, smoothing),
            (_, cell) => Err(Error::InvalidArgument(format!(
                "cell {cell:?} does not match the estimator kind"
            ))),
        }
    }

    /// Density or probability of `cell` (not in log space).
    pub fn density(&self, cell: &Cell<T>, smoothing: Smoothing) -> Result<T> {
        match (self, cell) {
            (DensityModel::Gaussian(m), Cell::Continuous(x)) => Ok(m.density(*x)),
            (DensityModel::Kernel(m), Cell::Continuous(x)) => Ok(m.density(*x)),
            (DensityModel::Nominal(m), Cell::Nominal(v)) => m.probability(v, smoothing),
            _ => self.log_density(cell, smoothing).map(T::exp),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const TOY_X2_POS: [f64; 3] = [1.0, 1.2, 3.0];

    fn domain(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn gaussian_fit_on_positive_class_values() {
        let m = GaussianModel::fit(&TOY_X2_POS).unwrap();
        assert_abs_diff_eq!(m.mean(), 1.733_333_333_333_333, epsilon = 1e-12);
        assert_abs_diff_eq!(m.sigma(), 0.899_382_504_215_469_4, epsilon = 1e-12);
        assert_eq!(m.n(), 3);

        let unbiased = GaussianModel::fit_with(&TOY_X2_POS, SigmaConvention::Unbiased).unwrap();
        assert_abs_diff_eq!(unbiased.sigma(), 1.101_514_109_457_220_4, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_fit_floors_zero_spread() {
        let single = GaussianModel::fit(&[5.0]).unwrap();
        assert_eq!(single.mean(), 5.0);
        assert_abs_diff_eq!(single.sigma(), 5e-6, epsilon = 1e-20);

        let constant = GaussianModel::fit(&[0.0f64, 0.0, 0.0]).unwrap();
        assert_eq!(constant.sigma(), 1e-9);
        assert!(constant.density(0.0).is_finite());
        let c = GaussianModel::fit(&[-3.0f64; 4]).unwrap();
        assert_eq!((c.mean(), c.sigma()), (-3.0, 3e-6));
    }

    #[test]
    fn gaussian_fit_rejects_empty() {
        assert!(matches!(
            GaussianModel::<f64>::fit(&[]),
            Err(Error::NoObservations { .. })
        ));
        assert!(matches!(
            KernelModel::<f64>::fit(&[]),
            Err(Error::NoObservations { .. })
        ));
    }

    #[test]
    fn gaussian_density_values() {
        let std = GaussianModel::from_parts(0.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(std.density(0.0), 0.398_942_280_401_432_7, epsilon = 1e-15);
        assert_abs_diff_eq!(std.density(1.0), 0.241_970_724_519_143_35, epsilon = 1e-15);
        let wide = GaussianModel::from_parts(0.0, 2.0, 1).unwrap();
        assert_abs_diff_eq!(wide.density(0.0), 0.199_471_140_200_716_35, epsilon = 1e-15);
        assert_abs_diff_eq!(std.log_density(0.0), -0.918_938_533_204_672_7, epsilon = 1e-15);
    }

    #[test]
    fn kernel_fit_width_rule() {
        let m = KernelModel::fit(&TOY_X2_POS).unwrap();
        assert_eq!(m.centers(), &TOY_X2_POS);
        assert_abs_diff_eq!(m.width(), 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_eq!(KernelModel::fit(&[7.0]).unwrap().width(), 1.0);
        let hundred: Vec<f64> = (0..100).map(f64::from).collect();
        assert_abs_diff_eq!(KernelModel::fit(&hundred).unwrap().width(), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn kernel_density_values() {
        let m = KernelModel::fit(&[0.0, 2.0]).unwrap();
        assert_abs_diff_eq!(m.density(1.0), 0.207_553_748_710_297_35, epsilon = 1e-15);
        let one = KernelModel::fit(&[5.0]).unwrap();
        assert_abs_diff_eq!(one.density(5.0), 0.398_942_280_401_432_7, epsilon = 1e-15);
    }

    #[test]
    fn kernel_log_density_far_from_all_centres() {
        let m = KernelModel::with_width(vec![0.0f64, 1.0], 0.01).unwrap();
        // exp of the log density underflows, the log itself must not.
        let ld = m.log_density(50.0);
        assert!(ld.is_finite());
        let direct = normal_log_density(50.0, 1.0, 0.01) - 2f64.ln();
        assert_abs_diff_eq!(ld, direct, epsilon = 1e-6);
    }

    #[test]
    fn nominal_fit_and_probability() {
        let d = domain(&["a", "b"]);
        let m = NominalModel::fit(["a", "b", "a"], &d).unwrap();
        assert_eq!(m.counts(), &[2, 1]);
        assert_eq!(m.total(), 3);
        assert_eq!(m.frequency("a"), Some(Ratio::new(2, 3)));
        assert_abs_diff_eq!(m.probability::<f64>("a", Smoothing::Mle).unwrap(), 2.0 / 3.0);

        let b = NominalModel::fit(["b"], &d).unwrap();
        assert_eq!(b.counts(), &[0, 1]);
        assert_eq!(b.probability::<f64>("a", Smoothing::Mle).unwrap(), 0.0);
        assert_abs_diff_eq!(b.probability::<f64>("a", Smoothing::Laplace).unwrap(), 1.0 / 3.0);
        assert_eq!(
            b.log_probability::<f64>("a", Smoothing::Mle).unwrap(),
            f64::NEG_INFINITY
        );

        let all_a = NominalModel::fit(["a"; 4], &d).unwrap();
        assert_eq!(all_a.probability::<f64>("a", Smoothing::Mle).unwrap(), 1.0);
        assert_eq!(all_a.probability::<f64>("b", Smoothing::Mle).unwrap(), 0.0);
    }

    #[test]
    fn nominal_fit_errors() {
        let d = domain(&["a", "b"]);
        assert!(matches!(NominalModel::fit([], &d), Err(Error::NoObservations { .. })));
        assert!(matches!(
            NominalModel::fit(["a", "c"], &d),
            Err(Error::SchemaMismatch { .. })
        ));
    }

    #[test]
    fn log_density_dispatch() {
        let g = DensityModel::Gaussian(GaussianModel::from_parts(0.0, 1.0, 1).unwrap());
        assert_abs_diff_eq!(
            g.log_density(&Cell::Continuous(0.0), Smoothing::Mle).unwrap(),
            -0.918_938_533_204_672_7,
            epsilon = 1e-15
        );
        assert_eq!(g.log_density(&Cell::Missing, Smoothing::Mle).unwrap(), 0.0);
        assert!(g.log_density(&Cell::nominal("a"), Smoothing::Mle).is_err());
    }

    /// Composite trapezoid rule, kept local so the check does not reuse the
    /// crate's integrator.
    fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
        let h = (hi - lo) / steps as f64;
        let inner: f64 = (1..steps).map(|i| f(lo + h * i as f64)).sum();
        h * (0.5 * (f(lo) + f(hi)) + inner)
    }

    fn sample_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-50.0f64..50.0, 1..25)
    }

    proptest! {
        #[test]
        fn densities_integrate_to_one(values in sample_values()) {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

            let g = GaussianModel::fit(&values).unwrap();
            let s = g.sigma();
            prop_assume!(s > 1e-3);
            let steps = (((hi - lo) / s + 20.0) * 50.0) as usize;
            let total = trapezoid(|x| g.density(x), lo - 10.0 * s, hi + 10.0 * s, steps);
            prop_assert!((total - 1.0).abs() < 1e-3, "gaussian integral {total}");

            let k = KernelModel::fit(&values).unwrap();
            let w = k.width();
            let steps = (((hi - lo) / w + 20.0) * 50.0) as usize;
            let total = trapezoid(|x| k.density(x), lo - 10.0 * w, hi + 10.0 * w, steps);
            prop_assert!((total - 1.0).abs() < 1e-3, "kernel integral {total}");
        }

        #[test]
        fn densities_are_non_negative(values in sample_values(), x in -1e3f64..1e3) {
            prop_assert!(GaussianModel::fit(&values).unwrap().density(x) >= 0.0);
            prop_assert!(KernelModel::fit(&values).unwrap().density(x) >= 0.0);
        }

        #[test]
        fn kernel_density_ignores_centre_order(mut values in sample_values(), x in -60.0f64..60.0) {
            let a = KernelModel::fit(&values).unwrap();
            values.reverse();
            let b = KernelModel::fit(&values).unwrap();
            prop_assert!((a.density(x) - b.density(x)).abs() <= 1e-12 * a.density(x).max(1e-300));
            prop_assert!((a.log_density(x) - b.log_density(x)).abs() < 1e-10);
        }

        #[test]
        fn translation_equivariance(values in sample_values(), x in -60.0f64..60.0, shift in -100.0f64..100.0) {
            let moved: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let (g0, g1) = (GaussianModel::fit(&values).unwrap(), GaussianModel::fit(&moved).unwrap());
            prop_assume!(g0.sigma() > 1e-3);
            prop_assert!((g0.log_density(x) - g1.log_density(x + shift)).abs() < 1e-6);
            let (k0, k1) = (KernelModel::fit(&values).unwrap(), KernelModel::fit(&moved).unwrap());
            prop_assert!((k0.log_density(x) - k1.log_density(x + shift)).abs() < 1e-6);
        }

        #[test]
        fn kernel_density_is_average_of_kernels(values in sample_values(), x in -60.0f64..60.0) {
            let k = KernelModel::fit(&values).unwrap();
            let avg = values
                .iter()
                .map(|&c| GaussianModel::from_parts(c, k.width(), 1).unwrap().density(x))
                .sum::<f64>()
                / values.len() as f64;
            prop_assert!((k.density(x) - avg).abs() <= 1e-12);
        }

        #[test]
        fn log_density_round_trips(values in sample_values(), x in -60.0f64..60.0) {
            let g = GaussianModel::fit(&values).unwrap();
            let k = KernelModel::fit(&values).unwrap();
            for (d, ld) in [(g.density(x), g.log_density(x)), (k.density(x), k.log_density(x))] {
                if d > 1e-300 {
                    prop_assert!((ld.exp() - d).abs() <= 1e-9 * d);
                }
            }
        }

        #[test]
        fn nominal_probabilities_sum_to_one(counts in prop::collection::vec(0u64..20, 1..6)) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let domain: Vec<String> = (0..counts.len()).map(|i| format!("v{i}")).collect();
            let m = NominalModel::from_counts(domain.clone(), counts).unwrap();
            for smoothing in [Smoothing::Mle, Smoothing::Laplace] {
                let total: f64 = domain.iter().map(|v| m.probability::<f64>(v, smoothing).unwrap()).sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let m = KernelModel::<f32>::fit(&[0.0, 2.0]).unwrap();
        assert!((m.density(1.0) - 0.207_553_75).abs() < 1e-6);
        let g = GaussianModel::<f32>::fit(&[1.0, 1.2, 3.0]).unwrap();
        assert!((g.mean() - 1.733_333).abs() < 1e-5);
    }
}
