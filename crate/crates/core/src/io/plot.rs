//! Density curves evaluated on a regular grid, for plotting one attribute's
//! fitted estimators against a histogram of its values.

use crate::density::{GaussianModel, KernelModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `steps` equally spaced points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    lo: T,
    hi: T,
    steps: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(lo: T, hi: T, steps: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("grid needs lo < hi, got [{lo}, {hi}]")));
        }
        if steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points, got {steps}"
            )));
        }
        Ok(Grid { lo, hi, steps })
    }

    /// A grid spanning the values plus `pad` standard deviations either side.
    pub fn covering(values: &[T], pad: T, steps: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::no_observations());
        }
        let g = GaussianModel::fit(values)?;
        let lo = values.iter().copied().fold(T::infinity(), T::min) - pad * g.sigma();
        let hi = values.iter().copied().fold(T::neg_infinity(), T::max) + pad * g.sigma();
        if lo < hi {
            Grid::new(lo, hi, steps)
        } else {
            Grid::new(lo - T::one(), hi + T::one(), steps)
        }
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        let step = (self.hi - self.lo) / T::from_usize(self.steps - 1).unwrap();
        (0..self.steps).map(move |i| {
            if i + 1 == self.steps {
                self.hi
            } else {
                self.lo + step * T::from_usize(i).unwrap()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries<T> {
    pub name: String,
    pub points: Vec<(T, T)>,
}

/// Gaussian, kernel (width `1 / sqrt(n)`) and histogram series for `values`.
pub fn density_plot<T: Scalar>(values: &[T], grid: &Grid<T>) -> Result<Vec<PlotSeries<T>>> {
    if values.is_empty() {
        return Err(Error::no_observations());
    }
    density_plot_fitted(&GaussianModel::fit(values)?, &KernelModel::fit(values)?, values, grid)
}

/// Series for already fitted estimators, plus a histogram of `values` with
/// `ceil(sqrt(n))` equal-width bins normalized to unit area.
pub fn density_plot_fitted<T: Scalar>(
    gaussian: &GaussianModel<T>,
    kernel: &KernelModel<T>,
    values: &[T],
    grid: &Grid<T>,
) -> Result<Vec<PlotSeries<T>>> {
    if values.is_empty() {
        return Err(Error::no_observations());
    }
    let histogram = Histogram::new(values);
    let series = |name: &str, f: &dyn Fn(T) -> T| PlotSeries {
        name: name.to_string(),
        points: grid.points().map(|x| (x, f(x))).collect(),
    };
    Ok(vec![
        series("gaussian", &|x| gaussian.density(x)),
        series("kernel", &|x| kernel.density(x)),
        series("histogram", &|x| histogram.density(x)),
    ])
}

struct Histogram<T> {
    lo: T,
    width: T,
    heights: Vec<T>,
}

impl<T: Scalar> Histogram<T> {
    fn new(values: &[T]) -> Self {
        let n = values.len();
        let bins = (n as f64).sqrt().ceil() as usize;
        let mut lo = values.iter().copied().fold(T::infinity(), T::min);
        let mut hi = values.iter().copied().fold(T::neg_infinity(), T::max);
        if lo == hi {
            lo = lo - T::lit(0.5);
            hi = hi + T::lit(0.5);
        }
        let width = (hi - lo) / T::from_usize(bins).unwrap();
        let mut counts = vec![0usize; bins];
        for &v in values {
            counts[Self::bin(lo, width, bins, v)] += 1;
        }
        let scale = T::one() / (T::from_usize(n).unwrap() * width);
        let heights = counts.iter().map(|&c| T::from_usize(c).unwrap() * scale).collect();
        Histogram { lo, width, heights }
    }

    fn bin(lo: T, width: T, bins: usize, x: T) -> usize {
        ((x - lo) / width).floor().to_usize().unwrap_or(0).min(bins - 1)
    }

    fn density(&self, x: T) -> T {
        let hi = self.lo + self.width * T::from_usize(self.heights.len()).unwrap();
        if x < self.lo || x > hi {
            return T::zero();
        }
        self.heights[Self::bin(self.lo, self.width, self.heights.len(), x)]
    }
}
