//! Adaptive Simpson quadrature.

use crate::scalar::Scalar;

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    /// Number of integrand evaluations performed.
    pub evaluations: usize,
    /// False when some subinterval hit the depth limit before meeting its
    /// share of the tolerance.
    pub converged: bool,
}

const DEFAULT_MAX_DEPTH: u32 = 50;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` with adaptive
/// Simpson's rule and Richardson extrapolation.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T) -> Quadrature<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    adaptive_simpson_with_depth(f, a, b, tol, DEFAULT_MAX_DEPTH)
}

pub fn adaptive_simpson_with_depth<T, F>(f: F, a: T, b: T, tol: T, max_depth: u32) -> Quadrature<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mut state = State {
        f: &f,
        evaluations: 0,
        converged: true,
    };
    if a == b {
        return Quadrature {
            value: T::zero(),
            evaluations: 0,
            converged: true,
        };
    }
    let half = T::lit(0.5);
    let m = (a + b) * half;
    let fa = state.eval(a);
    let fm = state.eval(m);
    let fb = state.eval(b);
    let whole = simpson(a, b, fa, fm, fb);
    let value = state.recurse(a, b, fa, fm, fb, whole, tol, max_depth);
    Quadrature {
        value,
        evaluations: state.evaluations,
        converged: state.converged,
    }
}

/// Integrates over consecutive panels delimited by `breaks` (ascending),
/// splitting `tol` in proportion to panel width.
pub fn adaptive_simpson_panels<T, F>(f: F, breaks: &[T], tol: T) -> Quadrature<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mut total = Quadrature {
        value: T::zero(),
        evaluations: 0,
        converged: true,
    };
    if breaks.len() < 2 {
        return total;
    }
    let span = breaks[breaks.len() - 1] - breaks[0];
    for w in breaks.windows(2) {
        let share = if span > T::zero() {
            tol * (w[1] - w[0]) / span
        } else {
            tol
        };
        let q = adaptive_simpson(&f, w[0], w[1], share);
        total.value = total.value + q.value;
        total.evaluations += q.evaluations;
        total.converged &= q.converged;
    }
    total
}

fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

struct State<'a, F> {
    f: &'a F,
    evaluations: usize,
    converged: bool,
}

impl<F> State<'_, F> {
    fn eval<T: Scalar>(&mut self, x: T) -> T
    where
        F: Fn(T) -> T,
    {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<T: Scalar>(&mut self, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T
    where
        F: Fn(T) -> T,
    {
        let half = T::lit(0.5);
        let m = (a + b) * half;
        let lm = (a + m) * half;
        let rm = (m + b) * half;
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        let fifteen = T::lit(15.0);
        // `delta / 15` estimates the error of the unextrapolated sum; accepting
        // only when `delta` itself is within `tol` leaves the extrapolated
        // value well inside the tolerance.
        if delta.abs() <= tol {
            return left + right + delta / fifteen;
        }
        if depth == 0 || m <= a || m >= b {
            self.converged = false;
            return left + right + delta / fifteen;
        }
        self.recurse(a, m, fa, flm, fm, left, tol * half, depth - 1)
            + self.recurse(m, b, fm, frm, fb, right, tol * half, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let q = adaptive_simpson(|x: f64| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-12);
        assert!((q.value - 3.75).abs() < 1e-12);
        assert!(q.converged);
        assert_eq!(q.evaluations, 5);
    }

    #[test]
    fn smooth_integrands() {
        let q = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-10);
        assert!((q.value - 2.0).abs() < 1e-9);
        let q = adaptive_simpson(|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-10);
        assert!((q.value - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn kinked_integrand() {
        let q = adaptive_simpson(|x: f64| x.abs(), -1.0, 3.0, 1e-9);
        assert!((q.value - 5.0).abs() < 1e-8);
    }

    #[test]
    fn panels_add_up() {
        let breaks: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let q = adaptive_simpson_panels(|x: f64| x.exp(), &breaks, 1e-10);
        assert!((q.value - (1f64.exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn depth_limit_is_reported() {
        let q = adaptive_simpson_with_depth(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, 1e-14, 3);
        assert!(!q.converged);
    }

    #[test]
    fn empty_interval() {
        let q = adaptive_simpson(|x: f64| x, 2.0, 2.0, 1e-6);
        assert_eq!(q.value, 0.0);
    }
}
