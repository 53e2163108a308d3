//! Monotone cubic (Fritsch-Carlson) interpolation and a small adaptive
//! Simpson quadrature. Shared by the profile reconstruction and the
//! trajectory diagnostics.

use crate::real::{lit, Real};

/// Piecewise-cubic Hermite interpolant with monotonicity-preserving slopes.
#[derive(Debug, Clone)]
pub struct Pchip<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> Pchip<T> {
    /// Build from nodes with strictly increasing `x`. Panics on fewer than
    /// two nodes or non-increasing abscissae.
    pub fn new(x: Vec<T>, y: Vec<T>) -> Self {
        assert!(x.len() == y.len() && x.len() >= 2, "need >= 2 nodes");
        for w in x.windows(2) {
            assert!(w[1] > w[0], "abscissae must be strictly increasing");
        }
        let n = x.len();
        let mut h = Vec::with_capacity(n - 1);
        let mut delta = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let hi = x[i + 1] - x[i];
            h.push(hi);
            delta.push((y[i + 1] - y[i]) / hi);
        }
        let mut d = vec![T::zero(); n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] <= T::zero() {
                    d[i] = T::zero();
                } else {
                    let w1 = lit::<T>(2.0) * h[i] + h[i - 1];
                    let w2 = h[i] + lit::<T>(2.0) * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = Self::endpoint_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = Self::endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Pchip { x, y, d }
    }

    /// Cubic Hermite through the nodes with caller-supplied exact slopes
    /// (used where the derivative is known analytically; plain Fritsch-
    /// Carlson slope estimation is only first-order on strongly nonuniform
    /// grids).
    pub fn with_slopes(x: Vec<T>, y: Vec<T>, d: Vec<T>) -> Self {
        assert!(x.len() == y.len() && x.len() == d.len() && x.len() >= 2);
        for w in x.windows(2) {
            assert!(w[1] > w[0], "abscissae must be strictly increasing");
        }
        Pchip { x, y, d }
    }

    /// Shape-preserving three-point endpoint rule.
    fn endpoint_slope(h0: T, h1: T, d0: T, d1: T) -> T {
        let three = lit::<T>(3.0);
        let mut d = ((lit::<T>(2.0) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d * d0 <= T::zero() {
            d = T::zero();
        } else if d0 * d1 <= T::zero() && d.abs() > three * d0.abs() {
            d = three * d0;
        }
        d
    }

    pub fn x_min(&self) -> T {
        self.x[0]
    }

    pub fn x_max(&self) -> T {
        *self.x.last().unwrap()
    }

    /// Exact integral of the interpolant over `[a, b]` (clamped to the node
    /// range), `a <= b`.
    pub fn integral(&self, a: T, b: T) -> T {
        let a = a.max(self.x[0]);
        let b = b.min(*self.x.last().unwrap());
        if b <= a {
            return T::zero();
        }
        let half = lit::<T>(0.5);
        let twelfth = lit::<T>(1.0 / 12.0);
        let mut total = T::zero();
        for i in 0..self.x.len() - 1 {
            let (x0, x1) = (self.x[i], self.x[i + 1]);
            if x1 <= a || x0 >= b {
                continue;
            }
            if x0 >= a && x1 <= b {
                // full panel: exact cubic Hermite integral
                let h = x1 - x0;
                total = total
                    + half * h * (self.y[i] + self.y[i + 1])
                    + twelfth * h * h * (self.d[i] - self.d[i + 1]);
            } else {
                // partial panel: Simpson on the cubic is exact only for
                // quadratics, so use two-panel Simpson (exact for cubics)
                let lo = x0.max(a);
                let hi = x1.min(b);
                let m = half * (lo + hi);
                let q = half * (lo + m);
                let r = half * (m + hi);
                let six = lit::<T>(6.0);
                let four = lit::<T>(4.0);
                total = total
                    + (m - lo) / six * (self.eval(lo) + four * self.eval(q) + self.eval(m))
                    + (hi - m) / six * (self.eval(m) + four * self.eval(r) + self.eval(hi));
            }
        }
        total
    }

    /// Evaluate, clamping to the end values outside the node range.
    pub fn eval(&self, x: T) -> T {
        if x <= self.x[0] {
            return self.y[0];
        }
        if x >= *self.x.last().unwrap() {
            return *self.y.last().unwrap();
        }
        let i = self.x.partition_point(|&v| v <= x) - 1;
        let i = i.min(self.x.len() - 2);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let one = T::one();
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = two * t3 - three * t2 + one;
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance.
pub fn adaptive_simpson<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let half = lit::<T>(0.5);
    let six = lit::<T>(6.0);
    let m = half * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / six * (fa + lit::<T>(4.0) * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<T: Real>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> T {
    let half = lit::<T>(0.5);
    let six = lit::<T>(6.0);
    let four = lit::<T>(4.0);
    let m = half * (a + b);
    let lm = half * (a + m);
    let rm = half * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / six * (fa + four * flm + fm);
    let right = (b - m) / six * (fm + four * frm + fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= lit::<T>(15.0) * tol {
        return left + right + err / lit::<T>(15.0);
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol * half, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol * half, depth - 1)
}
