//! Dense univariate polynomials with the small amount of real-root machinery
//! the reaction validator needs: Sturm-chain root counting on an interval,
//! critical-point isolation, and certified sup bounds.

use crate::real::{lit, Real};

/// Polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Poly { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(T::zero());
        }
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == T::zero() {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == T::zero())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        let mut acc = T::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly<T> {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![T::zero()]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::from_usize(k).unwrap())
            .collect();
        Poly::new(coeffs)
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly<T> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(T::zero());
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / T::from_usize(k + 1).unwrap());
        }
        Poly::new(coeffs)
    }

    /// Exact definite integral over `[a, b]`.
    pub fn integral(&self, a: T, b: T) -> T {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// Largest coefficient magnitude; scale reference for zero thresholds.
    pub fn coeff_scale(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |m, c| m.max(c.abs()))
            .max(T::one())
    }

    /// Deflate by a known root: returns `q` with `self = (x - root) q + rem`.
    pub fn deflate(&self, root: T) -> (Poly<T>, T) {
        let n = self.coeffs.len();
        if n == 1 {
            return (Poly::new(vec![T::zero()]), self.coeffs[0]);
        }
        let mut q = vec![T::zero(); n - 1];
        let mut carry = self.coeffs[n - 1];
        for k in (0..n - 1).rev() {
            q[k] = carry;
            carry = self.coeffs[k] + carry * root;
        }
        (Poly::new(q), carry)
    }

    /// Sturm chain, with small coefficients squashed to keep the chain stable
    /// in floating point.
    fn sturm_chain(&self) -> Vec<Poly<T>> {
        let eps = lit::<T>(1e-13) * self.coeff_scale();
        let squash = |mut p: Poly<T>| -> Poly<T> {
            for c in p.coeffs.iter_mut() {
                if c.abs() <= eps {
                    *c = T::zero();
                }
            }
            p.trim();
            p
        };
        let mut chain = vec![squash(self.clone()), squash(self.derivative())];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() || chain[n - 1].degree() == 0 {
                break;
            }
            let rem = poly_rem(&chain[n - 2], &chain[n - 1]);
            let mut neg = rem;
            for c in neg.coeffs.iter_mut() {
                *c = -*c;
            }
            let neg = squash(neg);
            if neg.is_zero() {
                break;
            }
            chain.push(neg);
        }
        chain
    }

    fn sign_variations(chain: &[Poly<T>], x: T) -> usize {
        let mut count = 0;
        let mut last = T::zero();
        for p in chain {
            let v = p.eval(x);
            if v == T::zero() {
                continue;
            }
            if last != T::zero() && (v > T::zero()) != (last > T::zero()) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: T, b: T) -> usize {
        if self.is_zero() || a >= b {
            return 0;
        }
        let chain = self.sturm_chain();
        let va = Self::sign_variations(&chain, a);
        let vb = Self::sign_variations(&chain, b);
        va.saturating_sub(vb)
    }

    /// Points where the derivative can vanish inside `(a, b)`, each isolated
    /// to width `width` by Sturm-count bisection. Works for roots of any
    /// multiplicity.
    pub fn critical_points(&self, a: T, b: T, width: T) -> Vec<T> {
        let d = self.derivative();
        let mut out = Vec::new();
        let mut stack = vec![(a, b)];
        let half = lit::<T>(0.5);
        while let Some((lo, hi)) = stack.pop() {
            let n = d.count_roots(lo, hi);
            if n == 0 {
                continue;
            }
            if hi - lo <= width {
                out.push(half * (lo + hi));
                continue;
            }
            let mid = half * (lo + hi);
            stack.push((lo, mid));
            stack.push((mid, hi));
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }

    /// Upper bound for `|self|` on `[a, b]`: endpoint and critical-point
    /// values, inflated by a few ulps so the bound is safe to certify against
    /// sampling.
    pub fn sup_abs_on(&self, a: T, b: T) -> T {
        let mut m = self.eval(a).abs().max(self.eval(b).abs());
        for c in self.critical_points(a, b, lit(1e-9)) {
            m = m.max(self.eval(c).abs());
        }
        m * (T::one() + lit(1e-11))
    }

    /// Maximum of `self` (signed) on `[a, b]`.
    pub fn max_on(&self, a: T, b: T) -> T {
        let mut m = self.eval(a).max(self.eval(b));
        for c in self.critical_points(a, b, lit(1e-9)) {
            m = m.max(self.eval(c));
        }
        m
    }

    /// Certify that `self` has the sign of `expected_sign` on the open
    /// interval `(a, b)`: no interior roots (Sturm count on a slightly shrunk
    /// interval, so exact endpoint roots do not count) and the right sign on a
    /// sample grid.
    pub fn sign_definite_on(&self, a: T, b: T, positive: bool, samples: usize) -> bool {
        let span = b - a;
        if span <= T::zero() {
            return true;
        }
        let n = samples.max(3);
        for k in 1..n {
            let x = a + span * T::from_usize(k).unwrap() / T::from_usize(n).unwrap();
            let v = self.eval(x);
            if (positive && v <= T::zero()) || (!positive && v >= T::zero()) {
                return false;
            }
        }
        let delta = (span * lit(1e-9))
            .max(span * T::epsilon() * lit(64.0))
            .max(lit(1e-12));
        self.count_roots(a + delta, b - delta) == 0
    }
}

/// Remainder of polynomial long division.
fn poly_rem<T: Real>(num: &Poly<T>, den: &Poly<T>) -> Poly<T> {
    let mut r = num.coeffs.clone();
    let d = den.coeffs.len();
    let lead = *den.coeffs.last().unwrap();
    while r.len() >= d && r.len() > 1 {
        let k = r.len() - d;
        let q = *r.last().unwrap() / lead;
        for i in 0..d {
            let v = r[k + i] - q * den.coeffs[i];
            r[k + i] = v;
        }
        r.pop();
    }
    Poly::new(r)
}
