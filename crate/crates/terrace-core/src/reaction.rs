//! Multistable reaction functions `f` with jump discontinuities at their
//! stable steady states.
//!
//! A valid reaction has steady states `1 = s_0 > s_1 > ... > s_{2I} = 0`
//! alternating stable/unstable, is positive below every stable state and
//! negative above it, jumps across each stable state
//! (`f(s-) > 0 > f(s+)`), and vanishes continuously at each unstable state.
//! Segments are polynomials, which keeps every validation check certifiable
//! by root isolation instead of sampling alone.

use crate::poly::Poly;
use crate::real::{as_f64, lit, Real};

/// Domain over which the reaction is defined and bounded; the simulator never
/// needs values further than a small overshoot outside `[0, 1]`.
pub const EXTENSION_LO: f64 = -0.5;
pub const EXTENSION_HI: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// One steady state with the one-sided reaction limits at it.
#[derive(Debug, Clone)]
pub struct SteadyState<T> {
    pub value: T,
    pub stability: Stability,
    /// Limit of `f` from below.
    pub f_left: T,
    /// Limit of `f` from above.
    pub f_right: T,
}

/// Raw, unchecked reaction description (what the spec file parses into).
#[derive(Debug, Clone)]
pub struct ReactionBuilder<T> {
    /// `(value, stability)`, any order; validation sorts descending.
    pub steady_states: Vec<(T, Stability)>,
    /// `(lo, hi, coefficients ascending)`, covering `(0, 1)`.
    pub segments: Vec<(T, T, Vec<T>)>,
    /// Polynomial used for `p < 0`.
    pub extension_below: Vec<T>,
    /// Polynomial used for `p > 1`.
    pub extension_above: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReactionError {
    #[error("BadOrdering: {0}")]
    BadOrdering(String),
    #[error("NonAlternatingStability: steady states must alternate stable/unstable with stable endpoints")]
    NonAlternatingStability,
    #[error("SignViolation(({lo}, {hi})): reaction must be {} there", if *.positive { "positive" } else { "negative" })]
    SignViolation { lo: f64, hi: f64, positive: bool },
    #[error("MissingJump({0}): stable steady state needs f(s-) > 0 > f(s+)")]
    MissingJump(f64),
    #[error("NonzeroAtUnstable({0}): reaction must vanish continuously at unstable steady states")]
    NonzeroAtUnstable(f64),
    #[error("EvalAtStableState({0}): f is undefined at a stable steady state; use one-sided limits")]
    EvalAtStableState(f64),
    #[error("NotABreakpoint({0})")]
    NotABreakpoint(f64),
}

/// Validated reaction. Immutable after construction, so shared references can
/// be used freely from parallel sweeps.
#[derive(Debug, Clone)]
pub struct ReactionSpec<T> {
    /// Descending by value, first is `1` (stable), last is `0` (stable).
    steady_states: Vec<SteadyState<T>>,
    /// Ascending `(lo, hi, poly)` covering `(0, 1)`, endpoints exactly the
    /// steady-state values.
    segments: Vec<(T, T, Poly<T>)>,
    extension_below: Poly<T>,
    extension_above: Poly<T>,
    sup_norm: T,
}

impl<T: Real> ReactionBuilder<T> {
    /// Check every structural hypothesis and return the certified spec.
    pub fn validate(self) -> Result<ReactionSpec<T>, ReactionError> {
        let mut states = self.steady_states;
        if states.len() < 3 || states.len() % 2 == 0 {
            return Err(ReactionError::BadOrdering(format!(
                "need an odd number (>= 3) of steady states, got {}",
                states.len()
            )));
        }
        states.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        for w in states.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(ReactionError::BadOrdering(
                    "steady-state values must be strictly decreasing".into(),
                ));
            }
        }
        if states.first().unwrap().0 != T::one() || states.last().unwrap().0 != T::zero() {
            return Err(ReactionError::BadOrdering(
                "steady states must span exactly [0, 1]".into(),
            ));
        }
        for (k, (_, stab)) in states.iter().enumerate() {
            let expect = if k % 2 == 0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            if *stab != expect {
                return Err(ReactionError::NonAlternatingStability);
            }
        }

        let mut segments: Vec<(T, T, Poly<T>)> = self
            .segments
            .into_iter()
            .map(|(lo, hi, c)| (lo, hi, Poly::new(c)))
            .collect();
        segments.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if segments.len() != states.len() - 1 {
            return Err(ReactionError::BadOrdering(format!(
                "expected {} segments (one per adjacent steady-state pair), got {}",
                states.len() - 1,
                segments.len()
            )));
        }
        // Segment endpoints must be exactly the steady-state values.
        let ascending: Vec<T> = states.iter().rev().map(|s| s.0).collect();
        for (j, (lo, hi, _)) in segments.iter().enumerate() {
            if *lo != ascending[j] || *hi != ascending[j + 1] {
                return Err(ReactionError::BadOrdering(
                    "segment endpoints must be exactly the steady-state values".into(),
                ));
            }
        }

        let extension_below = Poly::new(self.extension_below);
        let extension_above = Poly::new(self.extension_above);

        // Continuity (value zero) at unstable states, from both sides.
        let scale = segments
            .iter()
            .map(|(_, _, p)| p.coeff_scale())
            .fold(T::one(), T::max);
        let zero_tol = scale * lit(1e-9);
        for (k, s) in ascending.iter().enumerate().skip(1) {
            if k == ascending.len() - 1 {
                break;
            }
            if (k % 2) == 1 {
                // unstable (ascending order starts at stable 0)
                let below = segments[k - 1].2.eval(*s);
                let above = segments[k].2.eval(*s);
                if below.abs() > zero_tol || above.abs() > zero_tol {
                    return Err(ReactionError::NonzeroAtUnstable(as_f64(*s)));
                }
            }
        }

        // Jump condition at stable states.
        let limits_at = |k: usize| -> (T, T) {
            let s = ascending[k];
            let left = if k == 0 {
                extension_below.eval(s)
            } else {
                segments[k - 1].2.eval(s)
            };
            let right = if k == ascending.len() - 1 {
                extension_above.eval(s)
            } else {
                segments[k].2.eval(s)
            };
            (left, right)
        };
        for (k, s) in ascending.iter().enumerate() {
            if k % 2 == 0 {
                let (left, right) = limits_at(k);
                if !(left > T::zero() && right < T::zero()) {
                    return Err(ReactionError::MissingJump(as_f64(*s)));
                }
            }
        }

        // Sign pattern: negative just above a stable state, positive just
        // below one; positive below 0 and negative above 1.
        for (j, (lo, hi, p)) in segments.iter().enumerate() {
            // ascending segment j has its top at ascending[j + 1]
            let positive = (j + 1) % 2 == 0;
            if !p.sign_definite_on(*lo, *hi, positive, 1000) {
                return Err(ReactionError::SignViolation {
                    lo: as_f64(*lo),
                    hi: as_f64(*hi),
                    positive,
                });
            }
        }
        if !extension_below.sign_definite_on(lit(EXTENSION_LO), T::zero(), true, 500) {
            return Err(ReactionError::SignViolation {
                lo: EXTENSION_LO,
                hi: 0.0,
                positive: true,
            });
        }
        if !extension_above.sign_definite_on(T::one(), lit(EXTENSION_HI), false, 500) {
            return Err(ReactionError::SignViolation {
                lo: 1.0,
                hi: EXTENSION_HI,
                positive: false,
            });
        }

        let mut sup_norm = extension_below
            .sup_abs_on(lit(EXTENSION_LO), T::zero())
            .max(extension_above.sup_abs_on(T::one(), lit(EXTENSION_HI)));
        for (lo, hi, p) in &segments {
            sup_norm = sup_norm.max(p.sup_abs_on(*lo, *hi));
        }

        let steady_states = states
            .iter()
            .map(|(v, stab)| {
                let k = ascending.iter().position(|a| a == v).unwrap();
                let (f_left, f_right) = if *stab == Stability::Stable {
                    limits_at(k)
                } else {
                    (T::zero(), T::zero())
                };
                SteadyState {
                    value: *v,
                    stability: *stab,
                    f_left,
                    f_right,
                }
            })
            .collect();

        Ok(ReactionSpec {
            steady_states,
            segments,
            extension_below,
            extension_above,
            sup_norm,
        })
    }
}

impl<T: Real> ReactionSpec<T> {
    /// Steady states, descending by value.
    pub fn steady_states(&self) -> &[SteadyState<T>] {
        &self.steady_states
    }

    /// Interior segments `(lo, hi, poly)`, ascending.
    pub fn segments(&self) -> &[(T, T, Poly<T>)] {
        &self.segments
    }

    pub fn extension_below(&self) -> &Poly<T> {
        &self.extension_below
    }

    pub fn extension_above(&self) -> &Poly<T> {
        &self.extension_above
    }

    /// Computed bound `M >= |f|` over the extended domain.
    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }

    /// The multistability index `I` (steady-state count is `2I + 1`).
    pub fn index_count(&self) -> usize {
        (self.steady_states.len() - 1) / 2
    }

    /// `(stable, unstable)` values, each descending.
    pub fn classify_states(&self) -> (Vec<T>, Vec<T>) {
        let stable = self
            .steady_states
            .iter()
            .filter(|s| s.stability == Stability::Stable)
            .map(|s| s.value)
            .collect();
        let unstable = self
            .steady_states
            .iter()
            .filter(|s| s.stability == Stability::Unstable)
            .map(|s| s.value)
            .collect();
        (stable, unstable)
    }

    pub fn state(&self, value: T) -> Option<&SteadyState<T>> {
        self.steady_states.iter().find(|s| s.value == value)
    }

    pub fn is_stable_state(&self, value: T) -> bool {
        self.state(value)
            .map(|s| s.stability == Stability::Stable)
            .unwrap_or(false)
    }

    /// Largest unstable state strictly below `p`.
    pub fn largest_unstable_below(&self, p: T) -> Option<T> {
        self.steady_states
            .iter()
            .filter(|s| s.stability == Stability::Unstable && s.value < p)
            .map(|s| s.value)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: T| a.max(v))))
    }

    /// Pointwise evaluation. Undefined exactly at stable steady states;
    /// exactly zero at unstable ones.
    pub fn eval(&self, p: T) -> Result<T, ReactionError> {
        match self.state(p) {
            Some(s) if s.stability == Stability::Stable => {
                Err(ReactionError::EvalAtStableState(as_f64(p)))
            }
            Some(_) => Ok(T::zero()),
            None => Ok(self.eval_segment(p)),
        }
    }

    /// Evaluation with the simulator convention `f = 0` exactly at stable
    /// steady states (the unique choice that keeps constants steady).
    pub fn eval_pde(&self, p: T) -> T {
        match self.state(p) {
            Some(_) => T::zero(),
            None => self.eval_segment(p),
        }
    }

    fn eval_segment(&self, p: T) -> T {
        if p < T::zero() {
            return self.extension_below.eval(p);
        }
        if p > T::one() {
            return self.extension_above.eval(p);
        }
        let (_, _, poly) = self.segment_covering(p);
        poly.eval(p)
    }

    /// Interior segment containing `p` (breakpoints resolve to the segment on
    /// their right, except at 1).
    pub fn segment_covering(&self, p: T) -> (T, T, &Poly<T>) {
        debug_assert!(p >= T::zero() && p <= T::one());
        let idx = self
            .segments
            .partition_point(|(_, hi, _)| *hi <= p)
            .min(self.segments.len() - 1);
        let (lo, hi, ref poly) = self.segments[idx];
        (lo, hi, poly)
    }

    /// Segment whose top endpoint is `hi_value` (i.e. the piece of `f` just
    /// below it).
    pub fn segment_below(&self, hi_value: T) -> Option<&Poly<T>> {
        if hi_value == T::zero() {
            return Some(&self.extension_below);
        }
        self.segments
            .iter()
            .find(|(_, hi, _)| *hi == hi_value)
            .map(|(_, _, p)| p)
    }

    /// One-sided limits of `f` at a steady state.
    pub fn one_sided_limits(&self, theta: T) -> Result<(T, T), ReactionError> {
        self.state(theta)
            .map(|s| (s.f_left, s.f_right))
            .ok_or(ReactionError::NotABreakpoint(as_f64(theta)))
    }

    /// Exact `int_a^b f`, piecewise over the polynomial segments
    /// (extensions included when the range leaves `[0, 1]`). Requires
    /// `a <= b`.
    pub fn integral(&self, a: T, b: T) -> T {
        debug_assert!(a <= b);
        let mut total = T::zero();
        if a < T::zero() {
            total = total + self.extension_below.integral(a, b.min(T::zero()));
        }
        if b > T::one() {
            total = total + self.extension_above.integral(a.max(T::one()), b);
        }
        for (lo, hi, p) in &self.segments {
            let x0 = a.max(*lo);
            let x1 = b.min(*hi);
            if x1 > x0 {
                total = total + p.integral(x0, x1);
            }
        }
        total
    }

    /// Bound on `|f'|` over the interior segments (Lipschitz constant away
    /// from the stable states).
    pub fn lipschitz_bound(&self) -> T {
        self.segments
            .iter()
            .map(|(lo, hi, p)| p.derivative().sup_abs_on(*lo, *hi))
            .fold(T::zero(), T::max)
    }
}
