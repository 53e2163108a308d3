//! Independent reference integrator used by the test suites as an oracle.
//!
//! Deliberately a different formulation from the production solver: it
//! integrates the second-order profile system `p' = q`, `q' = -c q - f(p)`
//! in the spatial variable with fixed-step RK4, instead of the value
//! parametrized `w = q^2` equation with adaptive stepping. Not part of the
//! public API.

use crate::reaction::ReactionSpec;
use crate::real::{lit, Real};

#[derive(Debug, Clone)]
pub struct ReferenceRun<T> {
    /// Where the run stopped in `p`.
    pub p_final: T,
    /// `q(0)` when the run reached `p = 0` with `q < 0`.
    pub q_at_zero: Option<T>,
    /// True when the run ended because `q` returned to zero at `p > 0`.
    pub touched_axis: bool,
}

/// Integrate the profile system from just below `p_u` until `q >= 0` or
/// `p <= 0`, with step `dx`.
pub fn oracle_rk4<T: Real>(spec: &ReactionSpec<T>, p_u: T, c: T, dx: T) -> ReferenceRun<T> {
    let f = |p: T| spec.eval_pde(p);
    let eps = lit::<T>(1e-10);
    let mut p = p_u - eps;
    // leading-order slope at the seed offset
    let f_left = spec.one_sided_limits(p_u).expect("stable state").0;
    let mut q = -(lit::<T>(2.0) * f_left * eps).sqrt();

    let rhs = |p: T, q: T| (q, -c * q - f(p));
    let half = lit::<T>(0.5);
    let sixth = lit::<T>(1.0 / 6.0);
    let two = lit::<T>(2.0);
    let max_steps = 200_000_000usize;
    for _ in 0..max_steps {
        let (k1p, k1q) = rhs(p, q);
        let (k2p, k2q) = rhs(p + half * dx * k1p, q + half * dx * k1q);
        let (k3p, k3q) = rhs(p + half * dx * k2p, q + half * dx * k2q);
        let (k4p, k4q) = rhs(p + dx * k3p, q + dx * k3q);
        let p_new = p + dx * sixth * (k1p + two * k2p + two * k3p + k4p);
        let q_new = q + dx * sixth * (k1q + two * k2q + two * k3q + k4q);
        if p_new <= T::zero() {
            // linear interpolation to p = 0
            let t = p / (p - p_new);
            let q0 = q + (q_new - q) * t;
            return ReferenceRun {
                p_final: T::zero(),
                q_at_zero: Some(q0.min(T::zero())),
                touched_axis: false,
            };
        }
        if q_new >= T::zero() {
            let t = -q / (q_new - q);
            let p_stop = p + (p_new - p) * t;
            return ReferenceRun {
                p_final: p_stop,
                q_at_zero: None,
                touched_axis: true,
            };
        }
        p = p_new;
        q = q_new;
    }
    ReferenceRun {
        p_final: p,
        q_at_zero: None,
        touched_axis: false,
    }
}

/// Bisection for the critical speed run on the reference integrator alone:
/// the largest `c` whose reference run reaches `p = 0` with `q(0) < 0`.
pub fn oracle_critical_speed<T: Real>(
    spec: &ReactionSpec<T>,
    p_u: T,
    c_lo: T,
    c_hi: T,
    tol_c: T,
    dx: T,
) -> T {
    let reaches_axis = |c: T| -> bool {
        let run = oracle_rk4(spec, p_u, c, dx);
        run.q_at_zero.map(|q| q < -lit::<T>(1e-6)).unwrap_or(false)
    };
    let mut lo = c_lo;
    let mut hi = c_hi;
    assert!(reaches_axis(lo) && !reaches_axis(hi), "oracle bracket invalid");
    while hi - lo > tol_c {
        let mid = lit::<T>(0.5) * (lo + hi);
        if reaches_axis(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lit::<T>(0.5) * (lo + hi)
}
