//! Critical-speed solver.
//!
//! For a platform `p_u`, the trajectory either crosses the vertical axis
//! (`q(0) < 0`, "too slow") or lands on the horizontal axis (`q(p_l) = 0`,
//! "too fast"); which of the two happens is monotone in the speed `c`. The
//! selected speed of the front leaving `p_u` is
//!
//! ```text
//! c* = sup { c : p_l(c) = 0 and q(0; c) < 0 }
//! ```
//!
//! found here by bisection between a certified too-slow speed and a certified
//! too-fast one. The terminal value of the trajectory at the bisection's
//! upper endpoint is then snapped to a stable steady state.

use crate::phase_plane::{solve_with, SolveOptions, Termination, Trajectory, TrajectoryError};
use crate::reaction::ReactionSpec;
use crate::real::{as_f64, lit, Real};
use crate::Tolerances;

#[derive(Debug, Clone, Copy)]
pub struct SpeedBracket<T> {
    /// Trajectory at `c_lo` crosses the vertical axis.
    pub c_lo: T,
    /// Trajectory at `c_hi` lands on the horizontal axis.
    pub c_hi: T,
    pub upper: T,
}

/// Result of the bisection: speed, bracket half-width, snapped platform, and
/// the trajectory at `c_star` (terminal point snapped onto the platform).
#[derive(Debug, Clone)]
pub struct CriticalSpeed<T> {
    pub c_star: T,
    pub half_width: T,
    pub platform: T,
    pub trajectory: Trajectory<T>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpeedError {
    #[error("BracketSearchExceeded({0})")]
    BracketSearchExceeded(usize),
    #[error("SnapFailure({0}): no stable steady state within the snap tolerance")]
    SnapFailure(f64),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

const MAX_BRACKET_STEPS: usize = 64;

/// Solve options used throughout the speed search (the default touch
/// thresholds are already matched to the bisection resolution).
fn search_options<T: Real>(tols: &Tolerances<T>) -> SolveOptions<T> {
    SolveOptions::endpoint_only(tols.ode)
}

fn is_too_slow<T: Real>(
    spec: &ReactionSpec<T>,
    upper: T,
    c: T,
    opts: &SolveOptions<T>,
) -> Result<bool, SpeedError> {
    let t = solve_with(spec, upper, c, opts)?;
    Ok(t.termination == Termination::HitQAxis)
}

/// A speed at which the trajectory crosses the vertical axis, found by
/// testing `0, -1, -2, -4, ...`.
pub fn lower_bracket<T: Real>(
    spec: &ReactionSpec<T>,
    upper: T,
    tols: &Tolerances<T>,
) -> Result<T, SpeedError> {
    let opts = search_options(tols);
    let mut c = T::zero();
    for step in 0..MAX_BRACKET_STEPS {
        if is_too_slow(spec, upper, c, &opts)? {
            return Ok(c);
        }
        c = if step == 0 {
            -T::one()
        } else {
            c * lit::<T>(2.0)
        };
    }
    Err(SpeedError::BracketSearchExceeded(MAX_BRACKET_STEPS))
}

/// A speed at which the trajectory is guaranteed to land on the horizontal
/// axis: `2 sqrt(K)` where `K(p - s) >= f(p)` on the segment between `p_u`
/// and the unstable state `s` just below it. `K` is computed exactly by
/// polynomial algebra (the segment has a root at `s`, so the ratio is again
/// a polynomial) and the returned speed is verified by one solve.
pub fn upper_bracket<T: Real>(
    spec: &ReactionSpec<T>,
    upper: T,
    tols: &Tolerances<T>,
) -> Result<T, SpeedError> {
    let s = spec
        .largest_unstable_below(upper)
        .expect("every positive stable state has an unstable state below it");
    let poly = spec.segment_below(upper).expect("segment below a stable state");
    let (ratio, _rem) = poly.deflate(s);
    let k = ratio.max_on(s, upper);
    debug_assert!(k > T::zero());
    let mut c = lit::<T>(2.0) * k.sqrt();
    let opts = search_options(tols);
    for _ in 0..MAX_BRACKET_STEPS {
        if !is_too_slow(spec, upper, c, &opts)? {
            return Ok(c);
        }
        c = c * lit::<T>(2.0);
    }
    Err(SpeedError::BracketSearchExceeded(MAX_BRACKET_STEPS))
}

pub fn bracket<T: Real>(
    spec: &ReactionSpec<T>,
    upper: T,
    tols: &Tolerances<T>,
) -> Result<SpeedBracket<T>, SpeedError> {
    Ok(SpeedBracket {
        c_lo: lower_bracket(spec, upper, tols)?,
        c_hi: upper_bracket(spec, upper, tols)?,
        upper,
    })
}

/// Nearest stable steady-state value within `tol_snap`.
pub fn snap_platform<T: Real>(
    spec: &ReactionSpec<T>,
    p: T,
    tol_snap: T,
) -> Result<T, SpeedError> {
    let (stable, _) = spec.classify_states();
    stable
        .iter()
        .copied()
        .filter(|s| (*s - p).abs() <= tol_snap)
        .min_by(|a, b| (*a - p).abs().partial_cmp(&(*b - p).abs()).unwrap())
        .ok_or(SpeedError::SnapFailure(as_f64(p)))
}

/// Bracket and bisect the critical speed from the platform `upper`.
pub fn find_critical_speed<T: Real>(
    spec: &ReactionSpec<T>,
    upper: T,
    tols: &Tolerances<T>,
) -> Result<CriticalSpeed<T>, SpeedError> {
    let b = bracket(spec, upper, tols)?;
    find_critical_speed_in(spec, b, tols)
}

/// Bisection inside a caller-provided bracket. Endpoints that do not carry
/// the expected classification are first pushed outward (this makes the
/// search robust to loose brackets).
pub fn find_critical_speed_in<T: Real>(
    spec: &ReactionSpec<T>,
    bracket: SpeedBracket<T>,
    tols: &Tolerances<T>,
) -> Result<CriticalSpeed<T>, SpeedError> {
    let opts = search_options(tols);
    let upper = bracket.upper;
    let mut lo = bracket.c_lo;
    let mut hi = bracket.c_hi;
    for step in 0..=MAX_BRACKET_STEPS {
        if is_too_slow(spec, upper, lo, &opts)? {
            break;
        }
        if step == MAX_BRACKET_STEPS {
            return Err(SpeedError::BracketSearchExceeded(MAX_BRACKET_STEPS));
        }
        lo = lo - (hi - lo).abs().max(T::one());
    }
    for step in 0..=MAX_BRACKET_STEPS {
        if !is_too_slow(spec, upper, hi, &opts)? {
            break;
        }
        if step == MAX_BRACKET_STEPS {
            return Err(SpeedError::BracketSearchExceeded(MAX_BRACKET_STEPS));
        }
        hi = hi + (hi - lo).abs().max(T::one());
    }

    let mut iter = 0usize;
    while hi - lo > tols.speed {
        let mid = lit::<T>(0.5) * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if is_too_slow(spec, upper, mid, &opts)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
        log::debug!(
            "speed bisection from {}: iter {iter}, bracket [{lo}, {hi}]",
            as_f64(upper)
        );
        if iter > 2048 {
            return Err(SpeedError::BracketSearchExceeded(iter));
        }
    }

    // The trajectory exhibiting the connected platform: usually the solve at
    // `hi` already lands on the horizontal axis. When `hi` sits inside the
    // classification band just below the critical speed (the trajectory
    // still slips past the platform and reaches the origin), nudge the speed
    // upward until a genuine landing appears; strictly above the critical
    // speed the landing value is positive.
    let dense = SolveOptions::default_for(tols.ode);
    let mut offset = (lit::<T>(2.0) * tols.speed).max(lit::<T>(100.0) * tols.ode);
    let mut t = solve_with(spec, upper, hi, &dense)?;
    for _ in 0..MAX_BRACKET_STEPS {
        if t.termination == Termination::HitPAxis {
            break;
        }
        t = solve_with(spec, upper, hi + offset, &dense)?;
        offset = offset * lit(2.0);
    }
    let platform = snap_platform(spec, t.lower, tols.snap)?;
    let mut trajectory = t;
    trajectory.snap_lower(platform);
    Ok(CriticalSpeed {
        c_star: hi,
        half_width: lit::<T>(0.5) * (hi - lo),
        platform,
        trajectory,
    })
}
