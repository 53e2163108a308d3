//! Terrace assembly: iterate the critical-speed solver down the platform
//! ladder, chaining fronts that share a speed.
//!
//! One round solves for the critical speed from the current platform, then
//! keeps descending at that fixed speed for as long as each trajectory lands
//! on another stable platform. A round ends either at the bottom state
//! (`ReachedZero`) or with a trajectory that crosses the vertical axis, in
//! which case the next round starts from the last platform and must select a
//! strictly larger speed.

use crate::phase_plane::{solve_with, SolveOptions, Termination, Trajectory};
use crate::reaction::ReactionSpec;
use crate::real::{as_f64, lit, Real};
use crate::speed::{find_critical_speed, find_critical_speed_in, snap_platform, SpeedBracket, SpeedError};
use crate::Tolerances;

/// One traveling front of the terrace.
#[derive(Debug, Clone)]
pub struct Front<T> {
    /// Platform the front descends from.
    pub upper: T,
    /// Platform it lands on.
    pub lower: T,
    pub speed: T,
    pub trajectory: Trajectory<T>,
}

/// Ordered stack of fronts from 1 down to 0.
#[derive(Debug, Clone)]
pub struct Terrace<T> {
    pub fronts: Vec<Front<T>>,
}

impl<T: Real> Terrace<T> {
    /// Platform ladder including both extremes: `1 = p_0 > ... > p_J = 0`.
    pub fn platforms(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.fronts.len() + 1);
        out.push(self.fronts[0].upper);
        out.extend(self.fronts.iter().map(|f| f.lower));
        out
    }

    pub fn speeds(&self) -> Vec<T> {
        self.fronts.iter().map(|f| f.speed).collect()
    }
}

#[derive(Debug, Clone)]
pub enum ChainRest<T> {
    /// The round reached the bottom state.
    ReachedZero,
    /// The trajectory from this platform crossed the vertical axis; the next
    /// round must search for a faster speed from here.
    NextSearchFrom(T),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TerraceError {
    #[error("SpeedOrderViolation: round speeds must strictly increase, got {prev} then {next}")]
    SpeedOrderViolation { prev: f64, next: f64 },
    #[error("SpeedOrderViolation: round from platform {0} made no progress")]
    NoProgress(f64),
    #[error(transparent)]
    Speed(#[from] SpeedError),
}

/// Leftover `w(0)` attributable to the bisection stopping `tol_c` above the
/// true critical speed; a vertical-axis crossing below this is the completed
/// terrace touching the origin.
fn chain_zero_w<T: Real>(spec: &ReactionSpec<T>, tols: &Tolerances<T>) -> T {
    let q_scale = (lit::<T>(2.0) * spec.sup_norm()).sqrt().max(T::one());
    (lit::<T>(100.0) * tols.ode).max(lit::<T>(8.0) * tols.speed * q_scale)
}

/// Descend from `start` at fixed speed `c`, emitting a front for every
/// stable platform hit. `first` reuses an already-solved trajectory for the
/// initial descent (the speed solver has one).
pub fn chain_at_speed<T: Real>(
    spec: &ReactionSpec<T>,
    start: T,
    c: T,
    tols: &Tolerances<T>,
    first: Option<Trajectory<T>>,
) -> Result<(Vec<Front<T>>, ChainRest<T>), TerraceError> {
    let mut fronts = Vec::new();
    let mut current = start;
    let mut pending = first;
    let opts = SolveOptions::default_for(tols.ode);
    let zero_w = chain_zero_w(spec, tols);
    loop {
        let t = match pending.take() {
            Some(t) => t,
            None => solve_with(spec, current, c, &opts).map_err(SpeedError::from)?,
        };
        match t.termination {
            Termination::HitPAxis => {
                let platform = snap_platform(spec, t.lower, tols.snap)?;
                let mut tr = t;
                tr.snap_lower(platform);
                fronts.push(Front {
                    upper: current,
                    lower: platform,
                    speed: c,
                    trajectory: tr,
                });
                if platform == T::zero() {
                    return Ok((fronts, ChainRest::ReachedZero));
                }
                current = platform;
            }
            Termination::Degenerate => {
                let mut tr = t;
                tr.snap_lower(T::zero());
                fronts.push(Front {
                    upper: current,
                    lower: T::zero(),
                    speed: c,
                    trajectory: tr,
                });
                return Ok((fronts, ChainRest::ReachedZero));
            }
            Termination::HitQAxis => {
                let w0 = t.q_at_lower * t.q_at_lower;
                if w0 <= zero_w {
                    // The crossing is within the bisection's resolution of a
                    // touch at the origin: this is the bottom front.
                    let mut tr = t;
                    tr.snap_lower(T::zero());
                    fronts.push(Front {
                        upper: current,
                        lower: T::zero(),
                        speed: c,
                        trajectory: tr,
                    });
                    return Ok((fronts, ChainRest::ReachedZero));
                }
                return Ok((fronts, ChainRest::NextSearchFrom(current)));
            }
        }
    }
}

/// Build the full terrace from 1 to 0.
pub fn build_terrace<T: Real>(
    spec: &ReactionSpec<T>,
    tols: &Tolerances<T>,
) -> Result<Terrace<T>, TerraceError> {
    build_terrace_with(spec, tols, None)
}

/// As [`build_terrace`], optionally forcing the first round's speed bracket
/// (used by the determinism checks).
pub fn build_terrace_with<T: Real>(
    spec: &ReactionSpec<T>,
    tols: &Tolerances<T>,
    first_bracket: Option<(T, T)>,
) -> Result<Terrace<T>, TerraceError> {
    let stable_count = spec.index_count() + 1;
    let mut fronts = Vec::new();
    let mut platform = T::one();
    let mut prev_speed: Option<T> = None;
    for round in 0..stable_count {
        let cs = match (round, first_bracket) {
            (0, Some((c_lo, c_hi))) => find_critical_speed_in(
                spec,
                SpeedBracket {
                    c_lo,
                    c_hi,
                    upper: platform,
                },
                tols,
            )?,
            _ => find_critical_speed(spec, platform, tols)?,
        };
        log::info!(
            "round {round}: platform {} -> {} at speed {}",
            as_f64(platform),
            as_f64(cs.platform),
            as_f64(cs.c_star)
        );
        if let Some(prev) = prev_speed {
            if cs.c_star <= prev + tols.speed {
                return Err(TerraceError::SpeedOrderViolation {
                    prev: as_f64(prev),
                    next: as_f64(cs.c_star),
                });
            }
        }
        prev_speed = Some(cs.c_star);
        let (mut new_fronts, rest) =
            chain_at_speed(spec, platform, cs.c_star, tols, Some(cs.trajectory))?;
        fronts.append(&mut new_fronts);
        match rest {
            ChainRest::ReachedZero => {
                let terrace = Terrace { fronts };
                debug_assert!(ladder_is_consistent(&terrace));
                return Ok(terrace);
            }
            ChainRest::NextSearchFrom(p) => {
                if p == platform && fronts.is_empty() {
                    return Err(TerraceError::NoProgress(as_f64(p)));
                }
                if fronts.last().map(|f| f.lower) != Some(p) {
                    return Err(TerraceError::NoProgress(as_f64(p)));
                }
                platform = p;
            }
        }
    }
    Err(TerraceError::NoProgress(as_f64(platform)))
}

fn ladder_is_consistent<T: Real>(t: &Terrace<T>) -> bool {
    if t.fronts.is_empty() {
        return false;
    }
    let mut ok = t.fronts[0].upper == T::one() && t.fronts.last().unwrap().lower == T::zero();
    for w in t.fronts.windows(2) {
        ok &= w[0].lower == w[1].upper;
        ok &= w[0].speed <= w[1].speed;
    }
    ok
}
