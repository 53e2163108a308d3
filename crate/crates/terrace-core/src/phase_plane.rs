//! Phase-plane trajectory solver.
//!
//! A traveling profile with speed `c` satisfies `p'' + c p' + f(p) = 0`;
//! writing the slope `q = p'` as a function of the value `p` gives the scalar
//! equation `dq/dp = -c - f(p)/q` on `(p_l, p_u)`, started at `q(p_u) = 0`
//! from a stable state `p_u` and integrated downward until it touches one of
//! the axes.
//!
//! The solver integrates `w = q^2` instead of `q`:
//!
//! ```text
//! dw/dp = 2 c sqrt(w) - 2 f(p)
//! ```
//!
//! which removes the square-root singularity of `q` at the start (`|dw/dp|`
//! stays bounded by `2|c||q| + 2|f|`). Stepping is an embedded
//! Dormand-Prince 5(4) pair with step rejection; integration restarts exactly
//! at every segment boundary of the reaction, so stages never straddle a
//! discontinuity of `f` or `f'`. The `w = 0` event is localized by bisection
//! over the last step.
//!
//! Termination:
//! * `HitPAxis` - `w` reached zero at some `p_l > 0` (the profile lands on a
//!   lower value with zero slope);
//! * `HitQAxis` - the integration reached `p = 0` with `w > 0` (the profile
//!   crosses zero with negative slope);
//! * `Degenerate` - reached `p = 0` with `w = 0`, the exact single-front
//!   connection to the bottom state.
//!
//! A zero of `w` where `f > 0` cannot be a genuine termination (the slope of
//! `w` pushes it positive again just below), so such an event is treated as a
//! graze and integration continues.
//!
//! Solves are pure functions of `(spec, p_u, c, options)` with no shared
//! state; parameter sweeps can run them from any number of threads.

use crate::reaction::{ReactionError, ReactionSpec};
use crate::real::{as_f64, lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `q(p_l) = 0` with `p_l > 0`.
    HitPAxis,
    /// `p_l = 0` with `q(0) < 0`.
    HitQAxis,
    /// `p_l = 0` with `q(0) = 0`.
    Degenerate,
}

/// One solved trajectory `q(p)` on `[lower, upper]`.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    /// Starting stable platform `p_u`.
    pub upper: T,
    /// Wave speed `c`.
    pub speed: T,
    /// Terminal value `p_l`.
    pub lower: T,
    /// `q(p_l)`; zero for `HitPAxis`/`Degenerate`, negative for `HitQAxis`.
    pub q_at_lower: T,
    pub termination: Termination,
    /// `(p, q)` rows with `p` strictly decreasing from `upper` to `lower`.
    pub samples: Vec<(T, T)>,
    /// Integration tolerance that produced this trajectory.
    pub tol: T,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrajectoryError {
    #[error("NotStable({0}): trajectories start from positive stable steady states")]
    NotStable(f64),
    #[error("EpsilonTooLarge({0})")]
    EpsilonTooLarge(f64),
    #[error("EventLocalizationFailure: w unresolved on p in [{lo}, {hi}]")]
    EventLocalizationFailure { lo: f64, hi: f64 },
    #[error(transparent)]
    Reaction(#[from] ReactionError),
}

/// Knobs for a single solve.
#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    /// Local error tolerance per step (`tol_ode`).
    pub tol: T,
    /// Keep dense samples (otherwise only the endpoints are retained).
    pub record: bool,
    /// Maximum step while recording, as a fraction of `p_u`.
    pub max_step_fraction: T,
    /// Extra `p` values the stepper must land on exactly.
    pub grid: Vec<T>,
    /// `w` below this at an interior steady state counts as touching the
    /// p-axis there.
    pub touch_w: T,
    /// `w(0)` below this counts as `Degenerate` rather than `HitQAxis`.
    pub zero_w: T,
}

impl<T: Real> SolveOptions<T> {
    pub fn default_for(tol: T) -> Self {
        // Near-critical speeds leave w-values of order |c - c*| at interior
        // platforms; the touch threshold must stay well below the speed-
        // bisection resolution times the q-integral scale, while still
        // swallowing the integrator's own noise (observed a few orders below
        // the local tolerance).
        let touch = (lit::<T>(20.0) * tol).max(lit(1e-14));
        SolveOptions {
            tol,
            record: true,
            max_step_fraction: lit(1e-3),
            grid: Vec::new(),
            touch_w: touch,
            zero_w: touch,
        }
    }

    pub fn endpoint_only(tol: T) -> Self {
        SolveOptions {
            record: false,
            ..Self::default_for(tol)
        }
    }
}

/// First integration node near the singular start: the expansion of
/// `w = q^2` in `eps = p_u - p`,
///
/// ```text
/// w(eps) = 2 fl eps - (4c/3) sqrt(2 fl) eps^(3/2) + ((2/3)c^2 - fl') eps^2 + O(eps^(5/2))
/// ```
///
/// with `fl = f(p_u-) > 0` and `fl' = f'(p_u-)`. For `c = 0` and linear `f`
/// the expansion is exact.
pub fn seed_asymptotic<T: Real>(
    spec: &ReactionSpec<T>,
    p_u: T,
    c: T,
    eps: T,
) -> Result<(T, T), TrajectoryError> {
    if !spec.is_stable_state(p_u) {
        return Err(TrajectoryError::NotStable(as_f64(p_u)));
    }
    if eps == T::zero() {
        return Ok((p_u, T::zero()));
    }
    if eps < T::zero() {
        return Err(TrajectoryError::EpsilonTooLarge(as_f64(eps)));
    }
    // No segment boundary may sit inside (p_u - eps, p_u).
    let seg_lo = spec
        .segments()
        .iter()
        .find(|(_, hi, _)| *hi == p_u)
        .map(|(lo, _, _)| *lo)
        .unwrap_or(T::zero());
    if p_u - eps < seg_lo {
        return Err(TrajectoryError::EpsilonTooLarge(as_f64(eps)));
    }
    let w = seed_w(spec, p_u, c, eps);
    if w <= T::zero() {
        return Err(TrajectoryError::EpsilonTooLarge(as_f64(eps)));
    }
    Ok((p_u - eps, -w.sqrt()))
}

fn seed_w<T: Real>(spec: &ReactionSpec<T>, p_u: T, c: T, eps: T) -> T {
    let poly = spec.segment_below(p_u).expect("stable state has a segment below");
    let fl = poly.eval(p_u);
    let flp = poly.derivative().eval(p_u);
    expansion_w(fl, flp, c, eps)
}

/// Shared three-term expansion; also used after a graze restart, where the
/// local `f` value plays the role of the one-sided limit.
fn expansion_w<T: Real>(f0: T, f0p: T, c: T, eps: T) -> T {
    let two = lit::<T>(2.0);
    let a1 = two * f0;
    let a2 = -(lit::<T>(4.0) / lit::<T>(3.0)) * c * (two * f0).sqrt();
    let a3 = two / lit::<T>(3.0) * c * c - f0p;
    ((a1 + a2 * eps.sqrt()) + a3 * eps) * eps
}

/// Full solve with dense samples at the default density.
pub fn solve_trajectory<T: Real>(
    spec: &ReactionSpec<T>,
    p_u: T,
    c: T,
    tol: T,
) -> Result<Trajectory<T>, TrajectoryError> {
    solve_with(spec, p_u, c, &SolveOptions::default_for(tol))
}

/// Endpoint data only: `(p_l, q(p_l), termination)`.
pub fn solve_terminal<T: Real>(
    spec: &ReactionSpec<T>,
    p_u: T,
    c: T,
    tol: T,
) -> Result<(T, T, Termination), TrajectoryError> {
    let t = solve_with(spec, p_u, c, &SolveOptions::endpoint_only(tol))?;
    Ok((t.lower, t.q_at_lower, t.termination))
}

pub fn solve_with<T: Real>(
    spec: &ReactionSpec<T>,
    p_u: T,
    c: T,
    opts: &SolveOptions<T>,
) -> Result<Trajectory<T>, TrajectoryError> {
    // descent needs a positive stable start; the bottom state has nothing
    // below it
    if !spec.is_stable_state(p_u) || p_u <= T::zero() {
        return Err(TrajectoryError::NotStable(as_f64(p_u)));
    }
    let mut engine = Engine::new(spec, p_u, c, opts);
    engine.run()
}

const MAX_SAMPLES: usize = 1_000_000;
const MAX_GRAZES: usize = 64;

struct Engine<'a, T: Real> {
    spec: &'a ReactionSpec<T>,
    c: T,
    opts: &'a SolveOptions<T>,
    p_u: T,
    h_max: T,
    /// pending grid landings, ascending (popped from the back as p decreases)
    grid: Vec<T>,
    samples: Vec<(T, T)>,
    grazes: usize,
}

enum LegEnd<T> {
    /// Reached the bottom boundary of the segment with this `w`.
    Bottom(T),
    /// Genuine `w = 0` at an interior point.
    Touch(T),
}

impl<'a, T: Real> Engine<'a, T> {
    fn new(spec: &'a ReactionSpec<T>, p_u: T, c: T, opts: &'a SolveOptions<T>) -> Self {
        let mut grid: Vec<T> = opts
            .grid
            .iter()
            .copied()
            .filter(|&g| g > T::zero() && g < p_u)
            .collect();
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        let h_max = if opts.record {
            (opts.max_step_fraction * p_u).max(lit(1e-12))
        } else {
            T::infinity()
        };
        Engine {
            spec,
            c,
            opts,
            p_u,
            h_max,
            grid,
            samples: Vec::new(),
            grazes: 0,
        }
    }

    fn record(&mut self, p: T, w: T) {
        if !self.opts.record && !self.samples.is_empty() {
            return;
        }
        if let Some(&(last_p, _)) = self.samples.last() {
            if p >= last_p {
                return;
            }
        }
        if self.samples.len() < MAX_SAMPLES {
            self.samples.push((p, -w.max(T::zero()).sqrt()));
        }
    }

    fn rhs(poly: &crate::poly::Poly<T>, c: T, p: T, w: T) -> T {
        lit::<T>(2.0) * c * w.max(T::zero()).sqrt() - lit::<T>(2.0) * poly.eval(p)
    }

    /// One Dormand-Prince 5(4) step of (negative) size `h` from `(p, w)`.
    /// Returns `(w5, err)`.
    fn dp_step(poly: &crate::poly::Poly<T>, c: T, p: T, w: T, h: T) -> (T, T) {
        let l = lit::<T>;
        let k1 = Self::rhs(poly, c, p, w);
        let k2 = Self::rhs(poly, c, p + h * l(0.2), w + h * (l(0.2) * k1));
        let k3 = Self::rhs(
            poly,
            c,
            p + h * l(0.3),
            w + h * (l(3.0 / 40.0) * k1 + l(9.0 / 40.0) * k2),
        );
        let k4 = Self::rhs(
            poly,
            c,
            p + h * l(0.8),
            w + h * (l(44.0 / 45.0) * k1 - l(56.0 / 15.0) * k2 + l(32.0 / 9.0) * k3),
        );
        let k5 = Self::rhs(
            poly,
            c,
            p + h * l(8.0 / 9.0),
            w + h
                * (l(19372.0 / 6561.0) * k1 - l(25360.0 / 2187.0) * k2
                    + l(64448.0 / 6561.0) * k3
                    - l(212.0 / 729.0) * k4),
        );
        let k6 = Self::rhs(
            poly,
            c,
            p + h,
            w + h
                * (l(9017.0 / 3168.0) * k1 - l(355.0 / 33.0) * k2 + l(46732.0 / 5247.0) * k3
                    + l(49.0 / 176.0) * k4
                    - l(5103.0 / 18656.0) * k5),
        );
        let w5 = w
            + h * (l(35.0 / 384.0) * k1
                + l(500.0 / 1113.0) * k3
                + l(125.0 / 192.0) * k4
                - l(2187.0 / 6784.0) * k5
                + l(11.0 / 84.0) * k6);
        let k7 = Self::rhs(poly, c, p + h, w5);
        let w4 = w
            + h * (l(5179.0 / 57600.0) * k1
                + l(7571.0 / 16695.0) * k3
                + l(393.0 / 640.0) * k4
                - l(92097.0 / 339200.0) * k5
                + l(187.0 / 2100.0) * k6
                + l(1.0 / 40.0) * k7);
        (w5, (w5 - w4).abs())
    }

    fn run(&mut self) -> Result<Trajectory<T>, TrajectoryError> {
        self.samples.push((self.p_u, T::zero()));

        // Seed just below the singular start.
        let gap_to_boundary = self.p_u
            - self
                .spec
                .segments()
                .iter()
                .find(|(_, hi, _)| *hi == self.p_u)
                .map(|(lo, _, _)| *lo)
                .unwrap_or(T::zero());
        let eps0 = (lit::<T>(1e-6) * self.p_u)
            .max(T::epsilon() * lit::<T>(64.0) * self.p_u)
            .min(gap_to_boundary * lit(0.5));
        let mut p = self.p_u - eps0;
        let mut w = seed_w(self.spec, self.p_u, self.c, eps0);
        self.record(p, w);

        let seg_count = self.spec.segments().len();
        let start_idx = (0..seg_count)
            .find(|&j| self.spec.segments()[j].1 == self.p_u)
            .expect("stable start has a segment below it");

        for idx in (0..=start_idx).rev() {
            let (leg_lo, _, _) = self.spec.segments()[idx];
            match self.integrate_leg(idx, &mut p, &mut w)? {
                LegEnd::Touch(p_hat) => {
                    self.record_tail(idx, p_hat);
                    return self.finish_touch(p_hat);
                }
                LegEnd::Bottom(w_lo) => {
                    w = w_lo;
                    p = leg_lo;
                    let terminal = leg_lo == T::zero() || w <= self.opts.touch_w;
                    if terminal {
                        self.record_tail(idx, leg_lo);
                    }
                    self.record(p, w);
                    if leg_lo == T::zero() {
                        break;
                    }
                    if w <= self.opts.touch_w {
                        // Touching the axis exactly at a steady state ends
                        // the trajectory (first contact).
                        return self.finish_touch(leg_lo);
                    }
                }
            }
        }

        // Reached p = 0.
        let (termination, q) = if w <= self.opts.zero_w {
            (Termination::Degenerate, T::zero())
        } else {
            (Termination::HitQAxis, -w.sqrt())
        };
        self.terminal_sample(T::zero(), q);
        Ok(self.build(T::zero(), q, termination))
    }

    /// Insert samples approaching `p_to` from the last recorded one with
    /// geometrically shrinking offsets, so the table resolves the
    /// square-root landing.
    fn record_tail(&mut self, seg_idx: usize, p_to: T) {
        if !self.opts.record {
            return;
        }
        // the landing sample may already be recorded; keep it last
        let mut landed = Vec::new();
        while let Some(&(p, _)) = self.samples.last() {
            if p <= p_to && self.samples.len() > 1 {
                landed.push(self.samples.pop().unwrap());
            } else {
                break;
            }
        }
        let Some(&(p_from, q_from)) = self.samples.last() else {
            return;
        };
        if p_from <= p_to {
            self.samples.extend(landed.into_iter().rev());
            return;
        }
        let poly = self.spec.segments()[seg_idx].2.clone();
        let w_from = q_from * q_from;
        let floor = self
            .opts
            .tol
            .max(T::epsilon() * lit::<T>(4.0) * self.p_u);
        let mut offsets = Vec::new();
        let mut d = (p_from - p_to) * lit::<T>(0.5);
        while d > floor {
            offsets.push(d);
            d = d * lit(0.5);
        }
        for d in offsets {
            let (w_d, _) = Self::dp_step(&poly, self.c, p_from, w_from, -(p_from - p_to - d));
            self.record(p_to + d, w_d.max(T::zero()));
        }
        for s in landed.into_iter().rev() {
            if self.samples.last().map(|&(p, _)| s.0 < p).unwrap_or(true) {
                self.samples.push(s);
            }
        }
    }

    fn finish_touch(&mut self, p_hat: T) -> Result<Trajectory<T>, TrajectoryError> {
        let (termination, lower) = if p_hat <= T::zero() {
            (Termination::Degenerate, T::zero())
        } else {
            (Termination::HitPAxis, p_hat)
        };
        self.terminal_sample(lower, T::zero());
        Ok(self.build(lower, T::zero(), termination))
    }

    fn terminal_sample(&mut self, p: T, q: T) {
        if let Some(&(last_p, _)) = self.samples.last() {
            if p < last_p {
                self.samples.push((p, q));
            } else if self.samples.len() > 1 {
                *self.samples.last_mut().unwrap() = (p, q);
            }
        }
    }

    fn build(&mut self, lower: T, q: T, termination: Termination) -> Trajectory<T> {
        if !self.opts.record {
            let first = self.samples[0];
            let last = *self.samples.last().unwrap();
            self.samples = vec![first, last];
        }
        Trajectory {
            upper: self.p_u,
            speed: self.c,
            lower,
            q_at_lower: q,
            termination,
            samples: std::mem::take(&mut self.samples),
            tol: self.opts.tol,
        }
    }

    /// Integrate one reaction segment downward from `(*p, *w)` to its bottom.
    fn integrate_leg(
        &mut self,
        seg_idx: usize,
        p: &mut T,
        w: &mut T,
    ) -> Result<LegEnd<T>, TrajectoryError> {
        let (leg_lo, _, ref poly) = self.spec.segments()[seg_idx];
        let poly = poly.clone();
        let tol = self.opts.tol;
        let mut h = (*p - leg_lo).min(self.h_max).min(lit::<T>(1e-3) * self.p_u);

        while *p > leg_lo {
            let h_floor = (T::epsilon() * lit::<T>(8.0) * self.p_u).max(lit(1e-300));
            // Do not step past the leg bottom or a pending grid landing.
            let mut stop = leg_lo;
            while let Some(&g) = self.grid.last() {
                if g >= *p {
                    self.grid.pop();
                    continue;
                }
                break;
            }
            if let Some(&g) = self.grid.last() {
                if g > leg_lo && g < *p {
                    stop = g;
                }
            }
            let mut h_eff = h.min(*p - stop).max(h_floor);
            if self.opts.record {
                // approach the singular start with geometric steps so the
                // sample table resolves the square-root shape
                h_eff = h_eff.min((self.p_u - *p).max(h_floor * lit(4.0)));
            }
            loop {
                let (w_new, err) = Self::dp_step(&poly, self.c, *p, *w, -h_eff);
                let scale = tol * (T::one() + w.abs().max(w_new.abs()));
                if err <= scale || h_eff <= h_floor * lit(4.0) {
                    // accepted
                    let p_new = *p - h_eff;
                    if w_new <= T::zero() {
                        let p_hat = self.localize_event(&poly, *p, *w, h_eff)?;
                        match self.classify_event(seg_idx, p_hat)? {
                            EventOutcome::Terminate => {
                                // a touch within the localization band of the
                                // segment bottom is a touch at that state
                                let touch = if p_hat - leg_lo <= self.near_threshold() {
                                    leg_lo
                                } else {
                                    p_hat
                                };
                                return Ok(LegEnd::Touch(touch));
                            }
                            EventOutcome::Graze => {
                                // restart just below the graze point
                                let f0 = poly.eval(p_hat);
                                let f0p = poly.derivative().eval(p_hat);
                                let eps = ((p_hat - leg_lo) * lit(0.5))
                                    .min(lit::<T>(1e-8) * self.p_u)
                                    .max(h_floor);
                                if p_hat - eps <= leg_lo {
                                    return Ok(LegEnd::Bottom(T::zero()));
                                }
                                *p = p_hat - eps;
                                *w = expansion_w(f0, f0p, self.c, eps).max(T::zero());
                                self.record(*p, *w);
                                h = (lit::<T>(1e-4) * self.p_u).min(*p - leg_lo);
                                break;
                            }
                        }
                    }
                    *p = p_new;
                    *w = w_new;
                    self.record(*p, *w);
                    // PI-free controller: simple growth/shrink on the error ratio.
                    let grow = if err > T::zero() {
                        (scale / err).powf(lit(0.2)) * lit(0.9)
                    } else {
                        lit(5.0)
                    };
                    h = (h_eff * grow.min(lit(5.0)).max(lit(0.2))).min(self.h_max);
                    break;
                }
                let shrink = (scale / err).powf(lit(0.2)) * lit(0.9);
                h_eff = (h_eff * shrink.max(lit(0.1))).max(h_floor);
            }
        }
        Ok(LegEnd::Bottom(*w))
    }

    /// Bisect the step `[p - h, p]` for the `w = 0` crossing.
    fn localize_event(
        &mut self,
        poly: &crate::poly::Poly<T>,
        p: T,
        w: T,
        h: T,
    ) -> Result<T, TrajectoryError> {
        let mut lo = T::zero(); // offset with w > 0
        let mut hi = h; // offset with w <= 0
        let tol_p = self.opts.tol.max(T::epsilon() * lit::<T>(4.0) * self.p_u);
        let mut guard = 0usize;
        while hi - lo > tol_p {
            let mid = lit::<T>(0.5) * (lo + hi);
            let (w_mid, _) = Self::dp_step(poly, self.c, p, w, -mid);
            if w_mid > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            guard += 1;
            if guard > 200 {
                return Err(TrajectoryError::EventLocalizationFailure {
                    lo: as_f64(p - hi),
                    hi: as_f64(p - lo),
                });
            }
        }
        Ok(p - lit::<T>(0.5) * (lo + hi))
    }

    fn near_threshold(&self) -> T {
        (lit::<T>(10.0) * self.opts.tol).max(T::epsilon() * lit::<T>(32.0) * self.p_u)
    }

    fn classify_event(&mut self, seg_idx: usize, p_hat: T) -> Result<EventOutcome, TrajectoryError> {
        let (leg_lo, leg_hi, ref poly) = self.spec.segments()[seg_idx];
        let near = self.near_threshold();
        if p_hat - leg_lo <= near {
            return Ok(EventOutcome::Terminate);
        }
        if leg_hi - p_hat <= near {
            // Touching immediately below the starting state would mean the
            // seed failed; treat as termination at the top, which the caller
            // surfaces as a failed snap.
            return Ok(EventOutcome::Terminate);
        }
        let f_here = poly.eval(p_hat);
        if f_here > T::zero() {
            // The trajectory cannot end where the reaction is positive.
            self.grazes += 1;
            if self.grazes > MAX_GRAZES {
                return Err(TrajectoryError::EventLocalizationFailure {
                    lo: as_f64(leg_lo),
                    hi: as_f64(p_hat),
                });
            }
            return Ok(EventOutcome::Graze);
        }
        Ok(EventOutcome::Terminate)
    }
}

enum EventOutcome {
    Terminate,
    Graze,
}

impl<T: Real> Trajectory<T> {
    /// Replace the terminal point by the certified platform it connects to
    /// (the localized event sits within the snap tolerance of it).
    pub fn snap_lower(&mut self, platform: T) {
        self.lower = platform;
        self.q_at_lower = T::zero();
        while let Some(&(p, _)) = self.samples.last() {
            if p <= platform && self.samples.len() > 1 {
                self.samples.pop();
            } else {
                break;
            }
        }
        self.samples.push((platform, T::zero()));
        self.termination = if platform > T::zero() {
            Termination::HitPAxis
        } else {
            Termination::Degenerate
        };
    }

    /// `q` at a sampled `p` if the stepper landed there exactly.
    pub fn q_at_sample(&self, p: T) -> Option<T> {
        self.samples
            .iter()
            .find(|(sp, _)| (*sp - p).abs() <= T::epsilon() * lit::<T>(8.0))
            .map(|&(_, q)| q)
    }

    /// Residual of the integral identity
    /// `w(p)/2 = c * int_p^{p_u} q ds + int_p^{p_u} f ds`
    /// checked with trapezoidal quadrature for the `q` integral and exact
    /// piecewise integration for `f`. Returns the maximum over samples.
    pub fn energy_residual_trapezoid(&self, spec: &ReactionSpec<T>) -> T {
        let half = lit::<T>(0.5);
        let mut worst = T::zero();
        let mut int_q = T::zero();
        let mut prev: Option<(T, T)> = None;
        for &(p, q) in &self.samples {
            if let Some((p0, q0)) = prev {
                int_q = int_q + half * (q0 + q) * (p0 - p);
            }
            prev = Some((p, q));
            let int_f = spec.integral(p, self.upper);
            let res = (half * q * q - self.speed * int_q - int_f).abs();
            worst = worst.max(res);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q_closed_a(p: f64) -> f64 {
        -2.0 * (p * (1.0 - p)).max(0.0).sqrt()
    }

    #[test]
    fn seed_matches_quadrature() {
        let spec = fixtures::example_a::<f64>();
        // leading order at tiny eps
        let (p, q) = seed_asymptotic(&spec, 1.0, 0.0, 1e-6).unwrap();
        assert_eq!(p, 1.0 - 1e-6);
        let expected = -(2.0 * 2.0 * 1e-6 - 4.0 * 1e-12f64).sqrt();
        assert!((q - expected).abs() < 1e-12);
        assert!((q + 2.0e-3).abs() < 5e-9);
        // exact for c = 0 on the linear segment
        let (_, q) = seed_asymptotic(&spec, 1.0, 0.0, 0.25).unwrap();
        assert!((q + 0.75f64.sqrt()).abs() < 1e-15);
        // identity start
        let (p, q) = seed_asymptotic(&spec, 1.0, 3.0, 0.0).unwrap();
        assert_eq!((p, q), (1.0, 0.0));
    }

    #[test]
    fn seed_rejects_bad_input() {
        let spec = fixtures::example_b::<f64>();
        assert_eq!(
            seed_asymptotic(&spec, 0.75, 0.0, 1e-6).unwrap_err(),
            TrajectoryError::NotStable(0.75)
        );
        // the bottom state has nothing to descend into
        assert_eq!(
            solve_trajectory(&spec, 0.0, 0.0, 1e-8).unwrap_err(),
            TrajectoryError::NotStable(0.0)
        );
        assert_eq!(
            seed_asymptotic(&spec, 1.0, 0.0, 0.3).unwrap_err(),
            TrajectoryError::EpsilonTooLarge(0.3)
        );
    }

    #[test]
    fn example_a_stationary_front_matches_closed_form() {
        let spec = fixtures::example_a::<f64>();
        let mut opts = SolveOptions::default_for(1e-10);
        opts.grid = vec![0.5];
        let t = solve_with(&spec, 1.0, 0.0, &opts).unwrap();
        assert_eq!(t.termination, Termination::Degenerate);
        assert!(t.lower.abs() <= 1e-8);
        let q_half = t.q_at_sample(0.5).expect("landed on p = 1/2");
        assert!((q_half + 1.0).abs() < 1e-8, "q(1/2) = {q_half}");
        for &(p, q) in &t.samples {
            assert!((q - q_closed_a(p)).abs() < 1e-7, "mismatch at p = {p}");
        }
    }

    #[test]
    fn example_a_negative_speed_hits_q_axis() {
        let spec = fixtures::example_a::<f64>();
        let t = solve_trajectory(&spec, 1.0, -1.0, 1e-10).unwrap();
        assert_eq!(t.termination, Termination::HitQAxis);
        assert_eq!(t.lower, 0.0);
        assert!(t.q_at_lower < 0.0);
        // independent oracle: fixed-step RK4 on the (p, q)(x) system
        let oracle = crate::reference::oracle_rk4(&spec, 1.0, -1.0, 1e-5);
        assert!(oracle.q_at_zero.is_some());
        assert!((t.q_at_lower - oracle.q_at_zero.unwrap()).abs() < 1e-5);
    }

    #[test]
    fn example_a_positive_speed_hits_p_axis() {
        let spec = fixtures::example_a::<f64>();
        let t = solve_trajectory(&spec, 1.0, 1.0, 1e-10).unwrap();
        assert_eq!(t.termination, Termination::HitPAxis);
        assert!(t.lower > 0.0 && t.lower < 0.5);
        assert_eq!(t.q_at_lower, 0.0);
        let oracle = crate::reference::oracle_rk4(&spec, 1.0, 1.0, 1e-5);
        assert!((t.lower - oracle.p_final).abs() < 2e-4);
    }

    #[test]
    fn large_speed_terminates_at_the_unstable_state() {
        let spec = fixtures::example_a::<f64>();
        let (p_l, q, term) = solve_terminal(&spec, 1.0, 10.0, 1e-10).unwrap();
        assert_eq!(term, Termination::HitPAxis);
        assert!((p_l - 0.5).abs() < 1e-8);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn example_b_lower_half_is_rescaled_example_a() {
        let spec = fixtures::example_b::<f64>();
        let t = solve_trajectory(&spec, 0.5, 0.0, 1e-10).unwrap();
        assert_eq!(t.termination, Termination::Degenerate);
        for &(p, q) in &t.samples {
            let w = 16.0 * (1.0 / 16.0 - (p - 0.25) * (p - 0.25));
            let expected = -w.max(0.0).sqrt();
            assert!((q - expected).abs() < 1e-7, "mismatch at p = {p}");
        }
    }

    #[test]
    fn example_b_from_top_at_zero_speed_stops_at_the_middle_platform() {
        let spec = fixtures::example_b::<f64>();
        let t = solve_trajectory(&spec, 1.0, 0.0, 1e-10).unwrap();
        assert_eq!(t.termination, Termination::HitPAxis);
        assert!((t.lower - 0.5).abs() < 1e-8);
    }

    #[test]
    fn energy_identity_on_dense_samples() {
        let spec = fixtures::example_a::<f64>();
        for c in [0.0, 0.7, -0.6] {
            let mut opts = SolveOptions::default_for(1e-9);
            opts.max_step_fraction = 1e-5;
            let t = solve_with(&spec, 1.0, c, &opts).unwrap();
            let res = t.energy_residual_trapezoid(&spec);
            assert!(res <= 1e-8, "energy residual {res} at c = {c}");
        }
    }

    #[test]
    fn energy_identity_at_default_density() {
        let spec = fixtures::example_c::<f64>();
        for c in [0.0, -0.4, 0.3] {
            let t = solve_trajectory(&spec, 1.0, c, 1e-10).unwrap();
            let res = t.energy_residual_trapezoid(&spec);
            assert!(res <= 1e-5, "energy residual {res} at c = {c}");
        }
    }

    #[test]
    fn monotone_in_speed_on_shared_grid() {
        let spec = fixtures::example_a::<f64>();
        let grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let tol = 1e-10;
        let pairs = [(-0.5, 0.0), (0.0, 0.5), (0.3, 1.2), (-2.0, -1.0)];
        for (c2, c1) in pairs {
            let mut o = SolveOptions::default_for(tol);
            o.grid = grid.clone();
            let t1 = solve_with(&spec, 1.0, c1, &o).unwrap();
            let t2 = solve_with(&spec, 1.0, c2, &o).unwrap();
            assert!(t2.lower <= t1.lower + 1e-8);
            for &g in &grid {
                if let (Some(q1), Some(q2)) = (t1.q_at_sample(g), t2.q_at_sample(g)) {
                    assert!(q2 <= q1 + 1e-8, "q ordering broken at p = {g}");
                }
            }
        }
    }

    #[test]
    fn cubic_segments_match_exact_quadrature() {
        // f = 4u + 4u^3 with u = p - 1/2: at c = 0,
        // w(p) = 2 int_p^1 f = 2 (9/16 - 2u^2 - u^4)
        let spec = fixtures::example_cubic::<f64>();
        assert!((spec.sup_norm() - 2.5).abs() < 1e-9);
        let mut opts = SolveOptions::default_for(1e-10);
        opts.grid = vec![0.25, 0.5, 0.75];
        let t = solve_with(&spec, 1.0, 0.0, &opts).unwrap();
        assert_eq!(t.termination, Termination::Degenerate);
        let w_exact = |p: f64| {
            let u = p - 0.5;
            2.0 * ((2.0 * 0.25 + 0.0625) - (2.0 * u * u + u.powi(4)))
        };
        for g in [0.25, 0.5, 0.75] {
            let q = t.q_at_sample(g).unwrap();
            assert!(
                (q + w_exact(g).sqrt()).abs() < 1e-8,
                "q({g}) = {q} vs {}",
                -w_exact(g).sqrt()
            );
        }
    }

    #[test]
    fn never_terminates_where_the_reaction_is_positive() {
        for spec in [fixtures::example_b::<f64>(), fixtures::example_c::<f64>()] {
            for k in 0..24 {
                let c = -1.5 + 4.0 * k as f64 / 24.0;
                let (p_l, _, term) = solve_terminal(&spec, 1.0, c, 1e-10).unwrap();
                if term == Termination::HitPAxis {
                    // either a steady state (within localization) or f <= 0
                    let near_state = spec
                        .steady_states()
                        .iter()
                        .any(|s| (s.value - p_l).abs() <= 1e-8);
                    let f_here = spec.eval_pde(p_l);
                    assert!(
                        near_state || f_here <= 1e-12,
                        "terminated at p_l = {p_l} where f = {f_here} (c = {c})"
                    );
                }
            }
        }
    }

    #[test]
    fn f32_solve_works_at_loose_tolerance() {
        let spec = fixtures::example_a::<f32>();
        let t = solve_trajectory(&spec, 1.0f32, 0.0, 1e-5).unwrap();
        assert!(t.lower.abs() < 1e-2);
        let q_mid = t
            .samples
            .iter()
            .min_by(|a, b| {
                (a.0 - 0.5).abs().partial_cmp(&(b.0 - 0.5).abs()).unwrap()
            })
            .unwrap()
            .1;
        assert!((q_mid + 1.0).abs() < 1e-2);
    }
}
