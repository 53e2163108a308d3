//! Independent finite-difference oracle for `u_t = u_xx + f(u)`.
//!
//! Forward Euler in time, centered second difference in space. The reaction
//! is evaluated pointwise with `f = 0` exactly at stable steady-state values,
//! the unique convention that keeps constants steady; overshoots outside
//! `[0, 1]` use the extension segments.
//!
//! Two consequences of the compact-front structure are exploited for speed,
//! without changing the scheme where the solution varies:
//!
//! * grid cells that sit exactly on a plateau with plateau neighbors have a
//!   zero update, so time stepping only visits a window around each front;
//! * a cell whose whole neighborhood lies within the explicit-Euler chatter
//!   band `O(|f| dt)` of a stable state is landed exactly on it. The
//!   continuum solution reaches the state in finite time; without the
//!   landing, cells behind a front zigzag around the plateau by `+-|f| dt`
//!   forever and the active window never closes.
//!
//! Updates are sequential left-to-right, so results are bitwise reproducible.

use crate::interp::Pchip;
use crate::profile::TerraceFunction;
use crate::reaction::ReactionSpec;
use crate::real::{as_f64, lit, Real};

#[derive(Debug, Clone)]
pub enum InitialCondition<T> {
    Step { location: T, upper: T, lower: T },
    TerraceSnapshot(TerraceFunction<T>),
    Table(Vec<(T, T)>),
}

#[derive(Debug, Clone, Copy)]
pub enum Boundary<T> {
    /// Dirichlet values copied from the initial condition's endpoints.
    FromInitialCondition,
    Dirichlet { left: T, right: T },
}

#[derive(Debug, Clone)]
pub struct PdeConfig<T> {
    pub x_min: T,
    pub x_max: T,
    pub dx: T,
    /// Defaults to `cfl_safety * dx^2 / 2`, then shrunk so `t_final` is an
    /// exact multiple.
    pub dt: Option<T>,
    pub t_final: T,
    pub cfl_safety: T,
    pub ic: InitialCondition<T>,
    pub boundary: Boundary<T>,
    /// Cadence at which full grids are kept (also the front-track cadence).
    pub snapshot_dt: T,
    pub track_levels: Vec<T>,
}

impl<T: Real> PdeConfig<T> {
    pub fn new(x_min: T, x_max: T, dx: T, t_final: T, ic: InitialCondition<T>) -> Self {
        PdeConfig {
            x_min,
            x_max,
            dx,
            dt: None,
            t_final,
            cfl_safety: lit(0.4),
            ic,
            boundary: Boundary::FromInitialCondition,
            snapshot_dt: t_final / lit(40.0),
            track_levels: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PdeResult<T> {
    pub x: Vec<T>,
    pub times: Vec<T>,
    pub snapshots: Vec<Vec<T>>,
    /// `(level, series of (t, x_level))` for each tracked level that crossed
    /// uniquely at that time.
    pub front_tracks: Vec<(T, Vec<(T, T)>)>,
    pub dx: T,
    pub dt: T,
    from_terrace: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PdeError {
    #[error("StabilityViolation: {0}")]
    StabilityViolation(String),
    #[error("BlowUp: |u| reached {0}")]
    BlowUp(f64),
    #[error("DomainTooNarrow: the active region reached the boundary at x = {0}")]
    DomainTooNarrow(f64),
    #[error("LevelNotCrossed({0})")]
    LevelNotCrossed(f64),
    #[error("MultipleCrossings({0})")]
    MultipleCrossings(f64),
    #[error("GridMismatch: result was not produced from a terrace snapshot")]
    GridMismatch,
}

/// Reaction flattened for the inner loop: exact zero at steady values,
/// Horner on the covering segment otherwise. Piece `k` covers
/// `[bounds[k], bounds[k+1])` with `bounds[0] = -inf`; the interior bounds
/// are exactly the steady-state values, which is where the `f = 0`
/// convention applies. Linear segments (the common case) take a coefficient
/// fast path. The piece index is carried by the sweep, since consecutive
/// cells almost always share a piece.
struct FlatReaction<T> {
    bounds: Vec<T>,
    polys: Vec<Vec<T>>,
    /// `Some((a, b))` with `f = a[k] + b[k] u` when every piece is linear
    linear: Option<(Vec<T>, Vec<T>)>,
}

impl<T: Real> FlatReaction<T> {
    fn new(spec: &ReactionSpec<T>) -> Self {
        let mut bounds = vec![T::neg_infinity(), T::zero()];
        let mut polys = vec![spec.extension_below().coeffs().to_vec()];
        for (lo, _, p) in spec.segments() {
            debug_assert_eq!(*bounds.last().unwrap(), *lo);
            bounds.push(spec_hi(spec, *lo));
            polys.push(p.coeffs().to_vec());
        }
        polys.push(spec.extension_above().coeffs().to_vec());
        bounds.push(T::infinity());
        let linear = if polys.iter().all(|c| c.len() <= 2) {
            let a = polys.iter().map(|c| c[0]).collect();
            let b = polys
                .iter()
                .map(|c| c.get(1).copied().unwrap_or(T::zero()))
                .collect();
            Some((a, b))
        } else {
            None
        };
        FlatReaction {
            bounds,
            polys,
            linear,
        }
    }

    /// Piece index for `u`, starting the search at `idx`.
    #[inline(always)]
    fn locate(&self, u: T, mut idx: usize) -> usize {
        while u < self.bounds[idx] {
            idx -= 1;
        }
        while u >= self.bounds[idx + 1] {
            idx += 1;
        }
        idx
    }

    #[inline(always)]
    fn eval_cached(&self, u: T, cache: &mut usize) -> T {
        let idx = self.locate(u, *cache);
        *cache = idx;
        if u == self.bounds[idx] {
            return T::zero();
        }
        let coeffs = &self.polys[idx];
        let mut acc = coeffs[coeffs.len() - 1];
        for j in (0..coeffs.len() - 1).rev() {
            acc = acc * u + coeffs[j];
        }
        acc
    }

    #[inline]
    fn eval(&self, u: T) -> T {
        let mut cache = self.polys.len() / 2;
        self.eval_cached(u, &mut cache)
    }
}

fn spec_hi<T: Real>(spec: &ReactionSpec<T>, lo: T) -> T {
    spec.segments()
        .iter()
        .find(|(l, _, _)| *l == lo)
        .map(|(_, hi, _)| *hi)
        .unwrap()
}

pub fn simulate<T: Real>(
    spec: &ReactionSpec<T>,
    config: &PdeConfig<T>,
) -> Result<PdeResult<T>, PdeError> {
    let two = lit::<T>(2.0);
    if config.dx <= T::zero() || config.t_final < T::zero() {
        return Err(PdeError::StabilityViolation(
            "dx and t_final must be positive".into(),
        ));
    }
    if config.cfl_safety <= T::zero() || config.cfl_safety > T::one() {
        return Err(PdeError::StabilityViolation(
            "cfl_safety must lie in (0, 1]".into(),
        ));
    }
    let dx = config.dx;
    let dt_stable = config.cfl_safety * dx * dx / two;
    let dt_req = config.dt.unwrap_or(dt_stable);
    if dt_req > dt_stable * (T::one() + lit(1e-12)) {
        return Err(PdeError::StabilityViolation(format!(
            "dt = {} exceeds the explicit limit {}",
            as_f64(dt_req),
            as_f64(dt_stable)
        )));
    }
    let n_steps = if config.t_final == T::zero() {
        0usize
    } else {
        (config.t_final / dt_req).ceil().to_usize().unwrap_or(0).max(1)
    };
    let dt = if n_steps == 0 {
        dt_req
    } else {
        config.t_final / T::from_usize(n_steps).unwrap()
    };

    let n = ((config.x_max - config.x_min) / dx).round().to_usize().unwrap_or(0) + 1;
    if n < 8 {
        return Err(PdeError::StabilityViolation("grid too small".into()));
    }
    let x: Vec<T> = (0..n)
        .map(|i| config.x_min + dx * T::from_usize(i).unwrap())
        .collect();

    let mut u: Vec<T> = match &config.ic {
        InitialCondition::Step {
            location,
            upper,
            lower,
        } => x
            .iter()
            .map(|&xi| if xi < *location { *upper } else { *lower })
            .collect(),
        InitialCondition::TerraceSnapshot(tf) => x.iter().map(|&xi| tf.eval(T::zero(), xi)).collect(),
        InitialCondition::Table(rows) => {
            let mut rows = rows.clone();
            rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            rows.dedup_by(|a, b| a.0 == b.0);
            if rows.len() < 2 {
                return Err(PdeError::StabilityViolation(
                    "table initial condition needs two distinct abscissae".into(),
                ));
            }
            let interp = Pchip::new(
                rows.iter().map(|r| r.0).collect(),
                rows.iter().map(|r| r.1).collect(),
            );
            x.iter().map(|&xi| interp.eval(xi)).collect()
        }
    };
    let (left_bc, right_bc) = match config.boundary {
        Boundary::FromInitialCondition => (u[0], u[n - 1]),
        Boundary::Dirichlet { left, right } => (left, right),
    };
    u[0] = left_bc;
    u[n - 1] = right_bc;

    let flat = FlatReaction::new(spec);
    let stable: Vec<T> = {
        let (s, _) = spec.classify_states();
        s
    };
    // Chatter band of the explicit scheme around a stable state: per step
    // the reaction moves a near-plateau value by at most `jump * dt`, and the
    // landing pass runs every `snap_every` steps.
    let snap_every = 16usize;
    let jump = spec
        .steady_states()
        .iter()
        .map(|s| s.f_left.abs().max(s.f_right.abs()))
        .fold(T::zero(), T::max);
    let snap_band = jump * dt * T::from_usize(2 * snap_every + 4).unwrap();
    // per reaction piece, the adjacent stable value (if any) a cell can land on
    let piece_stable: Vec<T> = (0..flat.polys.len())
        .map(|k| {
            let lo = flat.bounds[k];
            let hi = flat.bounds[k + 1];
            if stable.contains(&lo) {
                lo
            } else if stable.contains(&hi) {
                hi
            } else {
                T::nan()
            }
        })
        .collect();

    let r = dt / (dx * dx);
    let from_terrace = matches!(config.ic, InitialCondition::TerraceSnapshot(_));

    let asleep = |u: &[T], i: usize| -> bool {
        u[i - 1] == u[i] && u[i] == u[i + 1] && flat.eval(u[i]) == T::zero()
    };

    // initial active intervals (indices into 1..n-1)
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    {
        let mut run_start: Option<usize> = None;
        for i in 1..n - 1 {
            if !asleep(&u, i) {
                if run_start.is_none() {
                    run_start = Some(i);
                }
            } else if let Some(s) = run_start.take() {
                intervals.push((s, i - 1));
            }
        }
        if let Some(s) = run_start {
            intervals.push((s, n - 2));
        }
        merge_intervals(&mut intervals);
        if intervals.is_empty() {
            intervals.push((n / 2, n / 2));
        }
    }
    // Initial data may legitimately vary right up to the Dirichlet boundary
    // (a table over the whole domain); only activity that develops toward a
    // boundary during the run indicates a too-narrow domain.
    let allow_left_contact = intervals.first().map(|iv| iv.0 <= 2).unwrap_or(false);
    let allow_right_contact = intervals.last().map(|iv| iv.1 >= n - 3).unwrap_or(false);

    let split_every = 256usize;
    let check_every = 1024usize;

    let snapshot_each = if n_steps == 0 {
        1
    } else {
        ((config.snapshot_dt / dt).round().to_usize().unwrap_or(1)).max(1)
    };

    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    let mut tracks: Vec<(T, Vec<(T, T)>)> =
        config.track_levels.iter().map(|&l| (l, Vec::new())).collect();

    let record = |step: usize, u: &[T], times: &mut Vec<T>, snaps: &mut Vec<Vec<T>>, tracks: &mut Vec<(T, Vec<(T, T)>)>| {
        let t = dt * T::from_usize(step).unwrap();
        times.push(t);
        snaps.push(u.to_vec());
        for (level, series) in tracks.iter_mut() {
            if let Ok(pos) = crossing_position(&x, u, *level) {
                series.push((t, pos));
            }
        }
    };
    record(0, &u, &mut times, &mut snapshots, &mut tracks);

    let mut seg_cache = flat.polys.len() / 2;
    for step in 1..=n_steps {
        // advance every active interval, padded by one cell
        for k in 0..intervals.len() {
            let (lo, hi) = intervals[k];
            let lo_pad = lo.saturating_sub(1).max(1);
            let hi_pad = (hi + 1).min(n - 2);
            let before_lo = u[lo_pad];
            let before_hi = u[hi_pad];
            let mut left = u[lo_pad - 1];
            let row = &mut u[lo_pad..=hi_pad + 1];
            let m = row.len() - 1;
            let mut cur = row[0];
            if let Some((ca, cb)) = &flat.linear {
                // fused sweep with the piece coefficients held in registers;
                // this loop carries the whole simulation budget
                let mut idx = seg_cache;
                let mut blo = flat.bounds[idx];
                let mut bhi = flat.bounds[idx + 1];
                let mut fa = ca[idx];
                let mut fb = cb[idx];
                // SAFETY: `row` has m + 1 elements; reads touch row[i + 1]
                // and writes row[i] for i < m.
                unsafe {
                    let p = row.as_mut_ptr();
                    for i in 0..m {
                        let right = *p.add(i + 1);
                        if cur < blo || cur >= bhi {
                            idx = flat.locate(cur, idx);
                            blo = flat.bounds[idx];
                            bhi = flat.bounds[idx + 1];
                            fa = ca[idx];
                            fb = cb[idx];
                        }
                        let fv = if cur == blo { T::zero() } else { fa + fb * cur };
                        let new = cur + r * (left - two * cur + right) + dt * fv;
                        left = cur;
                        cur = right;
                        *p.add(i) = new;
                    }
                }
                seg_cache = idx;
            } else {
                for i in 0..m {
                    let right = row[i + 1];
                    let new = cur + r * (left - two * cur + right)
                        + dt * flat.eval_cached(cur, &mut seg_cache);
                    left = cur;
                    cur = right;
                    row[i] = new;
                }
            }
            let mut lo_new = lo_pad;
            let mut hi_new = hi_pad;
            if u[lo_pad] != before_lo && lo_pad == 1 && !allow_left_contact {
                return Err(PdeError::DomainTooNarrow(as_f64(x[0])));
            }
            if u[hi_pad] != before_hi && hi_pad == n - 2 && !allow_right_contact {
                return Err(PdeError::DomainTooNarrow(as_f64(x[n - 1])));
            }
            if u[lo_pad] == before_lo && lo_new < hi_new {
                lo_new += 1;
            }
            if u[hi_pad] == before_hi && lo_new < hi_new {
                hi_new -= 1;
            }
            intervals[k] = (lo_new, hi_new);
        }
        merge_intervals(&mut intervals);

        if step % snap_every == 0 {
            let mut cursor = seg_cache;
            for &(lo, hi) in &intervals {
                for i in lo..=hi {
                    let v = u[i];
                    cursor = flat.locate(v, cursor);
                    let s = piece_stable[cursor];
                    if (v - s).abs() <= snap_band
                        && v != s
                        && (u[i - 1] - s).abs() <= snap_band
                        && (u[i + 1] - s).abs() <= snap_band
                    {
                        u[i] = s;
                    }
                }
            }
        }

        if step % split_every == 0 {
            let mut rebuilt: Vec<(usize, usize)> = Vec::new();
            for &(lo, hi) in &intervals {
                let mut run_start: Option<usize> = None;
                let mut last_awake: Option<usize> = None;
                for i in lo..=hi {
                    if !asleep(&u, i) {
                        if run_start.is_none() {
                            run_start = Some(i);
                        }
                        last_awake = Some(i);
                    } else if let (Some(s), Some(la)) = (run_start, last_awake) {
                        if i - la >= 16 {
                            rebuilt.push((s, la));
                            run_start = None;
                            last_awake = None;
                        }
                    }
                }
                if let (Some(s), Some(la)) = (run_start, last_awake) {
                    rebuilt.push((s, la));
                }
            }
            if !rebuilt.is_empty() {
                intervals = rebuilt;
                merge_intervals(&mut intervals);
            }
        }

        if step % check_every == 0 {
            if std::env::var_os("TERRACE_PDE_TRACE").is_some() && step % 65536 == 0 {
                let active: usize = intervals.iter().map(|&(a, b)| b - a + 1).sum();
                eprintln!("step {step}: {} intervals, {active} active cells", intervals.len());
            }
            for &(lo, hi) in &intervals {
                for i in lo..=hi {
                    if !(u[i].abs() <= lit(10.0)) {
                        return Err(PdeError::BlowUp(as_f64(u[i])));
                    }
                }
            }
        }

        if step % snapshot_each == 0 || step == n_steps {
            record(step, &u, &mut times, &mut snapshots, &mut tracks);
        }
    }

    Ok(PdeResult {
        x,
        times,
        snapshots,
        front_tracks: tracks,
        dx,
        dt,
        from_terrace,
    })
}

fn merge_intervals(intervals: &mut Vec<(usize, usize)>) {
    intervals.sort_unstable_by_key(|iv| iv.0);
    let mut kept = 0usize;
    for k in 0..intervals.len() {
        let (lo, hi) = intervals[k];
        if kept > 0 && lo <= intervals[kept - 1].1 + 3 {
            intervals[kept - 1].1 = intervals[kept - 1].1.max(hi);
        } else {
            intervals[kept] = (lo, hi);
            kept += 1;
        }
    }
    intervals.truncate(kept);
}

/// Unique level-crossing position by linear interpolation between grid nodes.
fn crossing_position<T: Real>(x: &[T], u: &[T], level: T) -> Result<T, PdeError> {
    let mut found: Option<T> = None;
    for i in 0..u.len() - 1 {
        let a = u[i] - level;
        let b = u[i + 1] - level;
        if a == T::zero() && b == T::zero() {
            continue;
        }
        if (a <= T::zero() && b > T::zero()) || (a >= T::zero() && b < T::zero()) || a == T::zero() {
            if a == T::zero() && u[i.saturating_sub(1)] == u[i] {
                continue;
            }
            let t = a / (a - b);
            let pos = x[i] + (x[i + 1] - x[i]) * t;
            if let Some(prev) = found {
                if (pos - prev).abs() > x[1] - x[0] {
                    return Err(PdeError::MultipleCrossings(as_f64(level)));
                }
            } else {
                found = Some(pos);
            }
        }
    }
    found.ok_or(PdeError::LevelNotCrossed(as_f64(level)))
}

/// Least-squares front speed of a level crossing over a time window.
pub fn measure_front_speed<T: Real>(
    result: &PdeResult<T>,
    level: T,
    window: (T, T),
) -> Result<(T, T), PdeError> {
    let mut ts: Vec<T> = Vec::new();
    let mut xs: Vec<T> = Vec::new();
    for (k, &t) in result.times.iter().enumerate() {
        if t < window.0 || t > window.1 {
            continue;
        }
        let pos = crossing_position(&result.x, &result.snapshots[k], level)?;
        ts.push(t);
        xs.push(pos);
    }
    if ts.len() < 2 {
        return Err(PdeError::LevelNotCrossed(as_f64(level)));
    }
    let n = T::from_usize(ts.len()).unwrap();
    let mean_t = ts.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mean_x = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&t, &xv) in ts.iter().zip(&xs) {
        sxx = sxx + (t - mean_t) * (t - mean_t);
        sxy = sxy + (t - mean_t) * (xv - mean_x);
    }
    let slope = sxy / sxx;
    let mut ss_res = T::zero();
    let mut ss_tot = T::zero();
    for (&t, &xv) in ts.iter().zip(&xs) {
        let fit = mean_x + slope * (t - mean_t);
        ss_res = ss_res + (xv - fit) * (xv - fit);
        ss_tot = ss_tot + (xv - mean_x) * (xv - mean_x);
    }
    let r2 = if ss_tot <= T::epsilon() {
        T::one()
    } else {
        T::one() - ss_res / ss_tot
    };
    Ok((slope, r2))
}

/// Max over snapshots of `sup_x |u(t, x) - Phi(t, x)|`. The result must have
/// been produced from a terrace-snapshot initial condition.
pub fn residual_vs_terrace<T: Real>(
    result: &PdeResult<T>,
    tf: &TerraceFunction<T>,
) -> Result<T, PdeError> {
    if !result.from_terrace {
        return Err(PdeError::GridMismatch);
    }
    let mut worst = T::zero();
    for (k, &t) in result.times.iter().enumerate() {
        for (i, &xi) in result.x.iter().enumerate() {
            let diff = (result.snapshots[k][i] - tf.eval(t, xi)).abs();
            worst = worst.max(diff);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn constants_at_stable_states_stay_exact() {
        let spec = fixtures::example_b::<f64>();
        let config = PdeConfig::new(
            -1.0,
            1.0,
            0.01,
            0.5,
            InitialCondition::Table(vec![(-1.0, 0.5), (1.0, 0.5)]),
        );
        let res = simulate(&spec, &config).unwrap();
        for grid in &res.snapshots {
            assert!(grid.iter().all(|&v| v == 0.5));
        }
    }

    #[test]
    fn stability_violation_is_rejected() {
        let spec = fixtures::example_a::<f64>();
        let mut config = PdeConfig::new(
            -1.0,
            1.0,
            0.01,
            0.1,
            InitialCondition::Step {
                location: 0.0,
                upper: 1.0,
                lower: 0.0,
            },
        );
        config.dt = Some(1e-3); // far above dx^2/2 = 5e-5
        assert!(matches!(
            simulate(&spec, &config).unwrap_err(),
            PdeError::StabilityViolation(_)
        ));
    }

    #[test]
    fn stationary_profile_is_preserved_to_discretization_error() {
        let spec = fixtures::example_a::<f64>();
        let terr = crate::terrace::build_terrace(&spec, &crate::Tolerances::default()).unwrap();
        let tf = TerraceFunction::from_terrace(&spec, &terr, 1.0, 2001).unwrap();
        let config = PdeConfig::new(
            -5.0,
            7.0,
            2e-3,
            1.0,
            InitialCondition::TerraceSnapshot(tf.clone()),
        );
        let res = simulate(&spec, &config).unwrap();
        let last = res.snapshots.last().unwrap();
        let mut sup: f64 = 0.0;
        for (i, &xi) in res.x.iter().enumerate() {
            sup = sup.max((last[i] - tf.eval(0.0, xi)).abs());
        }
        assert!(sup <= 5e-3, "sup deviation {sup}");
    }

    #[test]
    fn cubic_reaction_takes_the_general_path_and_stays_invariant() {
        // cubic segments disable the linear fast path; the stationary front
        // must still be preserved to discretization error
        let spec = fixtures::example_cubic::<f64>();
        let terr = crate::terrace::build_terrace(&spec, &crate::Tolerances::default()).unwrap();
        assert_eq!(terr.fronts.len(), 1);
        assert!(terr.speeds()[0].abs() <= 1e-8);
        let tf = TerraceFunction::from_terrace(&spec, &terr, 1.0, 1001).unwrap();
        let config = PdeConfig::new(
            -4.0,
            6.0,
            4e-3,
            0.5,
            InitialCondition::TerraceSnapshot(tf.clone()),
        );
        let res = simulate(&spec, &config).unwrap();
        let r = residual_vs_terrace(&res, &tf).unwrap();
        assert!(r <= 5e-3, "residual {r}");
    }

    #[test]
    fn step_data_relax_to_the_compact_front() {
        // long run: the step settles into the stationary front; compare the
        // terminal shape against the closed form after aligning the
        // half-level crossings, and measure the (zero) speed
        let spec = fixtures::example_a::<f64>();
        let mut config = PdeConfig::new(
            -8.0,
            8.0,
            5e-3,
            20.0,
            InitialCondition::Step {
                location: 0.0,
                upper: 1.0,
                lower: 0.0,
            },
        );
        config.cfl_safety = 0.9;
        config.snapshot_dt = 0.5;
        let res = simulate(&spec, &config).unwrap();
        let (speed, _r2) = measure_front_speed(&res, 0.5, (10.0, 20.0)).unwrap();
        assert!(speed.abs() <= 5e-3, "measured speed {speed}");

        let closed = |z: f64| -> f64 {
            if z <= 0.0 {
                1.0
            } else if z >= std::f64::consts::FRAC_PI_2 {
                0.0
            } else {
                0.5 + 0.5 * (2.0 * z).cos()
            }
        };
        let last = res.snapshots.last().unwrap();
        let x_half = crossing_position(&res.x, last, 0.5).unwrap();
        // closed form passes 1/2 at z = pi/4
        let offset = x_half - std::f64::consts::FRAC_PI_4;
        let mut sup: f64 = 0.0;
        for (i, &xi) in res.x.iter().enumerate() {
            sup = sup.max((last[i] - closed(xi - offset)).abs());
        }
        assert!(sup <= 1e-2, "terminal shape deviation {sup}");
    }

    #[test]
    fn grid_values_obey_the_maximum_principle_band() {
        let spec = fixtures::example_a::<f64>();
        let config = PdeConfig::new(
            -8.0,
            8.0,
            5e-3,
            1.0,
            InitialCondition::Step {
                location: 0.0,
                upper: 1.0,
                lower: 0.0,
            },
        );
        let res = simulate(&spec, &config).unwrap();
        let delta = 10.0 * res.dx;
        for grid in &res.snapshots {
            for &v in grid {
                assert!(v >= -delta && v <= 1.0 + delta);
            }
        }
    }

    #[test]
    fn ordered_initial_data_stay_ordered() {
        let spec = fixtures::example_c::<f64>();
        let mk = |loc: f64| {
            PdeConfig::new(
                -8.0,
                8.0,
                5e-3,
                1.0,
                InitialCondition::Step {
                    location: loc,
                    upper: 1.0,
                    lower: 0.0,
                },
            )
        };
        let lo = simulate(&spec, &mk(-0.5)).unwrap();
        let hi = simulate(&spec, &mk(0.5)).unwrap();
        let slack = 10.0 * lo.dx;
        for (gl, gh) in lo.snapshots.iter().zip(&hi.snapshots) {
            for (a, b) in gl.iter().zip(gh) {
                assert!(a <= &(b + slack));
            }
        }
    }

    #[test]
    fn finite_time_arrival_of_a_moving_front() {
        // Unbalanced bistable: the front travels right and plateau values are
        // reached exactly (not just asymptotically) behind it.
        let spec = fixtures::example_d::<f64>();
        let config = PdeConfig::new(
            -6.0,
            14.0,
            5e-3,
            10.0,
            InitialCondition::Step {
                location: 0.0,
                upper: 1.0,
                lower: 0.0,
            },
        );
        let res = simulate(&spec, &config).unwrap();
        let i_probe = res.x.iter().position(|&x| x >= 1.5).unwrap();
        assert_eq!(res.snapshots[0][i_probe], 0.0);
        let arrived = res
            .snapshots
            .iter()
            .any(|g| g[i_probe] > 1.0 - 1e-6);
        assert!(arrived, "front never arrived at x = 1.5");
        // and the whole band [0.5, 1.5] is covered at the final time
        let last = res.snapshots.last().unwrap();
        for (i, &xi) in res.x.iter().enumerate() {
            if (0.5..=1.5).contains(&xi) {
                assert!(last[i] > 1.0 - 1e-6);
            }
        }
    }

    #[test]
    fn level_errors() {
        let spec = fixtures::example_a::<f64>();
        let config = PdeConfig::new(
            -4.0,
            4.0,
            5e-3,
            0.2,
            InitialCondition::Step {
                location: 0.0,
                upper: 1.0,
                lower: 0.0,
            },
        );
        let res = simulate(&spec, &config).unwrap();
        assert_eq!(
            measure_front_speed(&res, 2.0, (0.0, 0.2)).unwrap_err(),
            PdeError::LevelNotCrossed(2.0)
        );
        // a bump crosses 0.25 twice
        let bump = InitialCondition::Table(vec![
            (-4.0, 0.0),
            (-1.0, 0.0),
            (0.0, 0.5),
            (1.0, 0.0),
            (4.0, 0.0),
        ]);
        let config2 = PdeConfig::new(-4.0, 4.0, 5e-3, 1e-3, bump);
        let res2 = simulate(&spec, &config2).unwrap();
        assert_eq!(
            measure_front_speed(&res2, 0.25, (0.0, 1.0)).unwrap_err(),
            PdeError::MultipleCrossings(0.25)
        );
    }

    #[test]
    fn residual_requires_a_terrace_run() {
        let spec = fixtures::example_a::<f64>();
        let config = PdeConfig::new(
            -4.0,
            4.0,
            5e-3,
            0.01,
            InitialCondition::Step {
                location: 0.0,
                upper: 1.0,
                lower: 0.0,
            },
        );
        let res = simulate(&spec, &config).unwrap();
        let terr = crate::terrace::build_terrace(&spec, &crate::Tolerances::default()).unwrap();
        let tf = TerraceFunction::from_terrace(&spec, &terr, 1.0, 201).unwrap();
        assert_eq!(
            residual_vs_terrace(&res, &tf).unwrap_err(),
            PdeError::GridMismatch
        );
    }
}
