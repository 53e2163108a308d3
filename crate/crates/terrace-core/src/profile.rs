//! Compact wave profiles and the glued terrace function.
//!
//! A front's profile is recovered from its phase-plane trajectory through
//!
//! ```text
//! z(p) = int_p^{upper} ds / (-q(s)),
//! ```
//!
//! which has integrable `1/sqrt` singularities at both platforms (there
//! `q ~ -sqrt(2 |f_limit| (distance))`). Substituting `s = platform -+ sigma^2`
//! turns each endpoint zone into a smooth integrand
//! `g(sigma) = 2 sigma / (-q)` with the exact limit
//! `g(0) = 2 / sqrt(2 |f_limit|)` known from the reaction's one-sided limits,
//! so the width comes out finite and accurate: compactness is what the jump
//! discontinuities buy.

use crate::interp::Pchip;
use crate::phase_plane::Trajectory;
use crate::reaction::ReactionSpec;
use crate::real::{as_f64, lit, Real};
use crate::terrace::{Front, Terrace};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("QuadratureFailure: {0}")]
    QuadratureFailure(String),
    #[error("InvalidShifts: supports must be disjoint and ordered left to right")]
    InvalidShifts,
}

/// Reconstructed compact profile `phi(z)`: `phi(0) = upper`,
/// `phi(width) = lower`, constant outside `[0, width]`.
#[derive(Debug, Clone)]
pub struct Profile<T> {
    pub upper: T,
    pub lower: T,
    pub speed: T,
    pub width: T,
    /// `(z, phi)` rows, `z` increasing from `0` to `width`.
    pub samples: Vec<(T, T)>,
    interp: Pchip<T>,
}

impl<T: Real> Profile<T> {
    /// Profile value at `z`, clamped to the platforms outside the support.
    pub fn eval(&self, z: T) -> T {
        if z <= T::zero() {
            return self.upper;
        }
        if z >= self.width {
            return self.lower;
        }
        self.interp.eval(z)
    }
}

/// The change-of-variable curve for one front: `z` as a function of `p`.
pub struct FrontCurve<T> {
    upper: T,
    lower: T,
    p_mid: T,
    /// `g(sigma)` with `sigma = sqrt(upper - p)`, valid for `p >= p_mid`.
    up: Pchip<T>,
    /// `g(sigma)` with `sigma = sqrt(p - lower)`, valid for `p <= p_mid`.
    down: Pchip<T>,
    width: T,
}

impl<T: Real> FrontCurve<T> {
    pub fn new(spec: &ReactionSpec<T>, front: &Front<T>) -> Result<Self, ProfileError> {
        Self::from_trajectory(spec, &front.trajectory, front.upper, front.lower)
    }

    pub fn from_trajectory(
        spec: &ReactionSpec<T>,
        traj: &Trajectory<T>,
        upper: T,
        lower: T,
    ) -> Result<Self, ProfileError> {
        if traj.q_at_lower != T::zero() {
            return Err(ProfileError::QuadratureFailure(
                "trajectory does not land on the horizontal axis".into(),
            ));
        }
        let span = upper - lower;
        if span <= T::zero() || traj.samples.len() < 8 {
            return Err(ProfileError::QuadratureFailure(
                "trajectory too short to reconstruct a profile".into(),
            ));
        }
        let half = lit::<T>(0.5);
        // the split value must be an actual sample so both branch integrals
        // meet there with no gap
        let target = half * (upper + lower);
        let p_mid = traj
            .samples
            .iter()
            .filter(|(_, q)| *q < T::zero())
            .map(|&(p, _)| p)
            .min_by(|a, b| {
                (*a - target)
                    .abs()
                    .partial_cmp(&(*b - target).abs())
                    .unwrap()
            })
            .ok_or_else(|| {
                ProfileError::QuadratureFailure("no interior samples".into())
            })?;

        // Exact integrand limits at the platforms from the one-sided
        // reaction limits.
        let f_up = spec
            .one_sided_limits(upper)
            .map_err(|e| ProfileError::QuadratureFailure(e.to_string()))?
            .0;
        let f_dn = spec
            .one_sided_limits(lower)
            .map_err(|e| ProfileError::QuadratureFailure(e.to_string()))?
            .1
            .abs();
        if f_up <= T::zero() || f_dn <= T::zero() {
            return Err(ProfileError::QuadratureFailure(
                "platforms must carry reaction jumps".into(),
            ));
        }
        let two = lit::<T>(2.0);
        let g_lim_up = two / (two * f_up).sqrt();
        let g_lim_dn = two / (two * f_dn).sqrt();

        // sigma nodes from the trajectory samples. Near the snapped lower
        // platform the terminal localization distorts the square-root shape,
        // so a neighborhood of samples is dropped there and bridged by the
        // exact limit node.
        let drop_dn = span * lit::<T>(1e-4);
        let drop_up = span * lit::<T>(1e-9);

        let mut up_nodes: Vec<(T, T)> = vec![(T::zero(), g_lim_up)];
        for &(p, q) in traj.samples.iter() {
            if p >= p_mid && upper - p > drop_up && q < T::zero() {
                up_nodes.push(((upper - p).sqrt(), two * (upper - p).sqrt() / -q));
            }
        }
        up_nodes.retain(|n| n.0.is_finite());
        up_nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        up_nodes.dedup_by(|a, b| a.0 <= b.0);

        let mut dn_nodes: Vec<(T, T)> = vec![(T::zero(), g_lim_dn)];
        for &(p, q) in traj.samples.iter() {
            if p <= p_mid && p - lower > drop_dn && q < T::zero() {
                dn_nodes.push(((p - lower).sqrt(), two * (p - lower).sqrt() / -q));
            }
        }
        dn_nodes.retain(|n| n.0.is_finite());
        dn_nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        dn_nodes.dedup_by(|a, b| a.0 <= b.0);

        if up_nodes.len() < 4 || dn_nodes.len() < 4 {
            return Err(ProfileError::QuadratureFailure(
                "not enough usable samples near a platform".into(),
            ));
        }

        let up = Pchip::new(
            up_nodes.iter().map(|n| n.0).collect(),
            up_nodes.iter().map(|n| n.1).collect(),
        );
        let down = Pchip::new(
            dn_nodes.iter().map(|n| n.0).collect(),
            dn_nodes.iter().map(|n| n.1).collect(),
        );

        let z_top_to_mid = up.integral(T::zero(), (upper - p_mid).sqrt());
        let z_mid_to_bottom = down.integral(T::zero(), (p_mid - lower).sqrt());
        let width = z_top_to_mid + z_mid_to_bottom;
        Ok(FrontCurve {
            upper,
            lower,
            p_mid,
            up,
            down,
            width,
        })
    }

    /// Support width `Z` (the position where the profile lands on `lower`).
    pub fn width(&self) -> T {
        self.width
    }

    /// Slope `q = phi'` at the value `p`, read off the substituted integrand
    /// (`-q = 2 sigma / g`). Exactly zero at the platforms.
    pub fn q_at(&self, p: T) -> T {
        let two = lit::<T>(2.0);
        if p >= self.p_mid {
            let sigma = (self.upper - p).sqrt();
            -two * sigma / self.up.eval(sigma)
        } else {
            let sigma = (p - self.lower).sqrt();
            -two * sigma / self.down.eval(sigma)
        }
    }

    /// `z(p)`: distance from the upper contact point at which the profile
    /// passes through the value `p`.
    pub fn z_of_p(&self, p: T) -> Result<T, ProfileError> {
        if p < self.lower || p > self.upper {
            return Err(ProfileError::QuadratureFailure(format!(
                "value {} outside [{}, {}]",
                as_f64(p),
                as_f64(self.lower),
                as_f64(self.upper)
            )));
        }
        if p >= self.p_mid {
            Ok(self.up.integral(T::zero(), (self.upper - p).sqrt()))
        } else {
            Ok(self.width - self.down.integral(T::zero(), (p - self.lower).sqrt()))
        }
    }
}

/// `z(p)` on a front, endpoint-singularity aware.
pub fn z_of_p<T: Real>(
    spec: &ReactionSpec<T>,
    front: &Front<T>,
    p: T,
) -> Result<T, ProfileError> {
    FrontCurve::new(spec, front)?.z_of_p(p)
}

/// Sample the profile at `n_samples` values uniform in `p` (plus the exact
/// endpoint contacts) and build the interpolable table.
pub fn reconstruct_profile<T: Real>(
    spec: &ReactionSpec<T>,
    front: &Front<T>,
    n_samples: usize,
) -> Result<Profile<T>, ProfileError> {
    if n_samples < 2 {
        return Err(ProfileError::QuadratureFailure(
            "need at least two samples".into(),
        ));
    }
    let curve = FrontCurve::new(spec, front)?;
    let span = front.upper - front.lower;
    let mut rows: Vec<(T, T)> = Vec::with_capacity(n_samples);
    let mut slopes: Vec<T> = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let frac = T::from_usize(k).unwrap() / T::from_usize(n_samples - 1).unwrap();
        let p = front.upper - span * frac;
        let z = if k == 0 {
            T::zero()
        } else if k == n_samples - 1 {
            curve.width()
        } else {
            curve.z_of_p(p)?
        };
        rows.push((z, p));
        // dphi/dz = q(phi), exact at the contacts
        slopes.push(if k == 0 || k == n_samples - 1 {
            T::zero()
        } else {
            curve.q_at(p)
        });
    }
    // z must come out strictly increasing for the interpolant
    for w in rows.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(ProfileError::QuadratureFailure(
                "non-monotone arc length; trajectory data too coarse".into(),
            ));
        }
    }
    let interp = Pchip::with_slopes(
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
        slopes,
    );
    Ok(Profile {
        upper: front.upper,
        lower: front.lower,
        speed: front.speed,
        width: curve.width(),
        samples: rows,
        interp,
    })
}

/// Glued terrace function `Phi(t, x) = sum_j (phi_j(x - xi_j - c_j t) - lower_j)`.
#[derive(Debug, Clone)]
pub struct TerraceFunction<T> {
    pub profiles: Vec<Profile<T>>,
    pub shifts: Vec<T>,
}

/// Left-to-right shifts leaving `gap` between consecutive supports at `t = 0`
/// (nondecreasing speeds keep them disjoint for all later times).
pub fn default_shifts<T: Real>(profiles: &[Profile<T>], gap: T) -> Vec<T> {
    let mut shifts = Vec::with_capacity(profiles.len());
    let mut x = T::zero();
    for p in profiles {
        shifts.push(x);
        x = x + p.width + gap;
    }
    shifts
}

impl<T: Real> TerraceFunction<T> {
    pub fn new(profiles: Vec<Profile<T>>, shifts: Vec<T>) -> Result<Self, ProfileError> {
        if profiles.len() != shifts.len() || profiles.is_empty() {
            return Err(ProfileError::InvalidShifts);
        }
        for j in 0..profiles.len() - 1 {
            if shifts[j] + profiles[j].width >= shifts[j + 1] {
                return Err(ProfileError::InvalidShifts);
            }
        }
        Ok(TerraceFunction { profiles, shifts })
    }

    /// Build from a terrace with the given support gap.
    pub fn from_terrace(
        spec: &ReactionSpec<T>,
        terrace: &Terrace<T>,
        gap: T,
        n_samples: usize,
    ) -> Result<Self, ProfileError> {
        let profiles = terrace
            .fronts
            .iter()
            .map(|f| reconstruct_profile(spec, f, n_samples))
            .collect::<Result<Vec<_>, _>>()?;
        let shifts = default_shifts(&profiles, gap);
        TerraceFunction::new(profiles, shifts)
    }

    /// `Phi(t, x)`: 1 far left, 0 far right, nonincreasing in `x`.
    pub fn eval(&self, t: T, x: T) -> T {
        let mut acc = T::zero();
        for (p, xi) in self.profiles.iter().zip(&self.shifts) {
            acc = acc + (p.eval(x - *xi - p.speed * t) - p.lower);
        }
        acc
    }

    /// Domain interval containing every support over `[0, t_final]`, with
    /// padding on both sides.
    pub fn support_bounds(&self, t_final: T, pad: T) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for (p, xi) in self.profiles.iter().zip(&self.shifts) {
            let drift = p.speed * t_final;
            lo = lo.min(*xi + drift.min(T::zero()));
            hi = hi.max(*xi + p.width + drift.max(T::zero()));
        }
        (lo - pad, hi + pad)
    }
}
