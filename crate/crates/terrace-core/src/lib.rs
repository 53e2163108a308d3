//! Propagating terraces for one-dimensional reaction-diffusion equations
//! whose reaction jumps at its stable steady states.
//!
//! When the reaction has several stable zeros, an invasion from the state `1`
//! into the state `0` generally proceeds in stages: a stack of traveling
//! fronts with ordered speeds, separated by intermediate plateaus. Because
//! the reaction is discontinuous at the stable states, each front reaches its
//! plateaus at finite positions (compact profiles), the fronts can be glued
//! into a single function of `(t, x)`, and the whole stack can be computed
//! to high accuracy by phase-plane shooting:
//!
//! 1. [`reaction`] validates and evaluates the piecewise-polynomial reaction;
//! 2. [`phase_plane`] integrates the trajectory equation
//!    `dq/dp = -c - f(p)/q` downward from a platform;
//! 3. [`speed`] brackets and bisects the critical speed of the uppermost
//!    front from a platform;
//! 4. [`terrace`] iterates the speed solver down the platform ladder,
//!    chaining same-speed fronts;
//! 5. [`profile`] reconstructs compact profiles `phi(z)` and evaluates the
//!    glued terrace function;
//! 6. [`pde`] cross-validates everything against an independent
//!    finite-difference simulation of `u_t = u_xx + f(u)`.
//!
//! Everything is generic over the scalar type via [`real::Real`]; the
//! `*64` aliases below fix `f64`, which is what the CLI and the acceptance
//! suite use.

pub mod fixtures;
pub mod interp;
pub mod io;
pub mod pde;
pub mod phase_plane;
pub mod poly;
pub mod profile;
pub mod reaction;
pub mod real;
#[doc(hidden)]
pub mod reference;
pub mod speed;
pub mod terrace;

pub use real::Real;

use real::lit;

/// Tolerance bundle used across the pipeline.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances<T> {
    /// Local error tolerance of the trajectory integrator.
    pub ode: T,
    /// Width of the final speed-bisection bracket.
    pub speed: T,
    /// Maximum distance between a terminal value and the stable state it is
    /// snapped to.
    pub snap: T,
    /// Accepted residual of `phi'' + c phi' + f(phi)` on reconstructed
    /// profiles.
    pub profile: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            ode: lit(1e-10),
            speed: lit(1e-8),
            snap: lit(1e-6),
            profile: lit(1e-4),
        }
    }
}

pub type Tolerances64 = Tolerances<f64>;
pub type Reaction64 = reaction::ReactionSpec<f64>;
pub type Trajectory64 = phase_plane::Trajectory<f64>;
pub type CriticalSpeed64 = speed::CriticalSpeed<f64>;
pub type Terrace64 = terrace::Terrace<f64>;
pub type Profile64 = profile::Profile<f64>;
pub type TerraceFunction64 = profile::TerraceFunction<f64>;
pub type PdeConfig64 = pde::PdeConfig<f64>;
pub type PdeResult64 = pde::PdeResult<f64>;
