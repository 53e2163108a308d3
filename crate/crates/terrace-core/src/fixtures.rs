//! Built-in sample reactions used throughout the test suites and handy for
//! kicking the tires of the CLI.

use crate::reaction::{ReactionBuilder, ReactionSpec, Stability};
use crate::real::{lit, Real};

/// Bistable, balanced: states (1 S, 1/2 U, 0 S), `f = 4(p - 1/2)` on `(0, 1)`.
/// The stationary front has the closed form `q(p) = -2 sqrt(p(1 - p))`.
pub fn example_a<T: Real>() -> ReactionSpec<T> {
    ReactionBuilder {
        steady_states: vec![
            (lit(1.0), Stability::Stable),
            (lit(0.5), Stability::Unstable),
            (lit(0.0), Stability::Stable),
        ],
        segments: vec![
            (lit(0.0), lit(0.5), vec![lit(-2.0), lit(4.0)]),
            (lit(0.5), lit(1.0), vec![lit(-2.0), lit(4.0)]),
        ],
        extension_below: vec![lit(2.0)],
        extension_above: vec![lit(-2.0)],
    }
    .validate()
    .expect("example A is a valid reaction")
}

/// Tristable, both halves balanced: states (1 S, 3/4 U, 1/2 S, 1/4 U, 0 S),
/// `f = 16(p - 3/4)` on `(1/2, 1)` and `16(p - 1/4)` on `(0, 1/2)`. Both
/// fronts are stationary.
pub fn example_b<T: Real>() -> ReactionSpec<T> {
    ReactionBuilder {
        steady_states: vec![
            (lit(1.0), Stability::Stable),
            (lit(0.75), Stability::Unstable),
            (lit(0.5), Stability::Stable),
            (lit(0.25), Stability::Unstable),
            (lit(0.0), Stability::Stable),
        ],
        segments: vec![
            (lit(0.0), lit(0.25), vec![lit(-4.0), lit(16.0)]),
            (lit(0.25), lit(0.5), vec![lit(-4.0), lit(16.0)]),
            (lit(0.5), lit(0.75), vec![lit(-12.0), lit(16.0)]),
            (lit(0.75), lit(1.0), vec![lit(-12.0), lit(16.0)]),
        ],
        extension_below: vec![lit(4.0)],
        extension_above: vec![lit(-4.0)],
    }
    .validate()
    .expect("example B is a valid reaction")
}

/// Tristable with unbalanced halves: `f = 2(p - 3/4)` on `(3/4, 1)`,
/// `6(p - 3/4)` on `(1/2, 3/4)`, `6(p - 1/4)` on `(1/4, 1/2)`,
/// `2(p - 1/4)` on `(0, 1/4)`. The upper front moves left
/// (`int f < 0` on the upper half) and the lower front moves right.
pub fn example_c<T: Real>() -> ReactionSpec<T> {
    ReactionBuilder {
        steady_states: vec![
            (lit(1.0), Stability::Stable),
            (lit(0.75), Stability::Unstable),
            (lit(0.5), Stability::Stable),
            (lit(0.25), Stability::Unstable),
            (lit(0.0), Stability::Stable),
        ],
        segments: vec![
            (lit(0.0), lit(0.25), vec![lit(-0.5), lit(2.0)]),
            (lit(0.25), lit(0.5), vec![lit(-1.5), lit(6.0)]),
            (lit(0.5), lit(0.75), vec![lit(-4.5), lit(6.0)]),
            (lit(0.75), lit(1.0), vec![lit(-1.5), lit(2.0)]),
        ],
        extension_below: vec![lit(0.5)],
        extension_above: vec![lit(-0.5)],
    }
    .validate()
    .expect("example C is a valid reaction")
}

/// Bistable, unbalanced (`int f > 0`), so the single front moves right.
/// Used to exercise nonzero bistable speeds and finite-time arrival.
pub fn example_d<T: Real>() -> ReactionSpec<T> {
    ReactionBuilder {
        steady_states: vec![
            (lit(1.0), Stability::Stable),
            (lit(0.25), Stability::Unstable),
            (lit(0.0), Stability::Stable),
        ],
        segments: vec![
            (lit(0.0), lit(0.25), vec![lit(-0.5), lit(2.0)]),
            (lit(0.25), lit(1.0), vec![lit(-0.5), lit(2.0)]),
        ],
        extension_below: vec![lit(0.5)],
        extension_above: vec![lit(-1.5)],
    }
    .validate()
    .expect("example D is a valid reaction")
}

/// Bistable with cubic segments, `f = 4(p - 1/2) + 4(p - 1/2)^3` on
/// `(0, 1)`: still balanced (odd about 1/2), so the front is stationary,
/// with `q(1/2) = -sqrt(9/8)` by exact quadrature.
pub fn example_cubic<T: Real>() -> ReactionSpec<T> {
    let poly = vec![lit(-2.5), lit(7.0), lit(-6.0), lit(4.0)];
    ReactionBuilder {
        steady_states: vec![
            (lit(1.0), Stability::Stable),
            (lit(0.5), Stability::Unstable),
            (lit(0.0), Stability::Stable),
        ],
        segments: vec![
            (lit(0.0), lit(0.5), poly.clone()),
            (lit(0.5), lit(1.0), poly),
        ],
        extension_below: vec![lit(2.5)],
        extension_above: vec![lit(-2.5)],
    }
    .validate()
    .expect("cubic example is a valid reaction")
}
