//! Property tests over randomly generated bistable reactions: validation,
//! the single-front structure, the speed sign law, and the canonical float
//! format.

use proptest::prelude::*;

use terrace_core::io::fmt_g17;
use terrace_core::reaction::{ReactionBuilder, ReactionSpec, Stability};
use terrace_core::speed::find_critical_speed;
use terrace_core::terrace::build_terrace;
use terrace_core::Tolerances64;

/// Piecewise-linear bistable reaction with the unstable state at `theta` and
/// slopes `k_lo`, `k_hi` on the two halves.
fn bistable(theta: f64, k_lo: f64, k_hi: f64) -> ReactionSpec<f64> {
    ReactionBuilder {
        steady_states: vec![
            (1.0, Stability::Stable),
            (theta, Stability::Unstable),
            (0.0, Stability::Stable),
        ],
        segments: vec![
            (0.0, theta, vec![-k_lo * theta, k_lo]),
            (theta, 1.0, vec![-k_hi * theta, k_hi]),
        ],
        extension_below: vec![k_lo * theta],
        extension_above: vec![-k_hi * (1.0 - theta)],
    }
    .validate()
    .expect("constructed bistable reaction is valid")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_bistable_reactions_validate(
        theta in 0.2f64..0.8,
        k_lo in 0.5f64..8.0,
        k_hi in 0.5f64..8.0,
    ) {
        let spec = bistable(theta, k_lo, k_hi);
        prop_assert_eq!(spec.index_count(), 1);
        // sup over samples never exceeds the certified bound
        for k in 0..2000 {
            let p = -0.5 + 2.0 * k as f64 / 2000.0;
            prop_assert!(spec.eval_pde(p).abs() <= spec.sup_norm());
        }
    }

    #[test]
    fn bistable_terraces_are_single_fronts_with_the_sign_law(
        theta in 0.25f64..0.75,
        k_lo in 0.5f64..6.0,
        k_hi in 0.5f64..6.0,
    ) {
        let spec = bistable(theta, k_lo, k_hi);
        let tols = Tolerances64::default();
        let integral = k_hi * (1.0 - theta) * (1.0 - theta) / 2.0 - k_lo * theta * theta / 2.0;
        // skip the balanced razor's edge where the sign is not resolvable
        prop_assume!(integral.abs() > 1e-3);

        let cs = find_critical_speed(&spec, 1.0, &tols).unwrap();
        prop_assert_eq!(cs.platform, 0.0);
        prop_assert!(
            cs.c_star.signum() == integral.signum(),
            "c* = {} but int f = {}", cs.c_star, integral
        );

        let terrace = build_terrace(&spec, &tols).unwrap();
        prop_assert_eq!(terrace.fronts.len(), 1);
    }

    #[test]
    fn canonical_floats_round_trip(x in proptest::num::f64::NORMAL) {
        let s = fmt_g17(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}
