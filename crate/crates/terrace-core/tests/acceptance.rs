//! Acceptance suite: end-to-end criteria for the whole pipeline, one test
//! per criterion, each printing a `[PASS]`/`[FAIL]` line (run with
//! `--nocapture` to see them). Expected values come from closed forms of the
//! built-in fixtures or from the independent finite-difference oracle.

mod common;

use common::{Criterion, Rng};
use std::f64::consts::PI;

use terrace_core::fixtures;
use terrace_core::pde::{measure_front_speed, residual_vs_terrace, simulate, InitialCondition, PdeConfig};
use terrace_core::phase_plane::{solve_terminal, solve_with, SolveOptions, Termination};
use terrace_core::profile::{reconstruct_profile, TerraceFunction};
use terrace_core::speed::{bracket, lower_bracket, upper_bracket};
use terrace_core::terrace::{build_terrace, build_terrace_with};
use terrace_core::{Reaction64, Tolerances64};

fn tols() -> Tolerances64 {
    Tolerances64::default()
}

/// Criterion 1: the balanced bistable reaction has a single stationary
/// compact front with the closed form q(p) = -2 sqrt(p(1-p)),
/// phi(z) = 1/2 + cos(2z)/2.
#[test]
fn criterion_1_bistable_front() {
    let mut cr = Criterion::new("criterion 1: bistable front (example A)", 1.0);
    let spec = fixtures::example_a::<f64>();
    let terrace = build_terrace(&spec, &tols()).unwrap();
    cr.check("J = 1", terrace.fronts.len() == 1);
    let front = &terrace.fronts[0];
    cr.check_close("c* = 0", front.speed, 0.0, 1e-8);

    let mut opts = SolveOptions::default_for(tols().ode);
    opts.grid = vec![0.5];
    let t = solve_with(&spec, 1.0, front.speed, &opts).unwrap();
    let q_half = t.q_at_sample(0.5).expect("grid landing at 1/2");
    cr.check_close("q(1/2) = -1", q_half, -1.0, 1e-6);

    let prof = reconstruct_profile(&spec, front, 2001).unwrap();
    cr.check_close("support width = pi/2", prof.width, PI / 2.0, 1e-6);
    cr.finish();
}

/// Criterion 2: both halves of the balanced tristable reaction chain at the
/// same (zero) speed into a two-front terrace with widths pi/4.
#[test]
fn criterion_2_same_speed_chaining() {
    let mut cr = Criterion::new("criterion 2: same-speed chaining (example B)", 1.0);
    let spec = fixtures::example_b::<f64>();
    let terrace = build_terrace(&spec, &tols()).unwrap();
    cr.check("J = 2", terrace.fronts.len() == 2);
    cr.check(
        "platforms (1, 1/2, 0)",
        terrace.platforms() == vec![1.0, 0.5, 0.0],
    );
    for (k, s) in terrace.speeds().iter().enumerate() {
        cr.check_close(&format!("speed {k} = 0"), *s, 0.0, 1e-8);
    }
    for (k, f) in terrace.fronts.iter().enumerate() {
        let prof = reconstruct_profile(&spec, f, 2001).unwrap();
        cr.check_close(&format!("width {k} = pi/4"), prof.width, PI / 4.0, 1e-6);
    }
    cr.finish();
}

/// Criterion 3: the unbalanced tristable reaction yields ordered nonzero
/// speeds whose signs follow the reaction integrals, and the independent
/// finite-difference discretization reproduces both speeds.
#[test]
fn criterion_3_ordered_speed_terrace() {
    let mut cr = Criterion::new("criterion 3: ordered speeds + PDE cross-check (example C)", 60.0);
    let spec = fixtures::example_c::<f64>();
    let terrace = build_terrace(&spec, &tols()).unwrap();
    cr.check("J = 2", terrace.fronts.len() == 2);
    cr.check(
        "platforms (1, 1/2, 0)",
        terrace.platforms() == vec![1.0, 0.5, 0.0],
    );
    let s = terrace.speeds();
    cr.check("c1 < -1e-4", s[0] < -1e-4);
    cr.check("c2 > 1e-4", s[1] > 1e-4);

    // independent oracle: explicit finite differences from a step
    let reach = s[1].abs().max(s[0].abs()) * 20.0;
    let mut config = PdeConfig::new(
        -(reach + 4.0),
        reach + 4.0,
        2e-3,
        20.0,
        InitialCondition::Step {
            location: 0.0,
            upper: 1.0,
            lower: 0.0,
        },
    );
    config.cfl_safety = 0.98;
    config.snapshot_dt = 0.5;
    let res = simulate(&spec, &config).unwrap();
    let (c1_pde, r2_1) = measure_front_speed(&res, 0.75, (10.0, 20.0)).unwrap();
    let (c2_pde, r2_2) = measure_front_speed(&res, 0.25, (10.0, 20.0)).unwrap();
    println!(
        "  measured c1 = {c1_pde:.6} (ode {:.6}, r2 {r2_1:.6}), c2 = {c2_pde:.6} (ode {:.6}, r2 {r2_2:.6})",
        s[0], s[1]
    );
    let tol1 = (0.01 * s[0].abs()).max(5e-3);
    let tol2 = (0.01 * s[1].abs()).max(5e-3);
    cr.check_close("PDE speed matches c1", c1_pde, s[0], tol1);
    cr.check_close("PDE speed matches c2", c2_pde, s[1], tol2);
    cr.finish();
}

/// Criterion 4: monotonicity and continuity of the trajectory with respect
/// to the speed, over 50 random pairs/sequences on the three fixtures.
#[test]
fn criterion_4_monotonicity_and_continuity() {
    let mut cr = Criterion::new("criterion 4: monotonicity & continuity suites", 30.0);
    let t = tols();
    let specs = [
        fixtures::example_a::<f64>(),
        fixtures::example_b::<f64>(),
        fixtures::example_c::<f64>(),
    ];
    let grid: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
    let mut rng = Rng::new(0x5eed);

    // 50 random ordered pairs spread over the fixtures
    for pair_idx in 0..50 {
        let spec = &specs[pair_idx % 3];
        let a = rng.uniform(-2.0, 3.0);
        let b = rng.uniform(-2.0, 3.0);
        let (c2, c1) = if a < b { (a, b) } else { (b, a) };
        if c1 - c2 < 1e-3 {
            continue;
        }
        let mut opts = SolveOptions::default_for(t.ode);
        opts.grid = grid.clone();
        let t1 = solve_with(spec, 1.0, c1, &opts).unwrap();
        let t2 = solve_with(spec, 1.0, c2, &opts).unwrap();
        cr.check(
            &format!("pair {pair_idx}: p_l({c2:.3}) <= p_l({c1:.3})"),
            t2.lower <= t1.lower + 10.0 * t.ode,
        );
        let mut ordered = true;
        for &g in &grid {
            if let (Some(q1), Some(q2)) = (t1.q_at_sample(g), t2.q_at_sample(g)) {
                ordered &= q2 <= q1 + 10.0 * t.ode;
            }
        }
        cr.check(&format!("pair {pair_idx}: q ordered on the grid"), ordered);
    }

    // uniform convergence for monotone speed sequences; the comparison grid
    // is fixed per sequence, inside the common domain of all its members
    for (name, spec, base) in [
        ("A", &specs[0], 0.8),
        ("B", &specs[1], 0.6),
        ("C", &specs[2], 0.9),
    ] {
        for sign in [1.0, -1.0] {
            // largest speed of the sequence has the highest landing point
            let c_max = if sign > 0.0 { base + 0.5 } else { base };
            let (pl_max, _, _) = solve_terminal(spec, 1.0, c_max, t.ode).unwrap();
            let margin = 0.02 * (1.0 - pl_max);
            let seq_grid: Vec<f64> = (1..20)
                .map(|k| pl_max + margin + (1.0 - pl_max - 2.0 * margin) * k as f64 / 20.0)
                .collect();
            let mut opts = SolveOptions::default_for(t.ode);
            opts.grid = seq_grid.clone();
            let t0 = solve_with(spec, 1.0, base, &opts).unwrap();

            let mut last_sup = f64::INFINITY;
            let mut final_sup = f64::NAN;
            for n in 1..=20 {
                let cn = base + sign * 0.5f64.powi(n);
                let tn = solve_with(spec, 1.0, cn, &opts).unwrap();
                let mut sup: f64 = 0.0;
                for &g in &seq_grid {
                    if let (Some(q0), Some(qn)) = (t0.q_at_sample(g), tn.q_at_sample(g)) {
                        sup = sup.max((q0 - qn).abs());
                    }
                }
                cr.check(
                    &format!("{name} sign {sign}: sup diff nonincreasing at n = {n} ({sup:.2e})"),
                    sup <= last_sup + 10.0 * t.ode,
                );
                last_sup = sup;
                final_sup = sup;
                if sign > 0.0 && n == 20 {
                    // decreasing speeds: the landing point converges too
                    let (pl_n, _, _) = solve_terminal(spec, 1.0, cn, t.ode).unwrap();
                    cr.check(
                        &format!("{name}: |p_l(c_20) - p_l(c)| small"),
                        (pl_n - t0.lower).abs() <= 1e-4,
                    );
                }
            }
            // the trajectory map is Lipschitz in the speed, so the final
            // difference must be at the scale of the final speed offset
            cr.check(
                &format!("{name} sign {sign}: uniform convergence ({final_sup:.2e})"),
                final_sup <= 100.0 * 0.5f64.powi(20),
            );
        }
    }
    cr.finish();
}

/// Criterion 5: terrace functions are invariant solutions of the simulator
/// up to discretization error, and the error drops under grid refinement.
#[test]
fn criterion_5_terrace_solution_invariance() {
    let mut cr = Criterion::new("criterion 5: terrace-solution invariance", 120.0);
    let t = tols();

    let run = |spec: &Reaction64, dx: f64| -> f64 {
        let terrace = build_terrace(spec, &t).unwrap();
        let tf = TerraceFunction::from_terrace(spec, &terrace, 1.0, 2001).unwrap();
        let (lo, hi) = tf.support_bounds(2.0, 0.0);
        let pad = (0.15 * (hi - lo)).max(2.0);
        let mut config = PdeConfig::new(
            lo - pad,
            hi + pad,
            dx,
            2.0,
            InitialCondition::TerraceSnapshot(tf.clone()),
        );
        config.cfl_safety = 0.95;
        config.snapshot_dt = 0.25;
        let res = simulate(spec, &config).unwrap();
        residual_vs_terrace(&res, &tf).unwrap()
    };

    let res_a = run(&fixtures::example_a::<f64>(), 2e-3);
    println!("  residual A = {res_a:.3e}");
    cr.check("example A residual <= 1e-2", res_a <= 1e-2);

    let res_b = run(&fixtures::example_b::<f64>(), 2e-3);
    println!("  residual B = {res_b:.3e}");
    cr.check("example B residual <= 1e-2", res_b <= 1e-2);

    let res_c = run(&fixtures::example_c::<f64>(), 2e-3);
    println!("  residual C = {res_c:.3e}");
    cr.check("example C residual <= 2e-2", res_c <= 2e-2);

    let res_b_fine = run(&fixtures::example_b::<f64>(), 1e-3);
    println!("  residual B at dx/2 = {res_b_fine:.3e} (ratio {:.2})", res_b / res_b_fine);
    cr.check(
        "halving dx improves example B by >= 1.5x",
        res_b >= 1.5 * res_b_fine,
    );
    cr.finish();
}

/// Criterion 6: determinism/uniqueness: perturbed brackets and 10x tighter
/// tolerances reproduce the platform sets exactly and the speeds within
/// twice the speed tolerance.
#[test]
fn criterion_6_uniqueness_as_determinism() {
    let mut cr = Criterion::new("criterion 6: uniqueness as determinism", 60.0);
    let t = tols();
    for (name, spec) in [
        ("A", fixtures::example_a::<f64>()),
        ("B", fixtures::example_b::<f64>()),
        ("C", fixtures::example_c::<f64>()),
    ] {
        let base = build_terrace(&spec, &t).unwrap();
        let b = bracket(&spec, 1.0, &t).unwrap();
        let perturbed =
            build_terrace_with(&spec, &t, Some((b.c_lo - 1.0, b.c_hi + 1.0))).unwrap();
        let mut tight = t;
        tight.speed /= 10.0;
        let refined = build_terrace(&spec, &tight).unwrap();

        cr.check(
            &format!("{name}: platforms reproduced under perturbed brackets"),
            base.platforms() == perturbed.platforms(),
        );
        cr.check(
            &format!("{name}: platforms reproduced under tighter tolerances"),
            base.platforms() == refined.platforms(),
        );
        for (k, (s1, s2)) in base.speeds().iter().zip(perturbed.speeds()).enumerate() {
            cr.check_close(
                &format!("{name}: speed {k} stable under perturbed brackets"),
                *s1,
                s2,
                2.0 * t.speed,
            );
        }
        for (k, (s1, s2)) in base.speeds().iter().zip(refined.speeds()).enumerate() {
            cr.check_close(
                &format!("{name}: speed {k} stable under tighter tolerances"),
                *s1,
                s2,
                2.0 * t.speed,
            );
        }
    }
    cr.finish();
}

/// Criterion 7: speed-bracket certificates: exact upper brackets from the
/// linear-segment ratio, and the right trajectory classifications at both
/// bracket ends.
#[test]
fn criterion_7_bracket_certificates() {
    let mut cr = Criterion::new("criterion 7: bracket certificates", 10.0);
    let t = tols();
    let a = fixtures::example_a::<f64>();
    let b = fixtures::example_b::<f64>();

    cr.check_close("upper bracket A = 4", upper_bracket(&a, 1.0, &t).unwrap(), 4.0, 1e-12);
    cr.check_close(
        "upper bracket B (lower half) = 8",
        upper_bracket(&b, 0.5, &t).unwrap(),
        8.0,
        1e-12,
    );
    cr.check_close(
        "upper bracket B (upper half) = 8",
        upper_bracket(&b, 1.0, &t).unwrap(),
        8.0,
        1e-12,
    );

    for (name, spec) in [("A", &a), ("B", &b)] {
        let br = bracket(spec, 1.0, &t).unwrap();
        let (pl, q, term) = solve_terminal(spec, 1.0, br.c_lo, t.ode).unwrap();
        cr.check(
            &format!("{name}: c_lo trajectory crosses the vertical axis"),
            term == Termination::HitQAxis && pl == 0.0 && q < 0.0,
        );
        let (_, _, term) = solve_terminal(spec, 1.0, br.c_hi, t.ode).unwrap();
        cr.check(
            &format!("{name}: c_hi trajectory lands on the horizontal axis"),
            term == Termination::HitPAxis,
        );
    }
    cr.check("lower bracket A = -1", lower_bracket(&a, 1.0, &t).unwrap() == -1.0);
    cr.finish();
}
