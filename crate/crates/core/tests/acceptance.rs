//! Acceptance suite: ten end-to-end criteria, each printed as one pass/fail
//! line (run with `--nocapture` to see them). Tolerances and budgets are
//! pinned in the constants next to each test.

mod common;

use common::{random_point, random_protocol, rng, sv_joint, sv_one_time, sv_triple};
use conformal_qubit::{
    check_aot, check_nsit, luders_violation_search, nsit123_analytic, optimal_k3_surface,
    sweep::LUDERS_BOUND, triple_joint, Condition, ConstrainedParams, ExtendedComplex, FlcMap,
    MapClass, Protocol, QubitState, RatioPair, SweepConfig, SweepFamily, TimePair, TimePoint,
    UnitaryAngles,
};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;
use std::time::{Duration, Instant};

fn verdict(id: &str, name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {id} [{}] {name} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {id} {name}: {detail}");
}

#[test]
fn criterion_01_unitary_closed_form_equals_pipeline() {
    let started = Instant::now();
    let mut rng = rng(101);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let t1 = rng.gen::<f64>() * TAU;
        let t2 = rng.gen::<f64>() * TAU;
        let phases = [
            rng.gen::<f64>() * TAU,
            rng.gen::<f64>() * TAU,
            rng.gen::<f64>() * TAU,
            rng.gen::<f64>() * TAU,
        ];
        let angles = UnitaryAngles::from_phases(t1, t2, phases);
        let f12 = FlcMap::unitary(t1, phases[0], phases[1]);
        let f23 = FlcMap::unitary(t2, phases[2], phases[3]);
        let p = Protocol::new(random_point(&mut rng), f12, f23);
        worst = worst.max((conformal_qubit::unitary_k3(&angles) - p.k3().k3).abs());
    }
    let elapsed = started.elapsed();
    verdict(
        "01",
        "unitary closed form = pipeline (1e4 angle tuples, 1e-12)",
        worst <= 1e-12 && elapsed < Duration::from_secs(5),
        &format!("max |diff| = {worst:.3e}, elapsed {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_unitary_optimizer_reaches_luders_bound() {
    let started = Instant::now();
    let cfg = SweepConfig::for_family(SweepFamily::Unitary);
    let res = optimal_k3_surface(&cfg).expect("valid config");
    let elapsed = started.elapsed();

    let max_ok = (res.max_k3 - LUDERS_BOUND).abs() <= 1e-6;
    let get = |name: &str| {
        res.argmax
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
            .unwrap()
    };
    // the argmax must sit on the branch that maximizes the phase term
    // sin(2 theta1) sin(2 theta2) cos(gamma)
    let coupling = (2.0 * get("theta1")).sin() * (2.0 * get("theta2")).sin();
    let phase_term = coupling * get("gamma").cos();
    let branch_ok = phase_term > 0.0 && (coupling.abs() - phase_term).abs() <= 1e-6;

    verdict(
        "02",
        "unitary optimizer: max K3 = 3/2, maximizing phase branch",
        max_ok && branch_ok && elapsed < Duration::from_secs(10),
        &format!(
            "max = {:.9}, phase term = {phase_term:.6}, elapsed {elapsed:.2?}",
            res.max_k3
        ),
    );
}

#[test]
fn criterion_03_constrained_families_respect_bound() {
    let started = Instant::now();
    let mut rng = rng(103);
    let mut max_seen = f64::NEG_INFINITY;

    // 1e5 protocol draws from each of the four constrained coefficient rows
    // (both sign variants per row)
    for row in 0..4usize {
        for _ in 0..100_000 {
            let pattern = row * 2 + rng.gen_range(0..2usize);
            let f12 = common::random_constrained_map(&mut rng, pattern);
            let f23 = common::random_constrained_map(&mut rng, pattern);
            let p = Protocol::new(random_point(&mut rng), f12, f23);
            max_seen = max_seen.max(p.k3().k3);
        }
    }

    // 1e5 draws from the ratio parametrization, composite constraint solved
    // and filtered at 1e-10
    let mut accepted = 0u32;
    let mut attempts = 0u32;
    while accepted < 100_000 && attempts < 1_000_000 {
        attempts += 1;
        let r1 = rng.gen::<f64>() * 4.0;
        let r2 = rng.gen::<f64>() * 4.0;
        let t3 = rng.gen::<f64>() * TAU;
        let t4 = rng.gen::<f64>() * TAU;
        for c in ConstrainedParams::solve_composed_constraint(r1, r2, t3, t4) {
            if c.composed_constraint_residual() <= 1e-10 {
                accepted += 1;
                max_seen = max_seen.max(conformal_qubit::constrained_k3(&c));
            }
        }
    }
    let elapsed = started.elapsed();

    verdict(
        "03",
        "constrained rows + ratio parametrization: K3 <= 3/2 + 1e-9",
        max_seen <= LUDERS_BOUND + 1e-9
            && accepted >= 100_000
            && elapsed < Duration::from_secs(60),
        &format!("max K3 = {max_seen:.12}, solved draws = {accepted}, elapsed {elapsed:.2?}"),
    );
}

/// Continuum maximum of the conjugate-symmetric pair family (the two phase
/// combinations collapse to one effective angle there, so it stays strictly
/// below 3/2; the symmetric family attains 3/2 exactly).
const PAIR_B_MAX: f64 = 1.134_884_497_736;

#[test]
fn criterion_04_pair_family_surfaces() {
    let started = Instant::now();
    let res_a = optimal_k3_surface(&SweepConfig::for_family(SweepFamily::SymmetricPair))
        .expect("valid config");
    let res_b = optimal_k3_surface(&SweepConfig::for_family(
        SweepFamily::ConjugateSymmetricPair,
    ))
    .expect("valid config");

    let max_a_ok = (res_a.max_k3 - LUDERS_BOUND).abs() <= 1e-6;
    let bound_b_ok = res_b.max_k3 <= LUDERS_BOUND + 1e-9;
    let pinned_b_ok = (res_b.max_k3 - PAIR_B_MAX).abs() <= 1e-6;
    let combined_ok = (res_a.max_k3.max(res_b.max_k3) - LUDERS_BOUND).abs() <= 1e-6;

    // along the lambda1 = 0 and lambda2 = 0 grid lines the optimum stays at
    // or below the classical bound 1 (cells with no valid family member are
    // marked NaN and only occur at unit modulus of the other axis)
    let grid = 201;
    let mut lines_ok = true;
    let mut line_nans = 0u32;
    for (res, family) in [(&res_a, "a"), (&res_b, "b")] {
        for idx in 0..grid {
            for point in [&res.surface[idx], &res.surface[idx * grid]] {
                if point.k3.is_nan() {
                    line_nans += 1;
                    let other = point.params[0].max(point.params[1]);
                    lines_ok &= (other - 1.0).abs() < 1e-12;
                    continue;
                }
                if point.k3 > 1.0 + 1e-9 {
                    eprintln!(
                        "family {family} line point {:?} has K3 = {}",
                        point.params, point.k3
                    );
                    lines_ok = false;
                }
            }
        }
    }

    // initial-state independence: optimal values recomputed from 10 random
    // initial points agree pointwise (coarse grid, every phase combination)
    let mut rng = rng(104);
    let starts: Vec<ExtendedComplex> = (0..10).map(|_| random_point(&mut rng)).collect();
    let coarse: Vec<f64> = (0..21).map(|k| 4.0 * k as f64 / 20.0).collect();
    let phases: Vec<f64> = (0..16).map(|k| TAU * k as f64 / 16.0).collect();
    let mut spread_max = 0.0f64;
    for family in [
        SweepFamily::SymmetricPair,
        SweepFamily::ConjugateSymmetricPair,
    ] {
        for &r1 in &coarse {
            for &r2 in &coarse {
                for &p1 in &phases {
                    for &p2 in &phases {
                        let b1 = Complex64::from_polar(r1, p1);
                        let b2 = Complex64::from_polar(r2, p2);
                        let build = |alpha: Complex64, beta: Complex64| match family {
                            SweepFamily::SymmetricPair => FlcMap::symmetric(alpha, beta),
                            _ => FlcMap::conjugate_symmetric(alpha, beta),
                        };
                        let one = Complex64::new(1.0, 0.0);
                        let (Ok(f12), Ok(f23)) = (build(one, b1), build(one, b2)) else {
                            continue;
                        };
                        let mut lo = f64::INFINITY;
                        let mut hi = f64::NEG_INFINITY;
                        for z1 in &starts {
                            let k3 = Protocol::new(*z1, f12, f23).k3().k3;
                            lo = lo.min(k3);
                            hi = hi.max(k3);
                        }
                        spread_max = spread_max.max(hi - lo);
                    }
                }
            }
        }
    }
    let independence_ok = spread_max < 1e-9;
    let elapsed = started.elapsed();

    verdict(
        "04",
        "pair-family surfaces: shared max 3/2, bound, axis lines, state independence",
        max_a_ok
            && bound_b_ok
            && pinned_b_ok
            && combined_ok
            && lines_ok
            && independence_ok
            && elapsed < Duration::from_secs(300),
        &format!(
            "max_a = {:.9}, max_b = {:.12}, line NaNs = {line_nans}, state spread = {spread_max:.2e}, elapsed {elapsed:.2?}",
            res_a.max_k3, res_b.max_k3
        ),
    );
}

#[test]
fn criterion_05_closed_forms_match_state_vector_oracle() {
    let started = Instant::now();
    let mut rng = rng(105);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let p = random_protocol(&mut rng);
        for pair in [TimePair::T12, TimePair::T23, TimePair::T13] {
            let closed = p.joint(pair).as_array();
            let simulated = sv_joint(&p, pair);
            for (c, s) in closed.iter().zip(simulated) {
                worst = worst.max((c - s).abs());
            }
        }
        for (c, s) in triple_joint(&p).as_array().iter().zip(sv_triple(&p)) {
            worst = worst.max((c - s).abs());
        }
        for at in [TimePoint::T1, TimePoint::T2, TimePoint::T3] {
            let (cp, _) = p.one_time_probs(at);
            let (sp, _) = sv_one_time(&p, at);
            worst = worst.max((cp - sp).abs());
        }
    }
    let elapsed = started.elapsed();
    verdict(
        "05",
        "closed-form probabilities = state-vector oracle (1e4 protocols, 1e-12)",
        worst <= 1e-12,
        &format!("max |diff| = {worst:.3e}, elapsed {elapsed:.2?}"),
    );
}

#[test]
fn criterion_06_normalization_and_aot() {
    let started = Instant::now();
    let mut rng = rng(106);
    let mut worst_sum = 0.0f64;
    let mut worst_aot = 0.0f64;
    for _ in 0..10_000 {
        let p = random_protocol(&mut rng);
        for pair in [TimePair::T12, TimePair::T23, TimePair::T13] {
            let joint = p.joint(pair);
            worst_sum = worst_sum.max((joint.sum() - 1.0).abs());
            for q in joint.as_array() {
                assert!((-1e-15..=1.0 + 1e-12).contains(&q), "probability {q}");
            }
        }
        worst_sum = worst_sum.max((triple_joint(&p).sum() - 1.0).abs());
        for rec in check_aot(&p, 1e-12) {
            worst_aot = worst_aot.max(rec.residual);
        }
    }
    let elapsed = started.elapsed();
    verdict(
        "06",
        "distributions normalized, AoT residuals <= 1e-12 (1e4 protocols)",
        worst_sum <= 1e-12 && worst_aot <= 1e-12,
        &format!("max |sum-1| = {worst_sum:.3e}, max AoT residual = {worst_aot:.3e}, elapsed {elapsed:.2?}"),
    );
}

#[test]
fn criterion_07_nsit_analytic_agrees_with_residual_check() {
    let started = Instant::now();
    let grid: Vec<f64> = (0..41).map(|k| -2.0 + 4.0 * k as f64 / 40.0).collect();
    let mut rng = rng(107);
    let tol = 1e-10;

    let mut checked = 0u32;
    let mut skipped_singular = 0u32;
    let mut satisfied = 0u32;
    while checked < 10_000 {
        let l1 = Complex64::new(
            grid[rng.gen_range(0..41)],
            grid[rng.gen_range(0..41)],
        );
        let l2 = Complex64::new(
            grid[rng.gen_range(0..41)],
            grid[rng.gen_range(0..41)],
        );
        let ratios = RatioPair::finite(l1, l2);
        if ratios.protocol(ExtendedComplex::ONE).is_err() {
            // the family is singular at lambda^2 = 1; no protocol exists
            skipped_singular += 1;
            continue;
        }
        let analytic = nsit123_analytic(&ratios, tol);
        for _ in 0..5 {
            let p = ratios.protocol(random_point(&mut rng)).unwrap();
            let rec = check_nsit(&p, tol)
                .into_iter()
                .find(|r| r.condition == Condition::Nsit1_2_3)
                .unwrap();
            assert_eq!(
                rec.satisfied, analytic,
                "disagreement at l1 = {l1}, l2 = {l2}: residual {}",
                rec.residual
            );
        }
        if analytic {
            satisfied += 1;
        }
        checked += 1;
    }
    let elapsed = started.elapsed();
    verdict(
        "07",
        "analytic NSIT_1(2)3 = residual check on the lambda grid (1e4 points x 5 states)",
        checked == 10_000,
        &format!(
            "checked {checked} (satisfied {satisfied}, singular skipped {skipped_singular}), elapsed {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_08_stationarity_of_fully_constrained_protocols() {
    let started = Instant::now();
    let mut rng = rng(108);
    let mut worst_spread = 0.0f64;
    for _ in 0..200 {
        let pattern = rng.gen_range(0..8usize);
        let f12 = common::random_constrained_map(&mut rng, pattern);
        let f23 = common::random_constrained_map(&mut rng, pattern);
        let probe = Protocol::new(ExtendedComplex::ONE, f12, f23);
        // same-pattern pairs keep the composite constrained as well
        assert!(probe.f12().satisfies_ratio_constraint(1e-10));
        assert!(probe.f23().satisfies_ratio_constraint(1e-10));
        assert!(probe.f13().satisfies_ratio_constraint(1e-10));

        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for _ in 0..100 {
            let k3 = probe.with_initial_point(random_point(&mut rng)).k3().k3;
            lo = lo.min(k3);
            hi = hi.max(k3);
        }
        worst_spread = worst_spread.max(hi - lo);
    }
    let elapsed = started.elapsed();
    verdict(
        "08",
        "K3 initial-state spread < 1e-9 when every pair is constrained",
        worst_spread < 1e-9,
        &format!("max spread = {worst_spread:.3e}, elapsed {elapsed:.2?}"),
    );
}

#[test]
fn criterion_09_nonlinearity_witness_separates_classes() {
    let started = Instant::now();
    let mut rng = rng(109);

    let orthonormal_pair = |rng: &mut rand_chacha::ChaCha8Rng| {
        let b1 = common::random_state(rng);
        let b2 = QubitState::new(-b1.down_amplitude().conj(), b1.up_amplitude().conj()).unwrap();
        (b1, b2)
    };
    let random_eta = |rng: &mut rand_chacha::ChaCha8Rng| {
        let angle = rng.gen::<f64>() * std::f64::consts::FRAC_PI_2;
        let phase = rng.gen::<f64>() * TAU;
        (
            Complex64::new(angle.cos(), 0.0),
            Complex64::from_polar(angle.sin(), phase),
        )
    };

    // linear actions: unitary and complex multiples of unitary
    let mut worst_linear = 0.0f64;
    for _ in 0..10_000 {
        let u = common::random_unitary_map(&mut rng);
        let lambda = Complex64::from_polar(0.2 + 4.8 * rng.gen::<f64>(), rng.gen::<f64>() * TAU);
        let f = FlcMap::new(
            u.a() * lambda,
            u.b() * lambda,
            u.c() * lambda,
            u.d() * lambda,
        )
        .unwrap();
        assert!(f.classify().is_linear());
        let (b1, b2) = orthonormal_pair(&mut rng);
        worst_linear = worst_linear.max(f.nonlinearity_witness(random_eta(&mut rng), (&b1, &b2)));
    }

    // non-linear actions: some superposition must expose them
    let mut weakest_nonlinear = f64::INFINITY;
    let mut count = 0u32;
    while count < 1_000 {
        let f = common::random_map(&mut rng);
        if f.classify() != MapClass::NonLinear {
            continue;
        }
        count += 1;
        let mut best = 0.0f64;
        let eq = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        best = best.max(
            f.nonlinearity_witness((eq, eq), (&QubitState::up(), &QubitState::down())),
        );
        for _ in 0..16 {
            let (b1, b2) = orthonormal_pair(&mut rng);
            best = best.max(f.nonlinearity_witness(random_eta(&mut rng), (&b1, &b2)));
        }
        weakest_nonlinear = weakest_nonlinear.min(best);
    }
    let elapsed = started.elapsed();
    verdict(
        "09",
        "witness <= 1e-12 on linear maps, > 1e-6 on non-linear maps",
        worst_linear <= 1e-12 && weakest_nonlinear > 1e-6,
        &format!(
            "max linear = {worst_linear:.3e}, min non-linear = {weakest_nonlinear:.3e}, elapsed {elapsed:.2?}"
        ),
    );
}

/// Best K3 found by the seeded default violation search; the value is a
/// deterministic regression pin, re-verified through the pipeline below.
const BEST_FOUND_K3: f64 = 2.922_323_551_035_267_6;

#[test]
fn criterion_10_violation_search_and_bound_checks() {
    let started = Instant::now();

    let mut cfg = SweepConfig::for_family(SweepFamily::General);
    cfg.seed = 0;
    let res = luders_violation_search(&cfg).expect("valid config");
    let witness = res.witness.as_ref().expect("search should find a witness");
    let witness_ok = res.max_k3 > LUDERS_BOUND + 1e-3
        && (witness.k3 - witness.pipeline_k3).abs() <= 1e-9
        && witness.ratio_constraint.iter().any(|ok| !ok);
    let pinned_ok = (res.max_k3 - BEST_FOUND_K3).abs() <= 1e-9;

    // restricted to the constrained rows the same search stays at the bound
    let mut cfg = SweepConfig::for_family(SweepFamily::Constrained);
    cfg.seed = 0;
    let constrained = luders_violation_search(&cfg).expect("valid config");
    let constrained_ok =
        constrained.max_k3 <= LUDERS_BOUND + 1e-9 && constrained.witness.is_none();

    // restricted to unitary maps it converges to the bound itself
    let mut cfg = SweepConfig::for_family(SweepFamily::Unitary);
    cfg.samples = 20_000;
    cfg.seed = 0;
    let unitary = luders_violation_search(&cfg).expect("valid config");
    let unitary_ok =
        (unitary.max_k3 - LUDERS_BOUND).abs() <= 1e-6 && unitary.witness.is_none();

    let elapsed = started.elapsed();
    verdict(
        "10",
        "violation search: verified witness above 3/2; constrained/unitary stay bounded",
        witness_ok && pinned_ok && constrained_ok && unitary_ok,
        &format!(
            "best = {:.12} (witness {}, constraint flags {:?}), constrained max = {:.12}, unitary max = {:.9}, elapsed {elapsed:.2?}",
            res.max_k3,
            witness.k3,
            witness.ratio_constraint,
            constrained.max_k3,
            unitary.max_k3
        ),
    );
}
