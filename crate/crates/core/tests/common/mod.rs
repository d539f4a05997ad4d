//! Shared test support: an independent state-vector oracle for the
//! collapse-and-evolve probabilities, and seeded random generators for
//! states, maps and protocols.
//!
//! The oracle works directly on amplitude pairs with explicit 2x2 matrix
//! arithmetic — it never touches the extended-complex weights or map
//! application paths it is used to check.

#![allow(dead_code)]

use conformal_qubit::{ExtendedComplex, FlcMap, Protocol, QubitState, TimePair, TimePoint};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, sigma: f64) -> Complex64 {
    let u1: f64 = rng.gen::<f64>().max(1e-18);
    let u2: f64 = rng.gen();
    Complex64::from_polar(sigma * (-2.0 * u1.ln()).sqrt(), TAU * u2)
}

/// Haar-uniform pure state.
pub fn random_state(rng: &mut ChaCha8Rng) -> QubitState {
    loop {
        let up = random_complex(rng, 1.0);
        let down = random_complex(rng, 1.0);
        if let Ok(state) = QubitState::new(up, down) {
            return state;
        }
    }
}

/// Point distributed like the projection of a Haar state, with occasional
/// exact poles mixed in.
pub fn random_point(rng: &mut ChaCha8Rng) -> ExtendedComplex {
    match rng.gen_range(0..20u32) {
        0 => ExtendedComplex::ZERO,
        1 => ExtendedComplex::Infinity,
        _ => random_state(rng).to_point(),
    }
}

/// Generic map with Gaussian coefficients; with some probability one
/// coefficient is forced to zero so the `a/c`, `b/d` edge conventions get
/// exercised.
pub fn random_map(rng: &mut ChaCha8Rng) -> FlcMap {
    loop {
        let mut coeff = [
            random_complex(rng, 1.0),
            random_complex(rng, 1.0),
            random_complex(rng, 1.0),
            random_complex(rng, 1.0),
        ];
        if rng.gen_bool(0.25) {
            coeff[rng.gen_range(0..4)] = Complex64::new(0.0, 0.0);
        }
        if let Ok(map) = FlcMap::new(coeff[0], coeff[1], coeff[2], coeff[3]) {
            return map;
        }
    }
}

pub fn random_protocol(rng: &mut ChaCha8Rng) -> Protocol {
    Protocol::new(random_point(rng), random_map(rng), random_map(rng))
}

/// Random unitary interval map (Haar-like angles).
pub fn random_unitary_map(rng: &mut ChaCha8Rng) -> FlcMap {
    FlcMap::unitary(
        rng.gen::<f64>() * TAU,
        rng.gen::<f64>() * TAU,
        rng.gen::<f64>() * TAU,
    )
}

/// One of the eight ratio-constrained coefficient patterns
/// (`(az ± b)/(±bz ± a)` and the conjugated variants) with random `(a, b)`.
pub fn random_constrained_map(rng: &mut ChaCha8Rng, pattern: usize) -> FlcMap {
    loop {
        let a = random_complex(rng, 1.0);
        let b = random_complex(rng, 1.0);
        let candidate = match pattern % 8 {
            0 => FlcMap::new(a, b, b, a),
            1 => FlcMap::new(a, b, b, -a),
            2 => FlcMap::new(a, b, -b, a),
            3 => FlcMap::new(a, b, -b, -a),
            4 => FlcMap::new(a, b, b.conj(), a.conj()),
            5 => FlcMap::new(a, b, b.conj(), -a.conj()),
            6 => FlcMap::new(a, b, -b.conj(), a.conj()),
            _ => FlcMap::new(a, b, -b.conj(), -a.conj()),
        };
        if let Ok(map) = candidate {
            return map;
        }
    }
}

// ---------------------------------------------------------------------------
// state-vector oracle
// ---------------------------------------------------------------------------

type Amp = [Complex64; 2];

fn matrix(f: &FlcMap) -> [[Complex64; 2]; 2] {
    [[f.a(), f.b()], [f.c(), f.d()]]
}

fn apply_matrix(m: &[[Complex64; 2]; 2], v: &Amp) -> Amp {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn normalize(v: &Amp) -> Amp {
    let n = v[0].norm().hypot(v[1].norm());
    [v[0] / n, v[1] / n]
}

fn prob_up(v: &Amp) -> f64 {
    let n = normalize(v);
    n[0].norm_sqr()
}

fn initial_amplitudes(z1: ExtendedComplex) -> Amp {
    match z1 {
        ExtendedComplex::Infinity => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ExtendedComplex::Finite(z) => {
            let m = z.norm();
            if m > 1.0 {
                normalize(&[z / m, Complex64::new(1.0 / m, 0.0)])
            } else {
                normalize(&[z, Complex64::new(1.0, 0.0)])
            }
        }
    }
}

const UP: Amp = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
const DOWN: Amp = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];

/// Probability of the `+1` outcome after collapsing to `from` and evolving
/// with `m`.
fn branch_prob_up(m: &[[Complex64; 2]; 2], from: &Amp) -> f64 {
    prob_up(&apply_matrix(m, from))
}

/// `(P(+), P(-))` of a single measurement at `at`, no earlier measurement.
pub fn sv_one_time(p: &Protocol, at: TimePoint) -> (f64, f64) {
    let v0 = initial_amplitudes(p.z1());
    let v = match at {
        TimePoint::T1 => v0,
        TimePoint::T2 => apply_matrix(&matrix(p.f12()), &v0),
        TimePoint::T3 => {
            let v2 = normalize(&apply_matrix(&matrix(p.f12()), &v0));
            apply_matrix(&matrix(p.f23()), &v2)
        }
    };
    let plus = prob_up(&v);
    (plus, 1.0 - plus)
}

/// Two-time joint probabilities `[pp, pm, mp, mm]` by explicit
/// collapse-and-evolve simulation.
pub fn sv_joint(p: &Protocol, pair: TimePair) -> [f64; 4] {
    let v0 = initial_amplitudes(p.z1());
    match pair {
        TimePair::T12 => {
            let m12 = matrix(p.f12());
            let x = prob_up(&v0);
            let y = branch_prob_up(&m12, &UP);
            let z = branch_prob_up(&m12, &DOWN);
            [x * y, x * (1.0 - y), (1.0 - x) * z, (1.0 - x) * (1.0 - z)]
        }
        TimePair::T13 => {
            // collapse at t1, then evolve through both matrices in sequence
            let m12 = matrix(p.f12());
            let m23 = matrix(p.f23());
            let x = prob_up(&v0);
            let up_evolved = apply_matrix(&m23, &normalize(&apply_matrix(&m12, &UP)));
            let down_evolved = apply_matrix(&m23, &normalize(&apply_matrix(&m12, &DOWN)));
            let y = prob_up(&up_evolved);
            let z = prob_up(&down_evolved);
            [x * y, x * (1.0 - y), (1.0 - x) * z, (1.0 - x) * (1.0 - z)]
        }
        TimePair::T23 => {
            // no measurement at t1: evolve, measure, collapse, evolve
            let m12 = matrix(p.f12());
            let m23 = matrix(p.f23());
            let v2 = normalize(&apply_matrix(&m12, &v0));
            let x = prob_up(&v2);
            let y = branch_prob_up(&m23, &UP);
            let z = branch_prob_up(&m23, &DOWN);
            [x * y, x * (1.0 - y), (1.0 - x) * z, (1.0 - x) * (1.0 - z)]
        }
    }
}

/// Three-time joint probabilities indexed `+++, ++-, +-+, +--, -++, -+-,
/// --+, ---`.
pub fn sv_triple(p: &Protocol) -> [f64; 8] {
    let v0 = initial_amplitudes(p.z1());
    let m12 = matrix(p.f12());
    let m23 = matrix(p.f23());
    let x = prob_up(&v0);
    let y12 = branch_prob_up(&m12, &UP);
    let z12 = branch_prob_up(&m12, &DOWN);
    let y23 = branch_prob_up(&m23, &UP);
    let z23 = branch_prob_up(&m23, &DOWN);

    let mut out = [0.0; 8];
    for (i, slot) in out.iter_mut().enumerate() {
        let m1_plus = i & 4 == 0;
        let m2_plus = i & 2 == 0;
        let m3_plus = i & 1 == 0;
        let p1 = if m1_plus { x } else { 1.0 - x };
        let w12 = if m1_plus { y12 } else { z12 };
        let p2 = if m2_plus { w12 } else { 1.0 - w12 };
        let w23 = if m2_plus { y23 } else { z23 };
        let p3 = if m3_plus { w23 } else { 1.0 - w23 };
        *slot = p1 * p2 * p3;
    }
    out
}

/// Wilful mismatch guard for float comparisons in bulk loops.
pub fn assert_close(got: f64, want: f64, tol: f64, context: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{context}: got {got}, want {want} (diff {})",
        (got - want).abs()
    );
}
