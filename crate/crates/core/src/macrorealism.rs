//! Global three-time joint probabilities and the statistical macrorealism
//! conditions.
//!
//! Arrow-of-time (AoT) conditions state that later measurements leave
//! earlier statistics alone; they hold identically for the product-form
//! probabilities. No-signaling-in-time (NSIT) conditions state the reverse
//! and generally fail: the sum over an intermediate measured outcome need
//! not reproduce the distribution obtained without that measurement. Each
//! condition is reported as a residual (max absolute mismatch over outcome
//! assignments) with a pass flag at a tolerance.

use crate::extended::ExtendedComplex;
use crate::flcmap::{FlcMap, MapError};
use crate::lg::{Outcome, Protocol, TimePair, TimePoint, TwoTimeJoint};
use num_complex::Complex64;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

/// Default tolerance for condition satisfaction; the compared quantities are
/// short products and sums of well-conditioned terms.
pub const CONDITION_TOL: f64 = 1e-10;

/// The eight joint probabilities of measuring at all three times.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(try_from = "RawTriple")]
pub struct TripleJoint {
    probs: [f64; 8],
}

const TRIPLE_KEYS: [&str; 8] = ["+++", "++-", "+-+", "+--", "-++", "-+-", "--+", "---"];

#[derive(Deserialize)]
struct RawTriple(std::collections::BTreeMap<String, f64>);

impl TryFrom<RawTriple> for TripleJoint {
    type Error = String;

    fn try_from(raw: RawTriple) -> Result<Self, String> {
        let mut probs = [0.0; 8];
        for (i, key) in TRIPLE_KEYS.iter().enumerate() {
            probs[i] = *raw
                .0
                .get(*key)
                .ok_or_else(|| format!("missing outcome key {key:?}"))?;
        }
        Ok(TripleJoint { probs })
    }
}

impl Serialize for TripleJoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(8))?;
        for (key, p) in TRIPLE_KEYS.iter().zip(self.probs) {
            map.serialize_entry(key, &p)?;
        }
        map.end()
    }
}

fn idx(m1: Outcome, m2: Outcome, m3: Outcome) -> usize {
    let bit = |m: Outcome| match m {
        Outcome::Plus => 0,
        Outcome::Minus => 1,
    };
    (bit(m1) << 2) | (bit(m2) << 1) | bit(m3)
}

impl TripleJoint {
    pub fn probability(&self, m1: Outcome, m2: Outcome, m3: Outcome) -> f64 {
        self.probs[idx(m1, m2, m3)]
    }

    pub fn as_array(&self) -> [f64; 8] {
        self.probs
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Marginal over the last outcome.
    pub fn marginal_12(&self) -> TwoTimeJoint {
        let p = |m1, m2| {
            self.probability(m1, m2, Outcome::Plus) + self.probability(m1, m2, Outcome::Minus)
        };
        TwoTimeJoint {
            pp: p(Outcome::Plus, Outcome::Plus),
            pm: p(Outcome::Plus, Outcome::Minus),
            mp: p(Outcome::Minus, Outcome::Plus),
            mm: p(Outcome::Minus, Outcome::Minus),
        }
    }

    /// Marginal over the middle outcome.
    pub fn marginal_13(&self) -> TwoTimeJoint {
        let p = |m1, m3| {
            self.probability(m1, Outcome::Plus, m3) + self.probability(m1, Outcome::Minus, m3)
        };
        TwoTimeJoint {
            pp: p(Outcome::Plus, Outcome::Plus),
            pm: p(Outcome::Plus, Outcome::Minus),
            mp: p(Outcome::Minus, Outcome::Plus),
            mm: p(Outcome::Minus, Outcome::Minus),
        }
    }

    /// Marginal over the first outcome.
    pub fn marginal_23(&self) -> TwoTimeJoint {
        let p = |m2, m3| {
            self.probability(Outcome::Plus, m2, m3) + self.probability(Outcome::Minus, m2, m3)
        };
        TwoTimeJoint {
            pp: p(Outcome::Plus, Outcome::Plus),
            pm: p(Outcome::Plus, Outcome::Minus),
            mp: p(Outcome::Minus, Outcome::Plus),
            mm: p(Outcome::Minus, Outcome::Minus),
        }
    }
}

/// Three-time joint distribution with measurements at every time: the first
/// marginal times the branch weight of each collapsed eigenstate under the
/// interval map that follows it.
pub fn triple_joint(p: &Protocol) -> TripleJoint {
    let x = p.z1().weight();
    let (y12, z12) = p.f12().branch_weights();
    let (y23, z23) = p.f23().branch_weights();
    let first = |m: Outcome| match m {
        Outcome::Plus => x,
        Outcome::Minus => 1.0 - x,
    };
    let branch = |(y, z): (f64, f64), from: Outcome, to: Outcome| {
        let w = match from {
            Outcome::Plus => y,
            Outcome::Minus => z,
        };
        match to {
            Outcome::Plus => w,
            Outcome::Minus => 1.0 - w,
        }
    };
    let mut probs = [0.0; 8];
    for m1 in Outcome::BOTH {
        for m2 in Outcome::BOTH {
            for m3 in Outcome::BOTH {
                probs[idx(m1, m2, m3)] =
                    first(m1) * branch((y12, z12), m1, m2) * branch((y23, z23), m2, m3);
            }
        }
    }
    TripleJoint { probs }
}

/// A macrorealism condition, named by the measurement it adds or removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Aot1_2,
    Aot1_3,
    Aot2_3,
    Aot12_3,
    Aot1_23,
    Nsit1_2,
    Nsit2_3,
    Nsit1_3,
    Nsit1_2_3,
    Nsit1_23,
}

impl Condition {
    pub const ALL: [Condition; 10] = [
        Condition::Aot1_2,
        Condition::Aot1_3,
        Condition::Aot2_3,
        Condition::Aot12_3,
        Condition::Aot1_23,
        Condition::Nsit1_2,
        Condition::Nsit2_3,
        Condition::Nsit1_3,
        Condition::Nsit1_2_3,
        Condition::Nsit1_23,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Aot1_2 => "AoT_1(2)",
            Condition::Aot1_3 => "AoT_1(3)",
            Condition::Aot2_3 => "AoT_2(3)",
            Condition::Aot12_3 => "AoT_12(3)",
            Condition::Aot1_23 => "AoT_1(23)",
            Condition::Nsit1_2 => "NSIT_(1)2",
            Condition::Nsit2_3 => "NSIT_(2)3",
            Condition::Nsit1_3 => "NSIT_(1)3",
            Condition::Nsit1_2_3 => "NSIT_1(2)3",
            Condition::Nsit1_23 => "NSIT_(1)23",
        }
    }

    pub fn is_aot(&self) -> bool {
        matches!(
            self,
            Condition::Aot1_2
                | Condition::Aot1_3
                | Condition::Aot2_3
                | Condition::Aot12_3
                | Condition::Aot1_23
        )
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// One checked condition: its worst-case mismatch and the verdict at the
/// tolerance the check ran with.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionRecord {
    pub condition: Condition,
    pub residual: f64,
    pub satisfied: bool,
}

impl ConditionRecord {
    fn new(condition: Condition, residual: f64, tol: f64) -> Self {
        ConditionRecord {
            condition,
            residual,
            satisfied: residual <= tol,
        }
    }
}

/// All condition records of one protocol at one tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct MacrorealismReport {
    pub tolerance: f64,
    pub records: Vec<ConditionRecord>,
}

impl MacrorealismReport {
    pub fn all_satisfied(&self) -> bool {
        self.records.iter().all(|r| r.satisfied)
    }

    pub fn get(&self, condition: Condition) -> Option<&ConditionRecord> {
        self.records.iter().find(|r| r.condition == condition)
    }
}

fn residual2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn residual4(a: &TwoTimeJoint, b: &TwoTimeJoint) -> f64 {
    a.as_array()
        .iter()
        .zip(b.as_array())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn marginal_first(j: &TwoTimeJoint) -> (f64, f64) {
    (j.pp + j.pm, j.mp + j.mm)
}

fn marginal_second(j: &TwoTimeJoint) -> (f64, f64) {
    (j.pp + j.mp, j.pm + j.mm)
}

/// Arrow-of-time conditions: earlier statistics are unchanged by summing out
/// later measurements. Structural identities of the product form, so every
/// residual stays at rounding level.
pub fn check_aot(p: &Protocol, tol: f64) -> Vec<ConditionRecord> {
    let one1 = p.one_time_probs(TimePoint::T1);
    let one2 = p.one_time_probs(TimePoint::T2);
    let j12 = p.joint(TimePair::T12);
    let j13 = p.joint(TimePair::T13);
    let j23 = p.joint(TimePair::T23);
    let triple = triple_joint(p);

    let triple1 = {
        let m = triple.marginal_12();
        marginal_first(&m)
    };

    vec![
        ConditionRecord::new(Condition::Aot1_2, residual2(one1, marginal_first(&j12)), tol),
        ConditionRecord::new(Condition::Aot1_3, residual2(one1, marginal_first(&j13)), tol),
        ConditionRecord::new(Condition::Aot2_3, residual2(one2, marginal_first(&j23)), tol),
        ConditionRecord::new(
            Condition::Aot12_3,
            residual4(&j12, &triple.marginal_12()),
            tol,
        ),
        ConditionRecord::new(Condition::Aot1_23, residual2(one1, triple1), tol),
    ]
}

/// No-signaling-in-time conditions: statistics with an extra earlier
/// measurement, summed over its outcome, against the statistics without it.
pub fn check_nsit(p: &Protocol, tol: f64) -> Vec<ConditionRecord> {
    let one2 = p.one_time_probs(TimePoint::T2);
    let one3 = p.one_time_probs(TimePoint::T3);
    let j12 = p.joint(TimePair::T12);
    let j13 = p.joint(TimePair::T13);
    let j23 = p.joint(TimePair::T23);
    let triple = triple_joint(p);

    vec![
        ConditionRecord::new(
            Condition::Nsit1_2,
            residual2(one2, marginal_second(&j12)),
            tol,
        ),
        ConditionRecord::new(
            Condition::Nsit2_3,
            residual2(one3, marginal_second(&j23)),
            tol,
        ),
        ConditionRecord::new(
            Condition::Nsit1_3,
            residual2(one3, marginal_second(&j13)),
            tol,
        ),
        ConditionRecord::new(
            Condition::Nsit1_2_3,
            residual4(&j13, &triple.marginal_13()),
            tol,
        ),
        ConditionRecord::new(
            Condition::Nsit1_23,
            residual4(&j23, &triple.marginal_23()),
            tol,
        ),
    ]
}

/// Runs every AoT and NSIT condition at the given tolerance.
pub fn macrorealism_report(p: &Protocol, tol: f64) -> MacrorealismReport {
    let mut records = check_aot(p, tol);
    records.extend(check_nsit(p, tol));
    MacrorealismReport {
        tolerance: tol,
        records,
    }
}

/// The coefficient ratios `b/a` of the two symmetric interval maps
/// `(az + b)/(bz + a)`; the pair fully determines the NSIT behaviour of the
/// family.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RatioPair {
    pub first: ExtendedComplex,
    pub second: ExtendedComplex,
}

impl RatioPair {
    pub fn new(first: ExtendedComplex, second: ExtendedComplex) -> Self {
        RatioPair { first, second }
    }

    pub fn finite(first: Complex64, second: Complex64) -> Self {
        RatioPair {
            first: ExtendedComplex::finite(first),
            second: ExtendedComplex::finite(second),
        }
    }

    fn map_for(ratio: ExtendedComplex) -> Result<FlcMap, MapError> {
        match ratio {
            ExtendedComplex::Infinity => FlcMap::symmetric(
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ),
            ExtendedComplex::Finite(l) => FlcMap::symmetric(Complex64::new(1.0, 0.0), l),
        }
    }

    /// The protocol built from the two symmetric maps with these ratios.
    ///
    /// Fails when a ratio sits on the singular locus of the family
    /// (`lambda^2 = 1`).
    pub fn protocol(&self, z1: ExtendedComplex) -> Result<Protocol, MapError> {
        Ok(Protocol::new(
            z1,
            Self::map_for(self.first)?,
            Self::map_for(self.second)?,
        ))
    }
}

fn singular_ratio(ratio: ExtendedComplex) -> bool {
    match ratio {
        ExtendedComplex::Infinity => false,
        ExtendedComplex::Finite(l) => {
            // mirrors the determinant cut of the symmetric map (1, l, l, 1)
            (l * l - Complex64::new(1.0, 0.0)).norm() <= 1e-12 * 1.0_f64.max(l.norm_sqr())
        }
    }
}

/// Closed-form test of the `NSIT_1(2)3` condition for symmetric-map
/// protocols.
///
/// For finite ratios the condition holds exactly when
///
/// ```text
/// Re(l1) Re(l2) (1 - |l1|^2)(1 - |l2|^2) + Im(l1) Im(l2) (1 + |l1|^2)(1 + |l2|^2) = 0
/// ```
///
/// which contains the two one-parameter families `Re(l1) = Im(l2) = 0` and
/// `Re(l2) = Im(l1) = 0` as well as the degenerate solutions where an
/// interval map fixes or exchanges the measurement eigenstates. The returned
/// verdict matches the residual-based [`check_nsit`] at the same tolerance
/// for every initial state; ratios on the singular locus of the family
/// (`lambda = ±1`), where no invertible map exists, report `false`.
pub fn nsit123_analytic(ratios: &RatioPair, tol: f64) -> bool {
    if singular_ratio(ratios.first) || singular_ratio(ratios.second) {
        return false;
    }
    let (l1, l2) = match (ratios.first, ratios.second) {
        // an infinite ratio is a pole exchange, which maps eigenstates to
        // eigenstates and cannot signal
        (ExtendedComplex::Infinity, _) | (_, ExtendedComplex::Infinity) => return true,
        (ExtendedComplex::Finite(l1), ExtendedComplex::Finite(l2)) => (l1, l2),
    };
    let n1 = l1.norm_sqr();
    let n2 = l2.norm_sqr();
    let p = (1.0 + n1) * (1.0 + n2);
    let s = (Complex64::new(1.0, 0.0) + l1 * l2).norm_sqr() + (l1 + l2).norm_sqr();
    let disc = l1.re * l2.re * (1.0 - n1) * (1.0 - n2) + l1.im * l2.im * p;
    2.0 * disc.abs() / (s * p) <= tol
}

/// The two explicit one-parameter solution families: one ratio purely
/// imaginary while the other is purely real. Sufficient for
/// [`nsit123_analytic`], not necessary.
pub fn nsit123_axis_conditions(ratios: &RatioPair, tol: f64) -> bool {
    match (ratios.first, ratios.second) {
        (ExtendedComplex::Finite(l1), ExtendedComplex::Finite(l2)) => {
            (l1.re.abs() <= tol && l2.im.abs() <= tol)
                || (l2.re.abs() <= tol && l1.im.abs() <= tol)
        }
        _ => false,
    }
}

/// The two sides of the `NSIT_1(2)3` comparison for the all-plus outcome, in
/// closed form: `P(+1, +3)` and `P(+,+,+) + P(+,-,+)`.
///
/// `radius` is the modulus of the initial point (`inf` allowed). The pair
/// must match the probability pipeline built from the same ratios whenever
/// the maps exist; equality of these two numbers alone does not certify the
/// condition, which compares all four outcome assignments.
pub fn nsit_closed_forms(ratios: &RatioPair, radius: f64) -> (f64, f64) {
    let x = ExtendedComplex::from_polar(radius, 0.0).weight();

    let z1w = ratios.first.weight();
    let z2w = ratios.second.weight();
    let marginal = x * ((1.0 - z1w) * (1.0 - z2w) + z1w * z2w);

    let y13 = match (ratios.first, ratios.second) {
        (ExtendedComplex::Infinity, ExtendedComplex::Infinity) => 1.0,
        (ExtendedComplex::Infinity, other) | (other, ExtendedComplex::Infinity) => other.weight(),
        (ExtendedComplex::Finite(l1), ExtendedComplex::Finite(l2)) => {
            let num = (Complex64::new(1.0, 0.0) + l1 * l2).norm_sqr();
            let den = num + (l1 + l2).norm_sqr();
            if den == 0.0 {
                // both moduli vanish only for l1 = l2 = 0 (num = 1), so this
                // is unreachable for finite inputs
                1.0
            } else {
                num / den
            }
        }
    };
    (x * y13, marginal)
}
