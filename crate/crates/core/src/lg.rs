//! The three-time measurement protocol and its temporal correlations.
//!
//! A protocol fixes an initial point `z1`, an evolution map `f12` for the
//! first interval and `f23` for the second; the composite `f13 = f23 ∘ f12`
//! is derived, never supplied. Measurements project onto the `±1`
//! eigenstates of the dichotomic observable (the poles of the sphere), the
//! collapsed eigenstate is evolved by the interval map and renormalized, and
//! the resulting product-form joint probabilities assemble the two-time
//! correlations and the Leggett-Garg parameter `K3 = C12 + C23 - C13`.

use crate::extended::ExtendedComplex;
use crate::flcmap::FlcMap;
use serde::{Deserialize, Serialize};

/// A measurement outcome of the dichotomic observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

/// One of the three measurement times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimePoint {
    T1,
    T2,
    T3,
}

/// An ordered pair of measurement times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimePair {
    T12,
    T23,
    T13,
}

/// Which marginal weights the first outcome of the `(t2, t3)` pair.
///
/// The explicit product-form probabilities weight it with the state evolved
/// (unmeasured) to `t2`; the compact correlation factors are sometimes
/// written with the initial-state weight instead. The evolved convention is
/// the operational default; the initial-state one is kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum T2Marginal {
    #[default]
    Evolved,
    Initial,
}

/// The factors `(x, y, z)` of a two-time correlation:
/// `C = 1 - 2z + 2x(y + z - 1)`.
///
/// `x` is the excited-state weight of the state measured first, `y` and `z`
/// the branch weights of the interval map applied to the two collapsed
/// eigenstates. All lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorrelationFactors {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CorrelationFactors {
    /// Closed-form correlation `1 - 2z + 2x(y + z - 1)`.
    pub fn correlation(&self) -> f64 {
        1.0 - 2.0 * self.z + 2.0 * self.x * (self.y + self.z - 1.0)
    }
}

/// The four joint probabilities of a two-time measurement.
#[derive(Debug, Clone, Copy)]
pub struct TwoTimeJoint {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl TwoTimeJoint {
    /// Assembles the joint from the first-time marginal `x` and the branch
    /// weights `(y, z)` of the interval map.
    pub fn from_weights(x: f64, y: f64, z: f64) -> Self {
        TwoTimeJoint {
            pp: x * y,
            pm: x * (1.0 - y),
            mp: (1.0 - x) * z,
            mm: (1.0 - x) * (1.0 - z),
        }
    }

    pub fn probability(&self, first: Outcome, second: Outcome) -> f64 {
        match (first, second) {
            (Outcome::Plus, Outcome::Plus) => self.pp,
            (Outcome::Plus, Outcome::Minus) => self.pm,
            (Outcome::Minus, Outcome::Plus) => self.mp,
            (Outcome::Minus, Outcome::Minus) => self.mm,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.pp, self.pm, self.mp, self.mm]
    }

    pub fn sum(&self) -> f64 {
        self.pp + self.pm + self.mp + self.mm
    }

    /// Signed expectation of the product of the two outcomes.
    pub fn correlation(&self) -> f64 {
        self.pp + self.mm - self.pm - self.mp
    }
}

/// Correlations and the Leggett-Garg parameter of one protocol.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LgResult {
    #[serde(rename = "C12")]
    pub c12: f64,
    #[serde(rename = "C23")]
    pub c23: f64,
    #[serde(rename = "C13")]
    pub c13: f64,
    #[serde(rename = "K3")]
    pub k3: f64,
}

/// `K3 = 1 - 2*z12 - 2*z23 + 2*z13`, the form the parameter takes when every
/// interval map satisfies the ratio constraint (`y + z = 1` per pair). The
/// inputs are the `z` branch weights of the three pairs.
pub fn k3_ratio_constrained(z12: f64, z23: f64, z13: f64) -> f64 {
    1.0 - 2.0 * z12 - 2.0 * z23 + 2.0 * z13
}

#[derive(Serialize, Deserialize)]
struct RawProtocol {
    z1: ExtendedComplex,
    f12: FlcMap,
    f23: FlcMap,
}

/// A three-time protocol: initial point and the two interval maps.
///
/// The composite map is always the exact coefficient composition of the two
/// interval maps and cannot be set independently.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(from = "RawProtocol", into = "RawProtocol")]
pub struct Protocol {
    z1: ExtendedComplex,
    f12: FlcMap,
    f23: FlcMap,
    f13: FlcMap,
}

impl From<RawProtocol> for Protocol {
    fn from(raw: RawProtocol) -> Self {
        Protocol::new(raw.z1, raw.f12, raw.f23)
    }
}

impl From<Protocol> for RawProtocol {
    fn from(p: Protocol) -> Self {
        RawProtocol {
            z1: p.z1,
            f12: p.f12,
            f23: p.f23,
        }
    }
}

impl Protocol {
    pub fn new(z1: ExtendedComplex, f12: FlcMap, f23: FlcMap) -> Self {
        let f13 = f12.then(&f23);
        Protocol { z1, f12, f23, f13 }
    }

    pub fn z1(&self) -> ExtendedComplex {
        self.z1
    }

    pub fn f12(&self) -> &FlcMap {
        &self.f12
    }

    pub fn f23(&self) -> &FlcMap {
        &self.f23
    }

    /// The composite evolution over both intervals.
    pub fn f13(&self) -> &FlcMap {
        &self.f13
    }

    pub fn map(&self, pair: TimePair) -> &FlcMap {
        match pair {
            TimePair::T12 => &self.f12,
            TimePair::T23 => &self.f23,
            TimePair::T13 => &self.f13,
        }
    }

    /// Same protocol, different initial point.
    pub fn with_initial_point(&self, z1: ExtendedComplex) -> Protocol {
        Protocol { z1, ..*self }
    }

    /// Excited-state weight of the (unmeasured) state at a given time.
    fn marginal_weight(&self, at: TimePoint) -> f64 {
        match at {
            TimePoint::T1 => self.z1.weight(),
            TimePoint::T2 => self.f12.apply(self.z1).weight(),
            TimePoint::T3 => self.f13.apply(self.z1).weight(),
        }
    }

    /// `(P(+), P(-))` of a single measurement at the given time, with no
    /// earlier measurement performed.
    pub fn one_time_probs(&self, at: TimePoint) -> (f64, f64) {
        let w = self.marginal_weight(at);
        (w, 1.0 - w)
    }

    /// Correlation factors of a pair under the default (evolved) `t2`
    /// weighting.
    pub fn factors(&self, pair: TimePair) -> CorrelationFactors {
        self.factors_with(pair, T2Marginal::default())
    }

    pub fn factors_with(&self, pair: TimePair, t2: T2Marginal) -> CorrelationFactors {
        let x = match (pair, t2) {
            (TimePair::T23, T2Marginal::Evolved) => self.marginal_weight(TimePoint::T2),
            _ => self.z1.weight(),
        };
        let (y, z) = self.map(pair).branch_weights();
        CorrelationFactors { x, y, z }
    }

    /// Two-time joint probabilities of a pair. The first measurement
    /// collapses the state onto an eigenstate, which the interval map then
    /// evolves; for the `(t2, t3)` pair the first marginal comes from the
    /// state evolved (unmeasured) to `t2`.
    pub fn joint(&self, pair: TimePair) -> TwoTimeJoint {
        self.joint_with(pair, T2Marginal::default())
    }

    pub fn joint_with(&self, pair: TimePair, t2: T2Marginal) -> TwoTimeJoint {
        let f = self.factors_with(pair, t2);
        TwoTimeJoint::from_weights(f.x, f.y, f.z)
    }

    /// Correlations and `K3 = C12 + C23 - C13`.
    pub fn k3(&self) -> LgResult {
        self.k3_with(T2Marginal::default())
    }

    pub fn k3_with(&self, t2: T2Marginal) -> LgResult {
        let c12 = self.joint(TimePair::T12).correlation();
        let c23 = self.joint_with(TimePair::T23, t2).correlation();
        let c13 = self.joint(TimePair::T13).correlation();
        LgResult {
            c12,
            c23,
            c13,
            k3: c12 + c23 - c13,
        }
    }
}
