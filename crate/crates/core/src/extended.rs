//! The extended complex plane and its correspondence with pure qubit states.
//!
//! Stereographic projection identifies the Bloch sphere with the Riemann
//! sphere: a normalized state `(z1, z2)` corresponds to the point
//! `z = z1/z2`, with the basis state `(1, 0)` sitting at the point at
//! infinity. Everything downstream (joint probabilities, correlation
//! factors) consumes points through [`ExtendedComplex::weight`], which is
//! total on the sphere, so zero coefficients in map denominators never need
//! special-casing.

use num_complex::Complex64;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::TAU;
use std::fmt;
use thiserror::Error;

/// Relative threshold below which the second amplitude counts as zero when
/// projecting a state onto the sphere. The projection is singular there, so
/// a hard cut keeps it deterministic.
const PROJECTION_EPS: f64 = 1e-14;

/// A point on the extended complex plane: a finite complex number or the
/// single unsigned point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtendedComplex {
    pub const ZERO: ExtendedComplex = ExtendedComplex::Finite(Complex64::new(0.0, 0.0));
    pub const ONE: ExtendedComplex = ExtendedComplex::Finite(Complex64::new(1.0, 0.0));

    /// Wraps a complex value. Infinite components collapse onto the point at
    /// infinity; NaN is not a point on the sphere.
    pub fn finite(value: Complex64) -> Self {
        assert!(
            !value.re.is_nan() && !value.im.is_nan(),
            "NaN is not a point on the extended complex plane"
        );
        if value.re.is_infinite() || value.im.is_infinite() {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(value)
        }
    }

    /// Point `modulus * exp(i * phase)`; an infinite modulus gives the point
    /// at infinity.
    pub fn from_polar(modulus: f64, phase: f64) -> Self {
        assert!(modulus >= 0.0, "modulus must be non-negative");
        if modulus.is_infinite() {
            return ExtendedComplex::Infinity;
        }
        assert!(phase.is_finite(), "phase must be finite");
        ExtendedComplex::Finite(Complex64::from_polar(modulus, phase))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    /// The finite value, if there is one.
    pub fn value(&self) -> Option<Complex64> {
        match self {
            ExtendedComplex::Finite(z) => Some(*z),
            ExtendedComplex::Infinity => None,
        }
    }

    pub fn modulus(&self) -> f64 {
        match self {
            ExtendedComplex::Finite(z) => z.norm(),
            ExtendedComplex::Infinity => f64::INFINITY,
        }
    }

    /// `|z|^2 / (|z|^2 + 1)`, extended by `weight(inf) = 1`.
    ///
    /// This is the excited-state population of the corresponding qubit state
    /// and the recurring branch-weight factor of the joint probabilities.
    /// Monotone in `|z|`, zero at the origin, one at infinity.
    pub fn weight(&self) -> f64 {
        match self {
            ExtendedComplex::Infinity => 1.0,
            ExtendedComplex::Finite(z) => {
                let m = z.norm();
                if m > 1.0 {
                    let t = 1.0 / m;
                    1.0 / (1.0 + t * t)
                } else {
                    let s = m * m;
                    s / (s + 1.0)
                }
            }
        }
    }

    /// Inverse stereographic projection: the normalized state `(z, 1)` for a
    /// finite point, `(1, 0)` for the point at infinity.
    pub fn to_state(&self) -> QubitState {
        match self {
            ExtendedComplex::Infinity => QubitState::up(),
            ExtendedComplex::Finite(z) => {
                let m = z.norm();
                if m > 1.0 {
                    // factor |z| out of the normalization to avoid overflow
                    let t = 1.0 / m;
                    let head = 1.0 / (1.0 + t * t).sqrt();
                    QubitState {
                        up: (z / m) * head,
                        down: Complex64::new(t * head, 0.0),
                    }
                } else {
                    let n = 1.0 / (1.0 + m * m).sqrt();
                    QubitState {
                        up: z * n,
                        down: Complex64::new(n, 0.0),
                    }
                }
            }
        }
    }

    /// Chordal distance between two points of the sphere (diameter 2).
    ///
    /// Total and overflow-safe: invariant under `z -> 1/z`, which is used to
    /// bring both arguments into the unit disk.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        use ExtendedComplex::*;
        match (self, other) {
            (Infinity, Infinity) => 0.0,
            (Infinity, Finite(w)) | (Finite(w), Infinity) => {
                let m = w.norm();
                if m > 1.0 {
                    let t = 1.0 / m;
                    2.0 * t / (1.0 + t * t).sqrt()
                } else {
                    2.0 / (1.0 + m * m).sqrt()
                }
            }
            (Finite(z), Finite(w)) => {
                let (mut z, mut w) = (*z, *w);
                if z.norm() > 1.0 && w.norm() > 1.0 {
                    (z, w) = (z.inv(), w.inv());
                }
                if w.norm() > z.norm() {
                    std::mem::swap(&mut z, &mut w);
                }
                // now |w| <= 1 and |w| <= |z|
                let mz = z.norm();
                if mz <= 1.0 {
                    2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
                } else {
                    let t = 1.0 / mz;
                    let lead = (Complex64::new(1.0, 0.0) - w / z).norm();
                    2.0 * lead / ((t * t + 1.0) * (1.0 + w.norm_sqr())).sqrt()
                }
            }
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(value: Complex64) -> Self {
        ExtendedComplex::finite(value)
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedComplex::Finite(z) => write!(f, "{}", z),
            ExtendedComplex::Infinity => write!(f, "inf"),
        }
    }
}

// A point serializes in the polar form used by protocol files:
// `{"r": 2.0, "phi": 0.5}` for finite points and the string `"inf"` for the
// point at infinity.
impl Serialize for ExtendedComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedComplex::Infinity => serializer.serialize_str("inf"),
            ExtendedComplex::Finite(z) => {
                let mut phi = z.arg();
                if phi < 0.0 {
                    phi += TAU;
                }
                let mut s = serializer.serialize_struct("ExtendedComplex", 2)?;
                s.serialize_field("r", &z.norm())?;
                s.serialize_field("phi", &phi)?;
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = ExtendedComplex;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"inf\" or an object {\"r\": <f64>, \"phi\": <f64>}")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                if v == "inf" {
                    Ok(ExtendedComplex::Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut r: Option<f64> = None;
                let mut phi: Option<f64> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "r" => r = Some(map.next_value()?),
                        "phi" => phi = Some(map.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(other, &["r", "phi"]));
                        }
                    }
                }
                let r = r.ok_or_else(|| de::Error::missing_field("r"))?;
                let phi = phi.ok_or_else(|| de::Error::missing_field("phi"))?;
                if r.is_nan() || r < 0.0 {
                    return Err(de::Error::custom("\"r\" must be in [0, inf]"));
                }
                if r.is_infinite() {
                    return Ok(ExtendedComplex::Infinity);
                }
                if !phi.is_finite() {
                    return Err(de::Error::custom("\"phi\" must be finite"));
                }
                Ok(ExtendedComplex::from_polar(r, phi))
            }
        }

        deserializer.deserialize_any(PointVisitor)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("state amplitudes must be finite")]
    NonFinite,
    #[error("state amplitudes are too small to normalize")]
    ZeroNorm,
}

/// A normalized pure qubit state.
///
/// The two amplitudes refer to the eigenbasis of the dichotomic observable:
/// `up` is the `+1` eigenstate `(1, 0)` (the point at infinity), `down` the
/// `-1` eigenstate `(0, 1)` (the origin). The global phase carries no
/// physical content; every exposed predicate is invariant under it.
#[derive(Debug, Clone, Copy)]
pub struct QubitState {
    up: Complex64,
    down: Complex64,
}

impl QubitState {
    /// Normalizes `(up, down)` to a unit state.
    pub fn new(up: Complex64, down: Complex64) -> Result<Self, StateError> {
        if !(up.re.is_finite() && up.im.is_finite() && down.re.is_finite() && down.im.is_finite())
        {
            return Err(StateError::NonFinite);
        }
        let norm = up.norm().hypot(down.norm());
        if norm < 1e-150 {
            return Err(StateError::ZeroNorm);
        }
        Ok(QubitState {
            up: up / norm,
            down: down / norm,
        })
    }

    /// The `+1` eigenstate `(1, 0)`.
    pub fn up() -> Self {
        QubitState {
            up: Complex64::new(1.0, 0.0),
            down: Complex64::new(0.0, 0.0),
        }
    }

    /// The `-1` eigenstate `(0, 1)`.
    pub fn down() -> Self {
        QubitState {
            up: Complex64::new(0.0, 0.0),
            down: Complex64::new(1.0, 0.0),
        }
    }

    pub fn up_amplitude(&self) -> Complex64 {
        self.up
    }

    pub fn down_amplitude(&self) -> Complex64 {
        self.down
    }

    /// Probability of the `+1` outcome.
    pub fn prob_up(&self) -> f64 {
        self.up.norm_sqr()
    }

    /// Stereographic projection `up/down`; the point at infinity when the
    /// second amplitude vanishes (relative cut at `1e-14`).
    pub fn to_point(&self) -> ExtendedComplex {
        if self.down.norm() <= PROJECTION_EPS * self.up.norm() {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(self.up / self.down)
        }
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    /// `|<self|other>|`, i.e. the overlap of the two rays.
    pub fn overlap(&self, other: &QubitState) -> f64 {
        self.inner(other).norm()
    }

    /// Whether the two states are the same ray (equal up to global phase).
    pub fn same_ray(&self, other: &QubitState, tol: f64) -> bool {
        1.0 - self.overlap(other) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_states_project_to_poles() {
        assert_eq!(QubitState::down().to_point(), ExtendedComplex::ZERO);
        assert!(QubitState::up().to_point().is_infinite());
    }

    #[test]
    fn equal_superposition_projects_to_one() {
        let psi = QubitState::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        let z = psi.to_point().value().unwrap();
        assert!((z - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn poles_lift_to_basis_states() {
        let down = ExtendedComplex::ZERO.to_state();
        assert!((down.up_amplitude().norm()) < 1e-15);
        assert!((down.down_amplitude() - c(1.0, 0.0)).norm() < 1e-15);

        let up = ExtendedComplex::Infinity.to_state();
        assert!((up.up_amplitude() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(up.down_amplitude().norm() < 1e-15);
    }

    #[test]
    fn unit_point_lifts_to_equal_superposition() {
        let psi = ExtendedComplex::ONE.to_state();
        assert!((psi.up_amplitude() - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((psi.down_amplitude() - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn weight_pins() {
        assert_eq!(ExtendedComplex::ZERO.weight(), 0.0);
        assert_eq!(ExtendedComplex::Infinity.weight(), 1.0);
        assert!((ExtendedComplex::ONE.weight() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weight_is_monotone_and_stable_at_extremes() {
        let small = ExtendedComplex::from_polar(1e-200, 0.3).weight();
        let large = ExtendedComplex::from_polar(1e200, 0.3).weight();
        assert!(small >= 0.0 && small < 1e-100);
        assert!(large <= 1.0 && large >= 1.0 - 1e-15);
        let mut prev = -1.0;
        for k in 0..60 {
            let w = ExtendedComplex::from_polar(10f64.powi(k - 30), 1.0).weight();
            assert!(w >= prev);
            prev = w;
        }
    }

    #[test]
    fn projection_cut_on_tiny_second_amplitude() {
        let psi = QubitState::new(c(1.0, 0.0), c(1e-16, 0.0)).unwrap();
        assert!(psi.to_point().is_infinite());
    }

    #[test]
    fn zero_state_is_rejected() {
        assert!(matches!(
            QubitState::new(c(0.0, 0.0), c(0.0, 0.0)),
            Err(StateError::ZeroNorm)
        ));
        assert!(matches!(
            QubitState::new(c(f64::NAN, 0.0), c(1.0, 0.0)),
            Err(StateError::NonFinite)
        ));
    }

    #[test]
    fn chordal_distance_handles_infinity() {
        let d = ExtendedComplex::Infinity.chordal_distance(&ExtendedComplex::ZERO);
        assert!((d - 2.0).abs() < 1e-15);
        assert_eq!(
            ExtendedComplex::Infinity.chordal_distance(&ExtendedComplex::Infinity),
            0.0
        );
        let near = ExtendedComplex::from_polar(1e300, 0.1);
        assert!(near.chordal_distance(&ExtendedComplex::Infinity) < 1e-290);
    }

    #[test]
    fn polar_serde_round_trip() {
        let p = ExtendedComplex::from_polar(2.5, 1.25);
        let json = serde_json::to_string(&p).unwrap();
        let back: ExtendedComplex = serde_json::from_str(&json).unwrap();
        assert!(p.chordal_distance(&back) < 1e-15);

        let inf: ExtendedComplex = serde_json::from_str("\"inf\"").unwrap();
        assert!(inf.is_infinite());
        assert_eq!(serde_json::to_string(&inf).unwrap(), "\"inf\"");

        assert!(serde_json::from_str::<ExtendedComplex>("{\"r\": -1.0, \"phi\": 0.0}").is_err());
    }
}
