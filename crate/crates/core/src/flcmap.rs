//! Fractional linear conformal maps: application, composition, projective
//! classification of the induced Hilbert-space action, the ratio constraint,
//! and the non-linearity witness.
//!
//! A map `f(z) = (az + b)/(cz + d)` with `ad - bc != 0` acts bijectively on
//! the extended complex plane. On states it acts as the 2x2 matrix
//! `[[a, b], [c, d]]` followed by renormalization; coefficients are
//! projective (any nonzero complex rescaling is the same map).

use crate::extended::{ExtendedComplex, QubitState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative determinant threshold below which a coefficient matrix counts as
/// singular.
const DET_EPS: f64 = 1e-12;

/// Relative tolerance for the structural tests used by classification; two
/// multiplications away from machine precision.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("map coefficients must be finite")]
    NonFiniteCoefficients,
    #[error("a*d - b*c vanishes: the coefficients do not define an invertible map")]
    SingularCoefficients,
}

#[derive(Serialize, Deserialize)]
struct RawCoefficients {
    a: [f64; 2],
    b: [f64; 2],
    c: [f64; 2],
    d: [f64; 2],
}

/// A fractional linear conformal map `z -> (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(try_from = "RawCoefficients", into = "RawCoefficients")]
pub struct FlcMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl TryFrom<RawCoefficients> for FlcMap {
    type Error = MapError;

    fn try_from(raw: RawCoefficients) -> Result<Self, MapError> {
        let f = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        FlcMap::new(f(raw.a), f(raw.b), f(raw.c), f(raw.d))
    }
}

impl From<FlcMap> for RawCoefficients {
    fn from(m: FlcMap) -> Self {
        let f = |z: Complex64| [z.re, z.im];
        RawCoefficients {
            a: f(m.a),
            b: f(m.b),
            c: f(m.c),
            d: f(m.d),
        }
    }
}

impl FlcMap {
    /// Builds a map from its four coefficients.
    ///
    /// Rejects non-finite coefficients and matrices whose determinant is
    /// smaller than `1e-12` relative to the squared largest coefficient.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, MapError> {
        for z in [a, b, c, d] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(MapError::NonFiniteCoefficients);
            }
        }
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        let det = a * d - b * c;
        if scale == 0.0 || det.norm() <= DET_EPS * scale * scale {
            return Err(MapError::SingularCoefficients);
        }
        Ok(FlcMap { a, b, c, d })
    }

    pub fn identity() -> Self {
        FlcMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// The map `z -> 1/z`, which exchanges the two poles of the sphere.
    pub fn inversion() -> Self {
        FlcMap {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(1.0, 0.0),
            c: Complex64::new(1.0, 0.0),
            d: Complex64::new(0.0, 0.0),
        }
    }

    /// `(alpha z + beta) / (beta z + alpha)` — the coefficient-symmetric
    /// family. Singular exactly when `beta = ±alpha`.
    pub fn symmetric(alpha: Complex64, beta: Complex64) -> Result<Self, MapError> {
        FlcMap::new(alpha, beta, beta, alpha)
    }

    /// `(alpha z + beta) / (beta* z + alpha*)`. Singular exactly when
    /// `|alpha| = |beta|`.
    pub fn conjugate_symmetric(alpha: Complex64, beta: Complex64) -> Result<Self, MapError> {
        FlcMap::new(alpha, beta, beta.conj(), alpha.conj())
    }

    /// The unitary map with `a = cos(theta) e^{i phase_a}`,
    /// `b = sin(theta) e^{i phase_b}`, `c = -b*`, `d = a*`.
    pub fn unitary(theta: f64, phase_a: f64, phase_b: f64) -> Self {
        let a = Complex64::from_polar(theta.cos(), phase_a);
        let b = Complex64::from_polar(theta.sin(), phase_b);
        FlcMap {
            a,
            b,
            c: -b.conj(),
            d: a.conj(),
        }
    }

    /// Builds the map of the operator `s*I + x*sigma_x + y*sigma_y +
    /// z*sigma_z`, i.e. coefficients `(s + z, x - iy, x + iy, s - z)`.
    pub fn from_pauli(p: &PauliParams) -> Result<Self, MapError> {
        let i = Complex64::i();
        FlcMap::new(
            p.scalar + p.z,
            p.x - i * p.y,
            p.x + i * p.y,
            p.scalar - p.z,
        )
    }

    /// Expands the coefficient matrix in the basis `{I, sigma_x, sigma_y,
    /// sigma_z}`; inverse of [`FlcMap::from_pauli`].
    pub fn to_pauli(&self) -> PauliParams {
        let half = Complex64::new(0.5, 0.0);
        let neg_half_i = Complex64::new(0.0, -0.5);
        PauliParams {
            scalar: (self.a + self.d) * half,
            x: (self.b + self.c) * half,
            y: (self.b - self.c) * neg_half_i,
            z: (self.a - self.d) * half,
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Applies the map to a point of the extended plane. Total: poles go to
    /// the point at infinity, which in turn goes to `a/c`.
    pub fn apply(&self, z: ExtendedComplex) -> ExtendedComplex {
        match z {
            ExtendedComplex::Infinity => ratio_point(self.a, self.c),
            ExtendedComplex::Finite(z) => {
                if z.norm() > 1.0 {
                    // evaluate in reciprocal coordinates for stability
                    let w = z.inv();
                    ratio_point(self.a + self.b * w, self.c + self.d * w)
                } else {
                    ratio_point(self.a * z + self.b, self.c * z + self.d)
                }
            }
        }
    }

    /// Acts on a state with the coefficient matrix and renormalizes.
    ///
    /// Agrees with `apply` through stereographic projection up to global
    /// phase.
    pub fn apply_to_state(&self, psi: &QubitState) -> QubitState {
        let scale = self
            .a
            .norm()
            .max(self.b.norm())
            .max(self.c.norm())
            .max(self.d.norm());
        let (a, b, c, d) = (
            self.a / scale,
            self.b / scale,
            self.c / scale,
            self.d / scale,
        );
        let up = a * psi.up_amplitude() + b * psi.down_amplitude();
        let down = c * psi.up_amplitude() + d * psi.down_amplitude();
        QubitState::new(up, down).expect("an invertible map cannot annihilate a state")
    }

    /// Composition `next ∘ self`: first `self`, then `next`.
    ///
    /// The returned coefficients are exactly the matrix product of the two
    /// coefficient matrices (no rescaling), so determinants multiply and the
    /// result is always a valid map.
    pub fn then(&self, next: &FlcMap) -> FlcMap {
        let f = self;
        let g = next;
        FlcMap {
            a: f.a * g.a + f.c * g.b,
            b: f.b * g.a + f.d * g.b,
            c: f.a * g.c + f.c * g.d,
            d: f.b * g.c + f.d * g.d,
        }
    }

    /// Whether two maps agree up to an overall nonzero complex factor.
    pub fn projectively_eq(&self, other: &FlcMap, tol: f64) -> bool {
        let x = self.coefficients();
        let y = other.coefficients();
        let sx = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let sy = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (x[i] * y[j] - x[j] * y[i]).norm() > tol * sx * sy {
                    return false;
                }
            }
        }
        true
    }

    /// Classifies the Hilbert-space action of the coefficient matrix.
    ///
    /// The representative is first normalized to unit determinant; if it then
    /// has the structure `d = a*`, `c = -b*` (within `1e-10`), the action is
    /// linear: unitary when `|a|^2 + |b|^2 = 1` for the coefficients as
    /// given, and unitary-composed-with-scaling otherwise (with that sum as
    /// the reported scale). Anything else acts non-linearly on rays.
    pub fn classify(&self) -> MapClass {
        let s = self.determinant().sqrt();
        let (a, b, c, d) = (self.a / s, self.b / s, self.c / s, self.d / s);
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        let tol = STRUCTURE_TOL * scale;
        // the structure test is invariant under negating all four
        // coefficients, so one branch covers both square roots
        if (d - a.conj()).norm() <= tol && (c + b.conj()).norm() <= tol {
            let r = self.a.norm_sqr() + self.b.norm_sqr();
            if (r - 1.0).abs() <= STRUCTURE_TOL * (1.0 + r) {
                MapClass::Unitary
            } else {
                MapClass::UnitaryScaled { r }
            }
        } else {
            MapClass::NonLinear
        }
    }

    /// Deviation of the normalized action from linearity on a superposition.
    ///
    /// Compares the normalized image of `eta1 |b1> + eta2 |b2>` with the
    /// normalized superposition of the normalized images of the basis
    /// states, minimized over the relative global phase (both sides are
    /// rays). Zero for any linear (unitary or scaled-unitary) action,
    /// generically positive otherwise. The weights must satisfy
    /// `|eta1|^2 + |eta2|^2 = 1` and the basis must be orthonormal.
    pub fn nonlinearity_witness(
        &self,
        weights: (Complex64, Complex64),
        basis: (&QubitState, &QubitState),
    ) -> f64 {
        let (eta1, eta2) = weights;
        debug_assert!(
            (eta1.norm_sqr() + eta2.norm_sqr() - 1.0).abs() < 1e-9,
            "superposition weights must be normalized"
        );
        debug_assert!(
            basis.0.overlap(basis.1) < 1e-9,
            "basis states must be orthogonal"
        );
        let superposed = QubitState::new(
            eta1 * basis.0.up_amplitude() + eta2 * basis.1.up_amplitude(),
            eta1 * basis.0.down_amplitude() + eta2 * basis.1.down_amplitude(),
        )
        .expect("orthonormal combination is normalizable");

        let lhs = self.apply_to_state(&superposed);
        let img1 = self.apply_to_state(basis.0);
        let img2 = self.apply_to_state(basis.1);
        let rhs = QubitState::new(
            eta1 * img1.up_amplitude() + eta2 * img2.up_amplitude(),
            eta1 * img1.down_amplitude() + eta2 * img2.down_amplitude(),
        )
        .expect("images of independent states stay independent");

        // align the relative global phase, then take the difference norm
        // directly; the aligned form keeps full precision near zero, where
        // sqrt(2 - 2|<L|R>|) would not
        let ip = lhs.inner(&rhs);
        let alignment = if ip.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            ip.conj() / ip.norm()
        };
        let d_up = lhs.up_amplitude() - alignment * rhs.up_amplitude();
        let d_down = lhs.down_amplitude() - alignment * rhs.down_amplitude();
        d_up.norm().hypot(d_down.norm())
    }

    /// Whether `|a||b| = |c||d|` within the relative tolerance.
    ///
    /// This is the cross-multiplied form of `|a/c| = |d/b|` and is
    /// equivalent to the branch weights satisfying `y + z = 1`; stated this
    /// way it needs no division, so zero coefficients are handled without
    /// special cases.
    pub fn satisfies_ratio_constraint(&self, tol: f64) -> bool {
        let p = self.a.norm() * self.b.norm();
        let q = self.c.norm() * self.d.norm();
        (p - q).abs() <= tol * p.max(q)
    }

    /// Branch weights `(y, z)` of the map: the excited-state weight of the
    /// image of each pole, `y = weight(f(inf))`, `z = weight(f(0))`.
    pub fn branch_weights(&self) -> (f64, f64) {
        (
            self.apply(ExtendedComplex::Infinity).weight(),
            self.apply(ExtendedComplex::ZERO).weight(),
        )
    }
}

fn ratio_point(num: Complex64, den: Complex64) -> ExtendedComplex {
    if den.norm_sqr() == 0.0 {
        return ExtendedComplex::Infinity;
    }
    let q = num / den;
    if q.re.is_finite() && q.im.is_finite() {
        ExtendedComplex::Finite(q)
    } else {
        ExtendedComplex::Infinity
    }
}

/// The class of the Hilbert-space action induced by a coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapClass {
    /// Norm-preserving linear action.
    Unitary,
    /// A unitary composed with a positive scaling `sqrt(r)`; acts like the
    /// unitary on normalized states.
    UnitaryScaled { r: f64 },
    /// The action on rays fails superposition after normalization.
    NonLinear,
}

impl MapClass {
    /// Whether the normalized action is linear (unitary or scaled unitary).
    pub fn is_linear(&self) -> bool {
        !matches!(self, MapClass::NonLinear)
    }

    /// The scale factor `r` for the linear classes (`1` for unitary).
    pub fn scale(&self) -> Option<f64> {
        match self {
            MapClass::Unitary => Some(1.0),
            MapClass::UnitaryScaled { r } => Some(*r),
            MapClass::NonLinear => None,
        }
    }
}

/// Coefficients of a 2x2 operator in the basis `{I, sigma_x, sigma_y,
/// sigma_z}`.
#[derive(Debug, Clone, Copy)]
pub struct PauliParams {
    pub scalar: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl PauliParams {
    pub fn new(scalar: Complex64, x: Complex64, y: Complex64, z: Complex64) -> Self {
        PauliParams { scalar, x, y, z }
    }
}
