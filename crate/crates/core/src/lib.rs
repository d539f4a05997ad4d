//! Discrete-time qubit dynamics induced by fractional linear conformal
//! (Möbius) maps on the extended complex plane.
//!
//! A pure qubit state corresponds to a point on the Riemann sphere through
//! stereographic projection; applying a Möbius map to that point is one step
//! of (generally non-unitary, possibly non-linear) evolution. This crate
//! implements:
//!
//! * [`ExtendedComplex`] / [`QubitState`] — the sphere/state correspondence,
//! * [`FlcMap`] — the map type: application, composition, classification of
//!   its Hilbert-space action and the ratio constraint that governs the
//!   Lüders bound,
//! * [`Protocol`] — the three-time measure/evolve/measure scheme with its
//!   joint probabilities, two-time correlations and the Leggett-Garg
//!   parameter K3,
//! * [`macrorealism`] — the global three-time distribution and the
//!   no-signaling-in-time / arrow-of-time condition checkers,
//! * [`sweep`] — parameter sweeps, K3 maximization over map families and
//!   the search for Lüders-bound violations.

pub mod extended;
pub mod flcmap;
pub mod lg;
pub mod macrorealism;
pub mod sweep;

pub use extended::{ExtendedComplex, QubitState, StateError};
pub use flcmap::{FlcMap, MapClass, MapError, PauliParams};
pub use lg::{
    k3_ratio_constrained, CorrelationFactors, LgResult, Outcome, Protocol, T2Marginal, TimePair,
    TimePoint, TwoTimeJoint,
};
pub use macrorealism::{
    check_aot, check_nsit, macrorealism_report, nsit123_analytic, nsit123_axis_conditions,
    nsit_closed_forms, triple_joint, Condition, ConditionRecord, MacrorealismReport, RatioPair,
    TripleJoint,
};
pub use sweep::{
    constrained_k3, luders_violation_search, optimal_k3_surface, unitary_k3, ConstrainedParams,
    SweepConfig, SweepError, SweepFamily, SweepPoint, SweepResult, UnitaryAngles, Witness,
};
