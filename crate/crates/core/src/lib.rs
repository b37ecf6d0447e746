//! Construction and numerical verification of Parseval wavelet frames built
//! from refinable masks under arbitrary expansive integer dilations.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: dilation matrices and coset representatives.
//! * [`filters`]: periodic filters, bracket products and zero-set masks.
//! * [`refinable`]: refinable profiles via the truncated infinite product.
//! * [`extension`]: unitary/oblique extension principle checks, completion and
//!   framelet construction.
//! * [`frame_analysis`]: Calderón sums, energy identities and empirical frame
//!   ratios computed in the spectral domain.
//! * [`approx_continuity`]: density probes and the approximate-continuity
//!   counterexample.

pub mod approx_continuity;
pub mod error;
pub mod extension;
pub mod filters;
pub mod frame_analysis;
pub mod lattice;
pub mod refinable;
pub mod report;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use num_rational::Rational64;

pub use approx_continuity::{DensityCurve, LimitVerdict, MeasurableSet};
pub use extension::FilterBank;
pub use filters::{BracketFunction, Filter, Grid, Profile, TrigPolynomial, ZeroSetMask};
pub use lattice::{coset_reps, validate_dilation, CosetReps, DilationMatrix};
pub use refinable::{ClosedForm, EvalMode, PhiHat};
pub use report::VerificationReport;
