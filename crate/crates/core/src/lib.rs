//! Deformed oscillator algebras parameterized by a structure function φ(n).
//!
//! A [`DeformationScheme`] fixes φ; everything else (deformed exponentials,
//! truncated Fock operators, spectra, coherent states and the deformed
//! calculus) is derived from it. The Tsallis family φ_T(n) = n/(1 + (q−1)(n−1))
//! is the centerpiece: its φ-exponential is the Tsallis q-exponential.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cli;
pub mod coherent;
pub mod error;
pub mod fock;
mod json;
pub mod scheme;
pub mod series;

pub use error::{Error, Result};
pub use scheme::{DeformationScheme, SchemeKind};
pub use series::{EvalPolicy, PowerSeries, SeriesDiagnostics};
