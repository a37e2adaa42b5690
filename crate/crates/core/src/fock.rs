//! Truncated Fock-space matrices and energy spectra.
//!
//! On a D-dimensional truncation the ladder relations hold exactly on the
//! leading (D−1)×(D−1) block; the last basis direction cannot represent
//! aa† and is excluded from every identity check.
//!
//! Energy levels are formed from (φ(n+1) + φ(n))/2 in double-double
//! arithmetic for the rational families, so that gaps far up a bounded band
//! (where E_{n+1} and E_n agree to eight or more digits) keep full relative
//! accuracy.

use ndarray::{Array1, Array2};
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::json::extended_f64;
use crate::scheme::{DeformationScheme, SchemeKind};
use crate::series::{dd_div, radius_of_convergence};

pub const MAX_DIM: usize = 4096;

/// Matrices of a, a† and N on span{|0⟩, …, |D−1⟩}.
#[derive(Debug, Clone)]
pub struct FockTriple {
    scheme: DeformationScheme,
    phis: Vec<f64>,
    a: Array2<f64>,
    a_dagger: Array2<f64>,
    n_op: Array2<f64>,
}

impl FockTriple {
    pub fn dim(&self) -> usize {
        self.phis.len()
    }

    pub fn scheme(&self) -> &DeformationScheme {
        &self.scheme
    }

    pub fn a(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn a_dagger(&self) -> &Array2<f64> {
        &self.a_dagger
    }

    pub fn n_op(&self) -> &Array2<f64> {
        &self.n_op
    }

    /// φ(0), …, φ(D−1).
    pub fn phis(&self) -> &[f64] {
        &self.phis
    }
}

pub fn build_fock(scheme: &DeformationScheme, dim: usize) -> Result<FockTriple> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::Precondition(format!(
            "Fock dimension must lie in [2, {MAX_DIM}], got {dim}"
        )));
    }
    let phis = (0..dim as u64)
        .map(|n| {
            let v = scheme.phi(n)?;
            if v < 0.0 {
                return Err(Error::Domain(format!(
                    "φ({n}) = {v} < 0 for {scheme}: no Fock representation"
                )));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = phis[n].sqrt();
    }
    let a_dagger = a.t().to_owned();
    let n_op = Array2::from_diag(&Array1::from_iter((0..dim).map(|n| n as f64)));
    Ok(FockTriple {
        scheme: scheme.clone(),
        phis,
        a,
        a_dagger,
        n_op,
    })
}

/// (|deviation|, scale) for every entry of the leading block.
fn commutator_deviations(t: &FockTriple) -> Vec<(f64, f64)> {
    let comm = t.a.dot(&t.a_dagger) - t.a_dagger.dot(&t.a);
    let m = t.dim() - 1;
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let target = if i == j {
                t.phis[i + 1] - t.phis[i]
            } else {
                0.0
            };
            let scale = 1.0_f64.max(t.phis[i + 1]).max(t.phis[j + 1]);
            out.push(((comm[[i, j]] - target).abs(), scale));
        }
    }
    out
}

/// max |[a, a†] − diag(φ(n+1) − φ(n))| over indices 0..=D−2, each entry
/// measured in units of max(1, φ(i+1), φ(j+1)).
///
/// Storing √φ(n) in f64 leaves (√φ(n))² − φ(n) ≈ φ(n)·ε, so the
/// unscaled deviation grows with φ and carries no information about the
/// algebra once φ ≫ 1; see [`commutator_residual_absolute`].
pub fn commutator_residual(t: &FockTriple) -> f64 {
    commutator_deviations(t)
        .into_iter()
        .fold(0.0, |w, (d, scale)| w.max(d / scale))
}

/// Unscaled max |[a, a†] − diag(φ(n+1) − φ(n))| over indices 0..=D−2.
pub fn commutator_residual_absolute(t: &FockTriple) -> f64 {
    commutator_deviations(t)
        .into_iter()
        .fold(0.0, |w, (d, _)| w.max(d))
}

/// φ(n) in double-double; exact up to one rounding for the rational
/// families, the f64 value otherwise.
fn phi_dd(scheme: &DeformationScheme, n: u64) -> Result<TwoFloat> {
    let plain = scheme.phi(n)?;
    if n == 0 {
        return Ok(TwoFloat::from(0.0));
    }
    let nf = n as f64;
    Ok(match scheme.kind() {
        SchemeKind::Boson => TwoFloat::from(nf),
        SchemeKind::Tsallis { q } => dd_div(
            TwoFloat::from(nf),
            TwoFloat::new_mul(q - 1.0, nf - 1.0) + 1.0,
        ),
        SchemeKind::Mu { mu } => dd_div(TwoFloat::from(nf), TwoFloat::new_mul(*mu, nf) + 1.0),
        _ => TwoFloat::from(plain),
    })
}

fn level_dd(scheme: &DeformationScheme, n: u64) -> Result<TwoFloat> {
    Ok((phi_dd(scheme, n + 1)? + phi_dd(scheme, n)?) * 0.5)
}

fn round_dd(v: TwoFloat) -> f64 {
    v.hi() + v.lo()
}

/// E_n = (φ(n+1) + φ(n))/2.
pub fn energy_level(scheme: &DeformationScheme, n: u64) -> Result<f64> {
    level_dd(scheme, n).map(round_dd)
}

/// sup of the spectrum: lim φ(n) where it exists. NaN where the limit is
/// undefined (Tsallis q < 1, oscillating (p,q) cases, tables).
pub fn band_top(scheme: &DeformationScheme) -> f64 {
    match scheme.kind() {
        SchemeKind::Tsallis { q } if *q < 1.0 => f64::NAN,
        SchemeKind::Tsallis { q } if *q == 1.0 => f64::INFINITY,
        SchemeKind::Tsallis { q } => 1.0 / (q - 1.0),
        SchemeKind::PQ { p, q } if p.abs() == q.abs() => f64::NAN,
        SchemeKind::CustomPhi(_) => f64::NAN,
        _ => radius_of_convergence(scheme).unwrap_or(f64::NAN),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub levels: Vec<f64>,
    pub gaps: Vec<f64>,
    #[serde(serialize_with = "extended_f64")]
    pub band_top: f64,
    #[serde(serialize_with = "extended_f64")]
    pub band_width: f64,
}

/// Levels E_0..E_{n_max} and their successive gaps.
pub fn spectrum_report(scheme: &DeformationScheme, n_max: u64) -> Result<SpectrumReport> {
    if n_max < 1 {
        return Err(Error::Precondition("spectrum needs n_max >= 1".into()));
    }
    let exact = (0..=n_max)
        .map(|n| level_dd(scheme, n))
        .collect::<Result<Vec<_>>>()?;
    let levels: Vec<f64> = exact.iter().map(|e| round_dd(*e)).collect();
    // differences taken before rounding, so gaps[n] equals
    // levels[n+1] − levels[n] up to the rounding of the levels
    let gaps = exact.windows(2).map(|w| round_dd(w[1] - w[0])).collect();
    let top = band_top(scheme);
    Ok(SpectrumReport {
        band_width: top - levels[1],
        levels,
        gaps,
        band_top: top,
    })
}

/// H = (aa† + a†a)/2 on the truncated space.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub matrix: Array2<f64>,
    /// Index whose diagonal entry is an artifact of the truncation.
    pub polluted_index: usize,
}

/// Diagonal E_0, …, E_{D−2}; the last entry is φ(D−1)/2, what the
/// truncated aa† + a†a produces there.
pub fn hamiltonian(t: &FockTriple) -> Result<Hamiltonian> {
    let d = t.dim();
    let mut diag = (0..d as u64 - 1)
        .map(|n| energy_level(&t.scheme, n))
        .collect::<Result<Vec<_>>>()?;
    diag.push(0.5 * t.phis[d - 1]);
    Ok(Hamiltonian {
        matrix: Array2::from_diag(&Array1::from(diag)),
        polluted_index: d - 1,
    })
}

/// a†ⁿ|0⟩/√(φ(n)!).
pub fn state_from_vacuum(t: &FockTriple, n: usize) -> Result<Array1<f64>> {
    if n >= t.dim() {
        return Err(Error::Range {
            n: n as u64,
            detail: format!("state index must be below the dimension {}", t.dim()),
        });
    }
    let mut v = Array1::zeros(t.dim());
    v[0] = 1.0;
    for _ in 0..n {
        v = t.a_dagger.dot(&v);
    }
    let norm = t.scheme.phi_factorial(n as u64, false)?.sqrt();
    Ok(v / norm)
}
