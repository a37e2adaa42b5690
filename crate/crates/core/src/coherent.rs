//! Eigenstates of the deformed annihilation operator.
//!
//! |α⟩ = N(α) Σ αⁿ/√(φ(n)!) |n⟩ with N(α) = 1/√(e_φ(|α|²)). The
//! coefficients come from c_n = c_{n−1}·α/√φ(n), so a·|α⟩ = α|α⟩ holds
//! term by term up to rounding; the only defect of a truncated state is the
//! corner term α·c_{D−1} that a D-dimensional a cannot produce.

use ndarray::Array1;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{build_fock, MAX_DIM};
use crate::scheme::DeformationScheme;
use crate::series::{phi_exp_series, radius_of_convergence, EvalPolicy};

#[derive(Debug, Clone)]
pub struct CoherentState {
    alpha: Complex64,
    scheme: DeformationScheme,
    coefficients: Vec<Complex64>,
    norm_const: f64,
}

impl CoherentState {
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn scheme(&self) -> &DeformationScheme {
        &self.scheme
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// αⁿ/√(φ(n)!), before normalization.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// The truncated state vector norm_const·coefficients.
    pub fn vector(&self) -> Vec<Complex64> {
        self.coefficients
            .iter()
            .map(|c| c * self.norm_const)
            .collect()
    }
}

fn check_disk(scheme: &DeformationScheme, alpha: Complex64) -> Result<f64> {
    let r2 = alpha.norm_sqr();
    match radius_of_convergence(scheme) {
        Ok(radius) => {
            if r2 >= radius && r2 > 0.0 {
                Err(Error::Domain(format!(
                    "|α|² = {r2} is outside the convergence disk of e_φ (radius {radius}); \
                     the state is not normalizable"
                )))
            } else {
                Ok(radius)
            }
        }
        Err(Error::Unsupported(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// max(64, ⌈40/(1 − |α|²/R)⌉, ⌈2|α|² + 40⌉), extended until the occupation
/// tail is negligible, capped at the Fock limit.
///
/// The mean-based term matters for unbounded spectra, where the occupation
/// is centered near |α|² rather than cut off by the radius. The extension
/// matters when φ(n) creeps up to its limit slowly (Tsallis q near 1), so
/// the heuristic stops short of the tail.
pub fn default_dim(scheme: &DeformationScheme, alpha: Complex64) -> Result<usize> {
    let radius = check_disk(scheme, alpha)?;
    let r2 = alpha.norm_sqr();
    let near_edge = 40.0 / (1.0 - r2 / radius);
    let mean_based = 2.0 * r2 + 40.0;
    let floor = (64f64.max(near_edge.ceil()).max(mean_based.ceil()) as usize).min(MAX_DIM);
    if r2 == 0.0 {
        return Ok(floor);
    }
    // walk |α|^(2n)/φ(n)! in the log domain until the geometric tail bound
    // on the remaining mass falls below 1e-18 of the running sum
    let (mut log_t, mut log_sum) = (0.0_f64, 0.0_f64);
    for n in 1..MAX_DIM {
        let Ok(phi) = scheme.phi(n as u64) else {
            return Ok(floor.max(n).min(MAX_DIM));
        };
        log_t += r2.ln() - phi.ln();
        log_sum += (log_t - log_sum).exp().ln_1p();
        let ratio = scheme
            .phi(n as u64 + 1)
            .map_or(f64::INFINITY, |next| r2 / next);
        if ratio < 1.0 && log_t + (ratio / (1.0 - ratio)).ln() < log_sum - 41.5 {
            return Ok(floor.max(n + 1));
        }
    }
    Ok(MAX_DIM)
}

fn normalization_policy() -> EvalPolicy {
    // the sum must be good to the last bit: N(α) enters every coefficient
    EvalPolicy::new(1e-17, 10_000_000).expect("static policy")
}

/// Coherent state of amplitude α truncated to `dim` levels (the default
/// heuristic when `None`).
pub fn coherent_state(
    scheme: &DeformationScheme,
    alpha: Complex64,
    dim: Option<usize>,
) -> Result<CoherentState> {
    check_disk(scheme, alpha)?;
    let dim = match dim {
        Some(d) => d,
        None => default_dim(scheme, alpha)?,
    };
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(Error::Precondition(format!(
            "coherent-state dimension must lie in [1, {MAX_DIM}], got {dim}"
        )));
    }
    let mut coefficients = Vec::with_capacity(dim);
    let mut c = Complex64::new(1.0, 0.0);
    coefficients.push(c);
    for n in 1..dim as u64 {
        let phi = scheme.phi(n)?;
        if !(phi > 0.0) {
            return Err(Error::Domain(format!(
                "φ({n}) = {phi} for {scheme}: coefficient αⁿ/√(φ(n)!) undefined"
            )));
        }
        c = c * alpha / phi.sqrt();
        coefficients.push(c);
    }
    let (e, _) = phi_exp_series(scheme, alpha.norm_sqr(), &normalization_policy())?;
    Ok(CoherentState {
        alpha,
        scheme: scheme.clone(),
        coefficients,
        norm_const: 1.0 / e.sqrt(),
    })
}

/// (a·v − α·v) for the normalized truncated vector v.
fn eigen_defect(state: &CoherentState) -> Result<Vec<Complex64>> {
    let t = build_fock(&state.scheme, state.dim())?;
    let v = state.vector();
    let re = Array1::from_iter(v.iter().map(|z| z.re));
    let im = Array1::from_iter(v.iter().map(|z| z.im));
    let are = t.a().dot(&re);
    let aim = t.a().dot(&im);
    Ok((0..state.dim())
        .map(|n| Complex64::new(are[n], aim[n]) - state.alpha * v[n])
        .collect())
}

/// max |(a·v − α·v)[n]| over n ≤ dim/2, the part untouched by truncation.
pub fn eigen_residual(state: &CoherentState) -> Result<f64> {
    if state.dim() < 4 {
        return Err(Error::Precondition(format!(
            "eigen_residual needs dim >= 4, got {}",
            state.dim()
        )));
    }
    let defect = eigen_defect(state)?;
    Ok(defect[..=state.dim() / 2]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// max |(a·v − α·v)[n]| over every n, including the truncation corner.
/// Shrinks with dim as the coefficient tail decays.
pub fn truncation_residual(state: &CoherentState) -> Result<f64> {
    if state.dim() < 2 {
        return Err(Error::Precondition(
            "truncation_residual needs dim >= 2".into(),
        ));
    }
    Ok(eigen_defect(state)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Boson-basis form √(Q_{n−1})·αⁿ/√(n!) of the Tsallis coherent
/// coefficients, built from logarithms of Q_{n−1} and n!.
pub fn f_coherent_coefficients(q: f64, alpha: Complex64, dim: usize) -> Result<Vec<Complex64>> {
    let scheme = DeformationScheme::tsallis(q)?;
    check_disk(&scheme, alpha)?;
    let (r, theta) = alpha.to_polar();
    let mut out = Vec::with_capacity(dim);
    let mut ln_q = 0.0; // ln Q_{n−1}
    let mut ln_fact = 0.0; // ln n!
    for n in 0..dim {
        if n >= 2 {
            let factor = 1.0 + (q - 1.0) * (n - 1) as f64;
            if !(factor > 0.0) {
                return Err(Error::Domain(format!(
                    "Q_{} is not positive at q = {q}",
                    n - 1
                )));
            }
            ln_q += factor.ln();
        }
        if n >= 1 {
            ln_fact += (n as f64).ln();
        }
        let coeff = if n == 0 {
            Complex64::new(1.0, 0.0)
        } else if r == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let ln_mag = 0.5 * (ln_q - ln_fact) + n as f64 * r.ln();
            Complex64::from_polar(ln_mag.exp(), n as f64 * theta)
        };
        out.push(coeff);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccupationMoment {
    /// Σ n·|v_n|² over the truncated normalized vector.
    pub mean: f64,
    /// 1 − Σ |v_n|², the probability weight beyond the truncation.
    pub tail_mass: f64,
}

pub fn expected_n(state: &CoherentState) -> OccupationMoment {
    let probs: Vec<f64> = state.vector().iter().map(|z| z.norm_sqr()).collect();
    OccupationMoment {
        mean: probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum(),
        tail_mass: 1.0 - probs.iter().sum::<f64>(),
    }
}
