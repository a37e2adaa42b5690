//! Deformed exponentials, logarithms and the power-series machinery behind them.
//!
//! The φ-exponential e_φ(x) = Σ xⁿ/φ(n)! is summed term by term from the
//! ratio c_n/c_{n−1} = 1/φ(n). For real arguments the running term and the
//! partial sum are carried in double-double arithmetic: e_q(x) for x < 0
//! sums terms of alternating sign whose magnitude can exceed the result by
//! ten orders, and plain f64 summation loses those digits. For the Tsallis,
//! μ and boson families the ratio itself is formed exactly (it is a
//! rational function of n with f64 coefficients), so the Tsallis
//! coefficients follow the multiplicative recurrence of Q_n rather than a
//! ratio of factorials.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::scheme::{DeformationScheme, SchemeKind};

/// A truncated formal power series; `coeffs[n]` multiplies xⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition(
                "a power series needs at least the constant coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![0.0; order + 1],
        }
    }

    /// The series of xⁿ.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of xⁿ, zero past the stored order.
    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Coefficients c_n ↦ c_n·kⁿ, i.e. the series of f(kx).
    pub fn scale_argument(&self, k: f64) -> Self {
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * p;
                p *= k;
                v
            })
            .collect();
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect(),
        }
    }

    /// Cauchy product truncated at `order`.
    pub fn mul_truncated(&self, other: &Self, order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|n| (0..=n).map(|j| self.coeff(j) * other.coeff(n - j)).sum())
            .collect();
        Self { coeffs }
    }
}

/// Convergence controls for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalPolicy {
    rel_tol: f64,
    max_terms: usize,
}

impl EvalPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::Precondition(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::Precondition("max_terms must be at least 1".into()));
        }
        Ok(Self { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesDiagnostics {
    pub terms_used: usize,
    pub converged: bool,
    pub last_term_magnitude: f64,
}

/// Tsallis q-exponential (1 + (1 − q)x)^(1/(1−q)), cut off to 0 where the
/// base is negative; eˣ at q = 1.
pub fn tsallis_exp_closed(q: f64, x: f64) -> f64 {
    if q == 1.0 {
        return x.exp();
    }
    let shift = (1.0 - q) * x;
    if shift < -1.0 {
        return 0.0;
    }
    // ln_1p(−1) = −∞ gives 0 for q < 1 and +∞ for q > 1, as it should
    (shift.ln_1p() / (1.0 - q)).exp()
}

/// Tsallis q-logarithm (x^(1−q) − 1)/(1 − q); ln x at q = 1.
pub fn tsallis_log(q: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_q(x) requires x > 0, got {x}")));
    }
    if q == 1.0 {
        return Ok(x.ln());
    }
    Ok(((1.0 - q) * x.ln()).exp_m1() / (1.0 - q))
}

/// Radius of convergence of e_φ(x) = Σ xⁿ/φ(n)!, i.e. lim |φ(n)|.
pub fn radius_of_convergence(scheme: &DeformationScheme) -> Result<f64> {
    Ok(match scheme.kind() {
        SchemeKind::Boson => f64::INFINITY,
        SchemeKind::Tsallis { q } => tsallis_radius(*q),
        SchemeKind::Mu { mu } => {
            if *mu == 0.0 {
                f64::INFINITY
            } else {
                1.0 / mu
            }
        }
        SchemeKind::QOsc { q } => {
            if *q > 1.0 {
                f64::INFINITY
            } else {
                1.0 / (1.0 - q)
            }
        }
        SchemeKind::SymmetricQ { .. } => f64::INFINITY,
        SchemeKind::PQ { p, q } => {
            let (ap, aq) = (p.abs(), q.abs());
            let m = ap.max(aq);
            if m > 1.0 {
                f64::INFINITY
            } else if m < 1.0 || ap == aq {
                // φ(n) → 0, or vanishes for every even n
                0.0
            } else {
                1.0 / (p - q).abs()
            }
        }
        SchemeKind::CustomPhi(_) => {
            return Err(Error::Unsupported(
                "no convergence radius for a tabulated structure function".into(),
            ))
        }
    })
}

fn tsallis_radius(q: f64) -> f64 {
    if q == 1.0 {
        return f64::INFINITY;
    }
    if q < 1.0 {
        // the binomial series terminates when 1/(1−q) is a whole number
        let m = (1.0 / (1.0 - q)).round();
        if 1.0 + (q - 1.0) * m == 0.0 {
            return f64::INFINITY;
        }
        return 1.0 / (1.0 - q);
    }
    1.0 / (q - 1.0)
}

/// The exact term ratio c_n/c_{n−1} = 1/φ(n) in double-double precision.
fn coefficient_ratio(scheme: &DeformationScheme, n: u64) -> Result<TwoFloat> {
    let nf = n as f64;
    Ok(match scheme.kind() {
        SchemeKind::Boson => TwoFloat::new_div(1.0, nf),
        SchemeKind::Tsallis { q } => (TwoFloat::new_mul(q - 1.0, nf - 1.0) + 1.0) / nf,
        SchemeKind::Mu { mu } => (TwoFloat::new_mul(*mu, nf) + 1.0) / nf,
        _ => {
            let phi = scheme.phi(n)?;
            if phi == 0.0 {
                return Err(Error::Domain(format!(
                    "φ({n}) = 0 for {scheme}: the φ-exponential is undefined"
                )));
            }
            TwoFloat::new_div(1.0, phi)
        }
    })
}

/// Sums 1 + Σ_{n≥1} tₙ with tₙ = tₙ₋₁·ratio(n), stopping once the geometric
/// bound on the remaining tail drops below `rel_tol·|sum|`.
fn sum_real<F>(mut ratio: F, policy: &EvalPolicy) -> Result<(f64, SeriesDiagnostics)>
where
    F: FnMut(u64) -> Result<TwoFloat>,
{
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    let mut prev_mag = 1.0_f64;
    for n in 1..=policy.max_terms as u64 {
        term *= ratio(n)?;
        sum += term;
        let mag = term.hi().abs();
        if !mag.is_finite() || !sum.hi().is_finite() {
            return Err(Error::NonConvergence {
                terms: n as usize,
                last_term: mag,
            });
        }
        let scale = sum.hi().abs().max(f64::MIN_POSITIVE);
        let done = if mag == 0.0 {
            true
        } else {
            let r = mag / prev_mag;
            r < 1.0 && mag * r / (1.0 - r) <= policy.rel_tol * scale
        };
        prev_mag = mag;
        if done {
            return Ok((
                sum.hi() + sum.lo(),
                SeriesDiagnostics {
                    terms_used: n as usize + 1,
                    converged: true,
                    last_term_magnitude: mag,
                },
            ));
        }
    }
    Err(Error::NonConvergence {
        terms: policy.max_terms,
        last_term: prev_mag,
    })
}

fn check_disk(scheme: &DeformationScheme, magnitude: f64) -> Result<()> {
    match radius_of_convergence(scheme) {
        Ok(radius) if magnitude >= radius && magnitude > 0.0 => {
            Err(Error::Divergence { magnitude, radius })
        }
        Ok(_) | Err(Error::Unsupported(_)) => Ok(()),
        Err(e) => Err(e),
    }
}

/// φ-exponential e_φ(x) = Σ xⁿ/φ(n)! for real x.
pub fn phi_exp_series(
    scheme: &DeformationScheme,
    x: f64,
    policy: &EvalPolicy,
) -> Result<(f64, SeriesDiagnostics)> {
    check_disk(scheme, x.abs())?;
    sum_real(|n| Ok(coefficient_ratio(scheme, n)? * x), policy)
}

/// φ-exponential for complex arguments inside the convergence disk.
pub fn phi_exp_series_complex(
    scheme: &DeformationScheme,
    z: Complex64,
    policy: &EvalPolicy,
) -> Result<(Complex64, SeriesDiagnostics)> {
    check_disk(scheme, z.norm())?;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut carry = Complex64::new(0.0, 0.0);
    let mut prev_mag = 1.0_f64;
    for n in 1..=policy.max_terms as u64 {
        let r = coefficient_ratio(scheme, n)?;
        term = term * z * (r.hi() + r.lo());
        // Kahan summation on both components
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        let mag = term.norm();
        if !mag.is_finite() || !sum.norm().is_finite() {
            return Err(Error::NonConvergence {
                terms: n as usize,
                last_term: mag,
            });
        }
        let scale = sum.norm().max(f64::MIN_POSITIVE);
        let done = if mag == 0.0 {
            true
        } else {
            let ratio = mag / prev_mag;
            ratio < 1.0 && mag * ratio / (1.0 - ratio) <= policy.rel_tol * scale
        };
        prev_mag = mag;
        if done {
            return Ok((
                sum,
                SeriesDiagnostics {
                    terms_used: n as usize + 1,
                    converged: true,
                    last_term_magnitude: mag,
                },
            ));
        }
    }
    Err(Error::NonConvergence {
        terms: policy.max_terms,
        last_term: prev_mag,
    })
}

/// Taylor coefficients 1/φ(n)! of e_φ through `order`.
pub fn phi_exp_coefficients(scheme: &DeformationScheme, order: usize) -> Result<PowerSeries> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = TwoFloat::from(1.0);
    coeffs.push(1.0);
    for n in 1..=order as u64 {
        c *= coefficient_ratio(scheme, n)?;
        coeffs.push(c.hi() + c.lo());
    }
    Ok(PowerSeries { coeffs })
}

/// Taylor coefficients of e_q(x): c_n = Q_{n−1}/n! through the recurrence
/// c_n = c_{n−1}·(1 + (q−1)(n−1))/n.
pub fn tsallis_exp_coefficients(q: f64, order: usize) -> PowerSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = 1.0_f64;
    coeffs.push(c);
    for n in 1..=order {
        let nf = n as f64;
        c *= (1.0 + (q - 1.0) * (nf - 1.0)) / nf;
        coeffs.push(c);
    }
    PowerSeries { coeffs }
}

/// Q₀ = 1, Q_n = q(2q − 1)(3q − 2)…(nq − (n − 1)).
pub fn borges_q(q: f64, n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * (j as f64 * q - (j - 1) as f64))
}

/// Coefficients of exp(Σ aₙxⁿ) through `order`, from
/// c₀ = 1, cₙ = aₙ + (1/n) Σ_{j=1}^{n−1} j·c_{n−j}·a_j.
pub fn exp_series_compose(a: &PowerSeries, order: usize) -> Result<PowerSeries> {
    if a.coeff(0) != 0.0 {
        return Err(Error::Precondition(format!(
            "exponent series must have zero constant term, got a₀ = {}",
            a.coeff(0)
        )));
    }
    let mut c = Vec::with_capacity(order + 1);
    c.push(1.0);
    for n in 1..=order {
        let inner: f64 = (1..n).map(|j| j as f64 * c[n - j] * a.coeff(j)).sum();
        c.push(a.coeff(n) + inner / n as f64);
    }
    Ok(PowerSeries { coeffs: c })
}

/// Rising factorial (τ)_n = τ(τ + 1)…(τ + n − 1), (τ)₀ = 1.
pub fn pochhammer(tau: f64, n: u64) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (tau + j as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PochhammerRow {
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PochhammerReport {
    pub tau: f64,
    pub rows: Vec<PochhammerRow>,
    pub max_residual: f64,
}

/// Checks (τ)_n = (n − 1)!·τ·Σ_{j=0}^{n−1} (τ)_j/j! for 2 ≤ n ≤ n_max.
///
/// Residuals are relative to |(τ)_n| (absolute where it vanishes).
pub fn verify_pochhammer_identity(tau: f64, n_max: u64) -> Result<PochhammerReport> {
    if n_max < 2 {
        return Err(Error::Precondition(format!(
            "n_max must be >= 2, got {n_max}"
        )));
    }
    let mut rows = Vec::new();
    // running Σ_{j<n} (τ)_j/j!, the same sum of magnitudes, and (n−1)!
    let mut partial = 1.0 + tau;
    let mut magnitude = 1.0 + tau.abs();
    let mut term = tau;
    let mut fact = 1.0;
    for n in 2..=n_max {
        fact *= (n - 1) as f64;
        let lhs = pochhammer(tau, n);
        let rhs = fact * tau * partial;
        // for τ < 0 the sum cancels; measure against its term magnitudes,
        // which equal |rhs| whenever τ > 0
        let scale = lhs.abs().max(fact * tau.abs() * magnitude);
        let scale = if scale == 0.0 { 1.0 } else { scale };
        rows.push(PochhammerRow {
            n,
            lhs,
            rhs,
            residual: (lhs - rhs).abs() / scale,
        });
        term *= (tau + (n - 1) as f64) / n as f64;
        partial += term;
        magnitude += term.abs();
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(PochhammerReport {
        tau,
        rows,
        max_residual,
    })
}

/// Double-double quotient with one correction step; the library's own
/// dd/dd division is only accurate to about one f64 ulp.
pub(crate) fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a / b.hi();
    let r = a - q1 * b;
    q1 + r / b.hi()
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v.fract() == 0.0
}

/// ₁F₀(a; −; z) = Σ (a)_n zⁿ/n!, convergent for |z| < 1 (any z when the
/// series terminates).
pub fn hyp1f0(a: f64, z: f64, policy: &EvalPolicy) -> Result<f64> {
    if !is_nonpositive_integer(a) && z.abs() >= 1.0 {
        return Err(Error::Divergence {
            magnitude: z.abs(),
            radius: 1.0,
        });
    }
    sum_real(
        |n| {
            let nf = n as f64;
            Ok(TwoFloat::new_add(a, nf - 1.0) / nf * z)
        },
        policy,
    )
    .map(|(v, _)| v)
}

/// Gauss ₂F₁(a, b; c; z) = Σ (a)_n(b)_n/(c)_n · zⁿ/n! for |z| < 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, policy: &EvalPolicy) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::InvalidParameter {
            scheme: "2F1",
            detail: format!("c must not be a non-positive integer, got {c}"),
        });
    }
    let terminates = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    if !terminates && z.abs() >= 1.0 {
        return Err(Error::Divergence {
            magnitude: z.abs(),
            radius: 1.0,
        });
    }
    sum_real(
        |n| {
            let k = n as f64 - 1.0;
            let num = TwoFloat::new_add(a, k) * TwoFloat::new_add(b, k);
            let den = TwoFloat::new_add(c, k) * (k + 1.0);
            Ok(dd_div(num, den) * z)
        },
        policy,
    )
    .map(|(v, _)| v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QGaussianPair {
    pub approx: f64,
    pub exact: f64,
}

/// Three-term exponential approximation of the q-Gaussian e_q(−βx²),
/// exp(−βx² + ((q−1)/2)β²x⁴ − ((q−1)²/3)β³x⁶), next to the exact value.
pub fn q_gaussian_approx(q: f64, beta: f64, x: f64) -> QGaussianPair {
    let y = beta * x * x;
    let d = q - 1.0;
    let approx = (-y + 0.5 * d * y * y - d * d / 3.0 * y * y * y).exp();
    QGaussianPair {
        approx,
        exact: tsallis_exp_closed(q, -y),
    }
}
