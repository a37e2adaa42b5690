//! Property suites behind `phidef verify`.
//!
//! Every case evaluates one identity on the scheme under test and reports
//! the largest residual seen against its tolerance. Reference values come
//! from closed forms in the declared parameters (q or μ), never from the
//! scheme under test, so a corrupted φ table surfaces as a failing case.
//! The hidden `mutate_phi=n:bit` parameter builds exactly such a table: the
//! declared Tsallis φ with one mantissa bit of φ(n) flipped.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::table::{Cell, Table};
use super::{CliError, CommandRequest, Rendered, UsageError, EXIT_OK, EXIT_VERIFY_FAILED};
use crate::calculus::{
    bargmann_inner_product, derivative_on_series, jackson_derivative, pq_derivative,
    symmetric_derivative, tsallis_derivative_quadrature, tsallis_derivative_series,
    tsallis_integral_series, QuadratureSpec, SampledFunction,
};
use crate::coherent::{coherent_state, eigen_residual, expected_n, f_coherent_coefficients};
use crate::error::Result;
use crate::fock::{
    build_fock, commutator_residual, energy_level, hamiltonian, spectrum_report, state_from_vacuum,
};
use crate::json::extended_f64;
use crate::scheme::{tsallis_number, DeformationScheme, SchemeKind};
use crate::series::{
    borges_q, exp_series_compose, hyp1f0, hyp2f1, phi_exp_coefficients, phi_exp_series,
    radius_of_convergence, tsallis_exp_closed, tsallis_log, verify_pochhammer_identity, EvalPolicy,
    PowerSeries,
};

pub const DEFAULT_SCHEME: &str = "tsallis:q=1.5";
pub const SUITES: [&str; 4] = ["calculus", "coherent", "series", "spectrum"];

/// Highest index a mutated table covers; the spectrum asymptote needs φ(10⁶ + 1).
const MUTATION_TABLE_MAX: u64 = 1_000_002;
const ASYMPTOTE_N: u64 = 1_000_000;
const GAP_N_MAX: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub suite: &'static str,
    pub name: String,
    /// The identity checked, written out.
    pub anchor: &'static str,
    #[serde(serialize_with = "extended_f64")]
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub scheme: String,
    pub cases: Vec<CaseReport>,
    pub overall: bool,
}

/// What the suites know about the run.
pub struct Context {
    /// Scheme whose φ is exercised.
    pub under_test: DeformationScheme,
    /// Scheme the references are computed from.
    pub declared: DeformationScheme,
}

impl Context {
    fn q(&self) -> Option<f64> {
        self.declared.tsallis_q()
    }

    fn mu(&self) -> Option<f64> {
        match self.declared.kind() {
            SchemeKind::Mu { mu } => Some(*mu),
            _ => None,
        }
    }

    /// Fock-space and coherent-state claims need φ(n) > 0 for n ≥ 1, which
    /// fails for Tsallis q < 1 past the pole of φ_T and for some signed
    /// (p, q) pairs.
    fn has_fock_space(&self) -> bool {
        !matches!(self.q(), Some(q) if q < 1.0)
            && (1..=64).all(|n| self.declared.phi(n).is_ok_and(|v| v > 0.0))
    }

    fn radius(&self) -> f64 {
        radius_of_convergence(&self.declared).unwrap_or(f64::INFINITY)
    }
}

type Check = Box<dyn Fn(&Context) -> Result<f64> + Send + Sync>;

struct Case {
    suite: &'static str,
    name: String,
    anchor: &'static str,
    tolerance: f64,
    check: Check,
}

fn case(
    suite: &'static str,
    name: impl Into<String>,
    anchor: &'static str,
    tolerance: f64,
    check: impl Fn(&Context) -> Result<f64> + Send + Sync + 'static,
) -> Case {
    Case {
        suite,
        name: name.into(),
        anchor,
        tolerance,
        check: Box::new(check),
    }
}

/// |a − b|/|b|, or |a| when b = 0.
fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn max_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut worst = 0.0_f64;
    for v in values {
        let v = v?;
        // NaN residuals must fail the case
        worst = if v.is_nan() {
            f64::INFINITY
        } else {
            worst.max(v)
        };
    }
    Ok(worst)
}

/// 1..=n_max, cut before the first n where φ(n) is not finite.
fn below_pole(s: &DeformationScheme, n_max: u64) -> impl Iterator<Item = u64> + '_ {
    (1..=n_max).take_while(move |n| s.phi(*n).is_ok_and(f64::is_finite))
}

/// [`below_pole`], also cut where φ(n)! overflows or underflows.
fn representable(s: &DeformationScheme, n_max: u64) -> impl Iterator<Item = u64> + '_ {
    below_pole(s, n_max).take_while(move |n| s.phi_factorial(*n, false).is_ok_and(f64::is_normal))
}

fn series_cases(ctx: &Context) -> Vec<Case> {
    const S: &str = "series";
    let mut cases = vec![
        case(
            S,
            "phi factorial recurrence",
            "φ(n)! = φ(n−1)!·φ(n)",
            1e-15,
            |c| {
                let s = &c.under_test;
                max_of(representable(s, 40).map(|n| {
                    Ok(rel(
                        s.phi_factorial(n, false)?,
                        s.phi_factorial(n - 1, false)? * s.phi(n)?,
                    ))
                }))
            },
        ),
        case(
            S,
            "1F0 as 2F1 with b = c",
            "₁F₀(a;z) = ₂F₁(a,b;b;z)",
            1e-12,
            |_| {
                let p = EvalPolicy::default();
                max_of(grid(-0.85, 0.85, 11).into_iter().flat_map(|z| {
                    [0.5, 2.0, 10.0]
                        .into_iter()
                        .map(move |a| Ok(rel(hyp1f0(a, z, &p)?, hyp2f1(a, 3.7, 3.7, z, &p)?)))
                }))
            },
        ),
    ];
    let Some(q) = ctx.q() else { return cases };
    cases.extend([
        // same IEEE operation sequence on both sides, so any difference is a defect
        case(
            S,
            "Tsallis numbers",
            "[n]_(q−1) = n/(1 + (q−1)(n−1))",
            0.0,
            move |c| {
                max_of((1..=MUTATION_TABLE_MAX).map(|n| {
                    let nf = n as f64;
                    let want = nf / (1.0 + (q - 1.0) * (nf - 1.0));
                    match c.under_test.phi(n) {
                        Ok(v) => Ok(rel(v, want)),
                        Err(_) if !want.is_finite() => Ok(0.0),
                        Err(e) => Err(e),
                    }
                }))
            },
        ),
        case(
            S,
            "e_phi series equals e_q",
            "Σ xⁿ/[n]_(q−1)! = (1+(1−q)x)^(1/(1−q))",
            1e-10,
            move |c| {
                let r = radius_of_convergence(&c.declared)?.min(5.0);
                // for q < 1 the closed form is cut off at 1 + (1−q)x = 0
                let lo = if q < 1.0 { r.min(1.0 / (1.0 - q)) } else { r };
                let p = EvalPolicy::default();
                max_of(grid(-0.9 * lo, 0.9 * r, 20).into_iter().map(|x| {
                    Ok(rel(
                        phi_exp_series(&c.under_test, x, &p)?.0,
                        tsallis_exp_closed(q, x),
                    ))
                }))
            },
        ),
        case(
            S,
            "coefficient law of e_q",
            "[n]_(q−1)·c_n = c_(n−1)",
            1e-13,
            move |c| {
                let coeffs = phi_exp_coefficients(&c.under_test, 60)?;
                max_of(below_pole(&c.under_test, 60).map(|n| {
                    let n = n as usize;
                    Ok(rel(
                        tsallis_number(q, n as u64) * coeffs.coeff(n),
                        coeffs.coeff(n - 1),
                    ))
                }))
            },
        ),
        case(
            S,
            "Q recurrence",
            "Q_n = Q_(n−1)·(1+(q−1)n)",
            1e-14,
            move |_| {
                // a factor 1 + (q−1)n near zero cancels; measure against
                // |Q_(n−1)|·(1 + |q−1|n), which is |Q_n| for q ≥ 1
                max_of((1..=60u64).map(|n| {
                    let prev = borges_q(q, n - 1);
                    let nf = n as f64;
                    let want = prev * (1.0 + (q - 1.0) * nf);
                    let scale = prev.abs() * (1.0 + (q - 1.0).abs() * nf);
                    let err = (borges_q(q, n) - want).abs();
                    Ok(if scale == 0.0 { err } else { err / scale })
                }))
            },
        ),
        case(
            S,
            "Q as factorial ratio",
            "Q_(n−1) = n!/[n]_(q−1)!",
            1e-12,
            move |c| {
                let mut fact = 1.0;
                max_of(representable(&c.under_test, 20).map(|n| {
                    fact *= n as f64;
                    Ok(rel(
                        fact / c.under_test.phi_factorial(n, false)?,
                        borges_q(q, n - 1),
                    ))
                }))
            },
        ),
        case(
            S,
            "exponential-of-series recurrence",
            "c_n = a_n + (1/n)Σ j·c_(n−j)·a_j with a_n = (q−1)^(n−1)/n",
            1e-12,
            move |c| {
                let a = PowerSeries::new(
                    (0..=20)
                        .map(|n| {
                            if n == 0 {
                                0.0
                            } else {
                                (q - 1.0).powi(n - 1) / n as f64
                            }
                        })
                        .collect(),
                )?;
                let composed = exp_series_compose(&a, 20)?;
                let direct = phi_exp_coefficients(&c.under_test, 20)?;
                // relative to the summed term magnitudes, which equals |c_n| for
                // q ≥ 1; for q < 1 the terms cancel where c_n nearly vanishes
                max_of((0..=20).map(|n| {
                    let scale = (1..=n)
                        .map(|j| j as f64 * (a.coeff(j) * direct.coeff(n - j)).abs())
                        .sum::<f64>()
                        / n.max(1) as f64;
                    let err = (composed.coeff(n) - direct.coeff(n)).abs();
                    Ok(err / direct.coeff(n).abs().max(scale))
                }))
            },
        ),
        case(
            S,
            "Pochhammer identity",
            "(τ)_n = (n−1)!·τ·Σ_(j<n) (τ)_j/j!",
            1e-10,
            move |_| {
                let mut taus = vec![0.5, 2.0];
                if q != 1.0 {
                    taus.push(1.0 / (q - 1.0));
                }
                max_of(
                    taus.into_iter()
                        .map(|t| Ok(verify_pochhammer_identity(t, 25)?.max_residual)),
                )
            },
        ),
        case(
            S,
            "q-log as 2F1",
            "x·₂F₁(q,1;2;−x) = ln_q(1+x)",
            1e-10,
            move |_| {
                let p = EvalPolicy::default();
                max_of(grid(-0.85, 0.85, 17).into_iter().map(|x| {
                    let lhs = x * hyp2f1(q, 1.0, 2.0, -x, &p)?;
                    let rhs = tsallis_log(q, 1.0 + x)?;
                    Ok(if rhs == 0.0 { lhs.abs() } else { rel(lhs, rhs) })
                }))
            },
        ),
    ]);
    if q != 1.0 {
        cases.push(case(
            S,
            "e_q as 1F0",
            "e_q(x) = ₁F₀(1/(q−1); (q−1)x)",
            1e-10,
            move |c| {
                let p = EvalPolicy::default();
                let d = q - 1.0;
                let a = 1.0 / d;
                // keep z where the series is well conditioned: Σ|terms| ≤ (1−|z|)^(−|a|)
                // against a sum of (1−z)^(−a), and where the sum stays finite
                let usable = move |z: &f64| {
                    let log_sum = -a * (-z).ln_1p();
                    let log_cond = -a.abs() * (-z.abs()).ln_1p() - log_sum;
                    log_cond < 11.5 && log_sum.abs() < 690.0
                };
                max_of(grid(-0.85, 0.85, 17).into_iter().filter(usable).map(|z| {
                    let x = z / d;
                    Ok(rel(
                        hyp1f0(1.0 / d, z, &p)?,
                        phi_exp_series(&c.under_test, x, &p)?.0,
                    ))
                }))
            },
        ));
    }
    cases
}

fn spectrum_cases(ctx: &Context) -> Vec<Case> {
    const S: &str = "spectrum";
    let mut cases = Vec::new();
    if let Some(q) = ctx.q().filter(|q| (1.0..=2.0).contains(q)) {
        if q < 2.0 {
            cases.push(case(
                S,
                "E0 = 1/2",
                "E_0 = (φ(1)+φ(0))/2 = 1/2",
                0.0,
                |c| Ok((energy_level(&c.under_test, 0)? - 0.5).abs()),
            ));
        }
        cases.extend([
            case(
                S,
                "E1 = 1/2 + 1/q",
                "E_1 = (φ(2)+φ(1))/2 = 1/2 + 1/q",
                1e-12,
                move |c| Ok(rel(energy_level(&c.under_test, 1)?, 0.5 + 1.0 / q)),
            ),
            case(
                S,
                "rational level formula",
                "E_n = (2(q−1)n²+2n+2−q)/(2((q−1)²n²+(3−q)(q−1)n+2−q))",
                1e-12,
                move |c| {
                    let d = q - 1.0;
                    let upper = if q == 2.0 { 1 } else { 0 };
                    max_of((upper..=100u64).map(|n| {
                        let nf = n as f64;
                        let closed = 0.5 * (2.0 * d * nf * nf + 2.0 * nf + 2.0 - q)
                            / (d * d * nf * nf + (3.0 - q) * d * nf + 2.0 - q);
                        Ok(rel(energy_level(&c.under_test, n)?, closed))
                    }))
                },
            ),
            case(
                S,
                "gap formula and monotonicity",
                "E_(n+1) − E_n = (2−q)/((q−1)²n²+2(q−1)n+q(2−q)) ≥ 0",
                1e-10,
                move |c| {
                    let report = spectrum_report(&c.under_test, GAP_N_MAX)?;
                    let floor = table_floor(&c.under_test, &report.levels);
                    let d = q - 1.0;
                    max_of(report.gaps.iter().enumerate().map(|(n, g)| {
                        if *g < 0.0 {
                            return Ok(f64::INFINITY);
                        }
                        let nf = n as f64;
                        let want = if q == 2.0 && n == 0 {
                            0.5
                        } else {
                            (2.0 - q) / (d * d * nf * nf + 2.0 * d * nf + q * (2.0 - q))
                        };
                        let excess = ((g - want).abs() - floor).max(0.0);
                        Ok(if want == 0.0 { excess } else { excess / want })
                    }))
                },
            ),
        ]);
        if q > 1.0 {
            cases.push(case(
                S,
                "band top 1/(q−1)",
                "lim E_n = 1/(q−1)",
                1e-4,
                move |c| {
                    // the remainder 1/(q−1) − E_n decays like (2−q)/((q−1)²n)
                    let needed = (2e4 * (2.0 - q) / ((q - 1.0) * (q - 1.0))).ceil() as u64;
                    let n = if c.under_test.is_builtin() {
                        ASYMPTOTE_N.max(needed)
                    } else {
                        ASYMPTOTE_N
                    };
                    Ok((energy_level(&c.under_test, n)? - 1.0 / (q - 1.0)).abs())
                },
            ));
        }
    }
    if let Some(mu) = ctx.mu() {
        cases.extend([
            case(
                S,
                "mu ground level",
                "E_0 = φ_μ(1)/2 = 1/(2(1+μ))",
                1e-15,
                move |c| Ok(rel(energy_level(&c.under_test, 0)?, 0.5 / (1.0 + mu))),
            ),
            case(
                S,
                "mu gap formula",
                "E_(n+1) − E_n = 1/(μ²n²+2μ(μ+1)n+2μ+1)",
                1e-10,
                move |c| {
                    let report = spectrum_report(&c.under_test, GAP_N_MAX)?;
                    max_of(report.gaps.iter().enumerate().map(|(n, g)| {
                        let nf = n as f64;
                        Ok(rel(
                            *g,
                            1.0 / (mu * mu * nf * nf + 2.0 * mu * (mu + 1.0) * nf + 2.0 * mu + 1.0),
                        ))
                    }))
                },
            ),
        ]);
    }
    if ctx.has_fock_space() {
        cases.extend([
            case(
                S,
                "commutator on the truncated space",
                "[a,a†] = φ(N+1) − φ(N)",
                1e-12,
                |c| Ok(commutator_residual(&build_fock(&c.under_test, 64)?)),
            ),
            case(
                S,
                "number operator realization",
                "a†a = φ(N)",
                1e-14,
                |c| {
                    let t = build_fock(&c.under_test, 64)?;
                    let ada = t.a_dagger().dot(t.a());
                    max_of((0..64).map(|n| Ok(rel(ada[[n, n]], c.under_test.phi(n as u64)?))))
                },
            ),
            case(S, "Hamiltonian commutes with N", "[H, N] = 0", 1e-14, |c| {
                let t = build_fock(&c.under_test, 64)?;
                let h = hamiltonian(&t)?.matrix;
                let comm = h.dot(t.n_op()) - t.n_op().dot(&h);
                Ok(comm.iter().fold(0.0, |w, v| w.max(v.abs())))
            }),
            case(
                S,
                "ladder states from the vacuum",
                "|n⟩ = a†ⁿ|0⟩/√(φ(n)!)",
                1e-12,
                |c| {
                    let t = build_fock(&c.under_test, 16)?;
                    max_of((0..16).map(|n| {
                        let v = state_from_vacuum(&t, n)?;
                        Ok(v.iter()
                            .enumerate()
                            .map(|(i, x)| (x - if i == n { 1.0 } else { 0.0 }).abs())
                            .fold(0.0, f64::max))
                    }))
                },
            ),
        ]);
    }
    cases
}

/// Rounding floor of a gap formed from a tabulated φ. Tables hold rounded
/// f64 entries, so E_(n+1) − E_n carries an error of a few ulps of E_n that
/// no summation can remove; closed-form schemes are exact here.
fn table_floor(s: &DeformationScheme, levels: &[f64]) -> f64 {
    if !s.is_builtin() {
        4.0 * f64::EPSILON * levels.iter().fold(0.0, |m: f64, e| m.max(e.abs()))
    } else {
        0.0
    }
}

/// Amplitudes well inside the disk: |α|² ∈ {0.1, 0.4, 0.64}·R, or up to 4
/// for a disk of radius above 10.
fn amplitudes(radius: f64) -> Vec<Complex64> {
    // a huge radius (near the boson limit) would overflow e_φ(|α|²)
    let squares: Vec<f64> = if radius <= 10.0 {
        [0.1, 0.4, 0.64].iter().map(|f| f * radius).collect()
    } else {
        vec![0.25, 1.0, 4.0]
    };
    squares
        .into_iter()
        .flat_map(|r2| [0.0, 0.7, 2.4].map(|t| Complex64::from_polar(r2.sqrt(), t)))
        .collect()
}

fn coherent_cases(ctx: &Context) -> Vec<Case> {
    const S: &str = "coherent";
    if !ctx.has_fock_space() || ctx.radius() == 0.0 {
        return Vec::new();
    }
    let mut cases = vec![
        case(
            S,
            "annihilation eigenvalue",
            "a|α⟩ = α|α⟩",
            1e-8,
            |c| {
                max_of(
                    amplitudes(c.radius())
                        .into_iter()
                        .map(|a| eigen_residual(&coherent_state(&c.under_test, a, None)?)),
                )
            },
        ),
        case(S, "normalization", "Σ_n |⟨n|α⟩|² = 1", 1e-8, |c| {
            max_of(amplitudes(c.radius()).into_iter().map(|a| {
                Ok(expected_n(&coherent_state(&c.under_test, a, None)?)
                    .tail_mass
                    .abs())
            }))
        }),
    ];
    let Some(q) = ctx.q() else {
        cases.push(case(
            S,
            "Bargmann norm of e_phi",
            "⟨e_φ(αx)|e_φ(αx)⟩ = e_φ(|α|²)",
            1e-10,
            |c| {
                let p = EvalPolicy::default();
                // stay where φ(n)! is representable; fast-growing φ needs few terms
                let order = representable(&c.under_test, 120).last().unwrap_or(1) as usize;
                max_of(amplitudes(c.radius()).into_iter().map(|a| {
                    let e = phi_exp_coefficients(&c.under_test, order)?.scale_argument(a.norm());
                    let lhs = bargmann_inner_product(&e, &e, &c.under_test)?.re;
                    Ok(rel(lhs, phi_exp_series(&c.under_test, a.norm_sqr(), &p)?.0))
                }))
            },
        ));
        return cases;
    };
    cases.extend([
        case(
            S,
            "f-coherent coefficients",
            "√Q_(n−1)·αⁿ/√(n!) = αⁿ/√([n]_(q−1)!)",
            1e-12,
            move |c| {
                max_of(amplitudes(c.radius()).into_iter().map(|a| {
                    let f = f_coherent_coefficients(q, a, 33)?;
                    let s = coherent_state(&c.under_test, a, Some(33))?;
                    Ok(f.iter()
                        .zip(s.coefficients())
                        .map(|(x, y)| (x - y).norm() / y.norm().max(f64::MIN_POSITIVE))
                        .fold(0.0, f64::max))
                }))
            },
        ),
        case(
            S,
            "Bargmann norm of e_q",
            "⟨e_q(αx)|e_q(αx)⟩ = e_q(|α|²)",
            1e-10,
            move |c| {
                let r = c.radius().min(4.0);
                // the order-40 truncation tail stays below 1e-10 for |α|² ≤ 0.4·R
                max_of([0.1, 0.25, 0.4].into_iter().map(|f| {
                    let a = (f * r).sqrt();
                    let e = phi_exp_coefficients(&c.under_test, 40)?.scale_argument(a);
                    let lhs = bargmann_inner_product(&e, &e, &c.under_test)?.re;
                    Ok(rel(lhs, tsallis_exp_closed(q, a * a)))
                }))
            },
        ),
    ]);
    if q == 2.0 {
        cases.push(case(
            S,
            "harmonious normalization",
            "N(α) = √(1 − |α|²)",
            1e-14,
            |c| {
                max_of([0.1, 0.5, 0.8, 0.95].into_iter().map(|r| {
                    let s = coherent_state(&c.under_test, Complex64::new(r, 0.0), Some(16))?;
                    Ok((s.norm_const() - (1.0 - r * r).sqrt()).abs())
                }))
            },
        ));
    }
    cases
}

/// Fixed coefficients standing in for a generic polynomial.
fn sample_series(order: usize) -> PowerSeries {
    let coeffs = (0..=order)
        .map(|n| ((n as f64 * 1.618_033_988_75).fract() - 0.5) * 2.0)
        .collect();
    PowerSeries::new(coeffs).expect("non-empty")
}

fn calculus_cases(ctx: &Context) -> Vec<Case> {
    const C: &str = "calculus";
    let mut cases = Vec::new();
    if ctx.has_fock_space() {
        cases.push(case(
            C,
            "Bargmann orthonormality",
            "⟨ξ_m|ξ_n⟩ = δ_mn with ξ_n = xⁿ/√(φ(n)!)",
            1e-12,
            |c| {
                let s = &c.under_test;
                let xi = |n: usize| -> Result<PowerSeries> {
                    let mut v = vec![0.0; n + 1];
                    v[n] = 1.0 / s.phi_factorial(n as u64, false)?.sqrt();
                    PowerSeries::new(v)
                };
                let top = representable(s, 30).last().unwrap_or(0) as usize;
                let basis = (0..=top).map(xi).collect::<Result<Vec<_>>>()?;
                max_of(basis.iter().enumerate().flat_map(|(m, a)| {
                    basis.iter().enumerate().map(move |(n, b)| {
                        let ip = bargmann_inner_product(a, b, s)?;
                        Ok((ip.re - if m == n { 1.0 } else { 0.0 }).abs() + ip.im.abs())
                    })
                }))
            },
        ));
    }
    let difference: Option<(&'static str, &'static str)> = match ctx.declared.kind() {
        SchemeKind::QOsc { .. } => Some((
            "Jackson derivative on monomials",
            "(xⁿ − (qx)ⁿ)/((1−q)x) = [n]_q x^(n−1)",
        )),
        SchemeKind::SymmetricQ { .. } => Some((
            "symmetric derivative on monomials",
            "(f(x/q) − f(qx))/((1/q−q)x) = [n] x^(n−1)",
        )),
        SchemeKind::PQ { .. } => Some((
            "pq derivative on monomials",
            "(f(px) − f(qx))/((p−q)x) = [n]_(p q) x^(n−1)",
        )),
        _ => None,
    };
    if let Some((name, anchor)) = difference {
        let kind = ctx.declared.kind().clone();
        cases.push(case(C, name, anchor, 1e-10, move |c| {
            max_of((0..=20u32).flat_map(|n| {
                let kind = kind.clone();
                [-1.1, -0.4, 0.3, 0.75, 1.2].into_iter().map(move |x: f64| {
                    let f = SampledFunction::monomial(n);
                    let got = match &kind {
                        SchemeKind::QOsc { q } => jackson_derivative(&f, x, *q)?,
                        SchemeKind::SymmetricQ { q } => symmetric_derivative(&f, x, *q)?,
                        SchemeKind::PQ { p, q } => pq_derivative(&f, x, *p, *q)?,
                        _ => unreachable!("filtered above"),
                    };
                    let want =
                        derivative_on_series(&PowerSeries::monomial(n as usize), &c.under_test)?
                            .eval(x);
                    Ok((got - want).abs() / want.abs().max(1.0))
                })
            }))
        }));
    }
    let Some(q) = ctx.q() else { return cases };
    cases.extend([
        case(
            C,
            "series derivative on monomials",
            "D_φ xⁿ = [n]_(q−1) x^(n−1)",
            1e-15,
            move |c| {
                // skip the pole of φ_T for q < 1
                let finite = (1..=40usize).filter(|n| tsallis_number(q, *n as u64).is_finite());
                max_of(finite.map(|n| {
                    let d = derivative_on_series(&PowerSeries::monomial(n), &c.under_test)?;
                    Ok(rel(d.coeff(n - 1), tsallis_number(q, n as u64)))
                }))
            },
        ),
        case(
            C,
            "series eigenfunction",
            "D_(T,q) e_q(kx) = k·e_q(kx) coefficientwise",
            1e-12,
            move |c| {
                max_of([0.3, 0.7].into_iter().map(|k| {
                    let e = phi_exp_coefficients(&c.under_test, 30)?.scale_argument(k);
                    let d = tsallis_derivative_series(&e, q)?;
                    // at a pole of φ_T the series terminates and φ·c is ∞·0
                    let finite = (0..30).filter(|n| tsallis_number(q, *n as u64 + 1).is_finite());
                    max_of(finite.map(|n| Ok(rel(d.coeff(n), k * e.coeff(n)))))
                }))
            },
        ),
    ]);
    // the integral divides by φ(n+1), which has a pole for q < 1
    if ctx.has_fock_space() {
        cases.push(case(
            C,
            "derivative inverts the integral",
            "D_(T,q) ∘ I_(T,q) = id",
            1e-13,
            move |_| {
                let s = sample_series(12);
                let back = tsallis_derivative_series(&tsallis_integral_series(&s, q)?, q)?;
                max_of((0..=12).map(|n| Ok((back.coeff(n) - s.coeff(n)).abs())))
            },
        ));
    }
    if (1.0..=2.0).contains(&q) {
        let eigen_name = if q == 2.0 {
            "D e₂(kx) = k e₂(kx)"
        } else {
            "D e_q(kx) = k e_q(kx)"
        };
        cases.extend([
            case(
                C,
                eigen_name,
                "∫₀¹ F′(t^(q−1)x) dt = k·e_q(kx) for F = e_q(k·)",
                1e-8,
                move |_| {
                    let quad = QuadratureSpec::default();
                    max_of([0.3, 0.7].into_iter().flat_map(|k| {
                        // stop short of the singular edge, and at kx = 20 near q = 1
                        let edge = if q == 1.0 {
                            f64::INFINITY
                        } else {
                            1.0 / ((q - 1.0) * k)
                        };
                        let hi = (0.9 * edge).min(20.0 / k);
                        let f = SampledFunction::tsallis_exp(q, k);
                        grid(-2.0, hi, 10)
                            .into_iter()
                            .map(|x| {
                                let got = tsallis_derivative_quadrature(&f, x, q, &quad)?.value;
                                let want = k * tsallis_exp_closed(q, k * x);
                                Ok((got - want).abs() / want.abs().max(1.0))
                            })
                            .collect::<Vec<_>>()
                    }))
                },
            ),
            case(
                C,
                "quadrature derivative on monomials",
                "∫₀¹ F′(t^(q−1)x) dt = [n]_(q−1) x^(n−1) for F = xⁿ",
                1e-10,
                move |_| {
                    let quad = QuadratureSpec::default();
                    max_of((0..=16u32).flat_map(|n| {
                        [-0.8, 0.3, 1.0].into_iter().map(move |x: f64| {
                            let got = tsallis_derivative_quadrature(
                                &SampledFunction::monomial(n),
                                x,
                                q,
                                &quad,
                            )?
                            .value;
                            let want = if n == 0 {
                                0.0
                            } else {
                                tsallis_number(q, n as u64) * x.powi(n as i32 - 1)
                            };
                            Ok((got - want).abs() / want.abs().max(1.0))
                        })
                    }))
                },
            ),
            case(
                C,
                "quadrature agrees with series",
                "∫₀¹ p′(t^(q−1)x) dt = Σ [n]_(q−1) c_n x^(n−1)",
                1e-10,
                move |_| {
                    let quad = QuadratureSpec::default();
                    let s = sample_series(16);
                    let ds = tsallis_derivative_series(&s, q)?;
                    let f = SampledFunction::from_series(&s);
                    max_of([-0.9, -0.3, 0.4, 0.9].into_iter().map(|x| {
                        let got = tsallis_derivative_quadrature(&f, x, q, &quad)?.value;
                        Ok((got - ds.eval(x)).abs() / ds.eval(x).abs().max(1.0))
                    }))
                },
            ),
        ]);
    }
    cases
}

fn cases_for(suite: &str, ctx: &Context) -> std::result::Result<Vec<Case>, UsageError> {
    Ok(match suite {
        "series" => series_cases(ctx),
        "spectrum" => spectrum_cases(ctx),
        "coherent" => coherent_cases(ctx),
        "calculus" => calculus_cases(ctx),
        "all" => SUITES
            .iter()
            .flat_map(|s| cases_for(s, ctx).unwrap_or_default())
            .collect(),
        other => {
            return Err(UsageError::new(format!(
                "unknown suite `{other}` (expected series, spectrum, coherent, calculus or all)"
            )))
        }
    })
}

/// The declared Tsallis table with mantissa bit `bit` of φ(n) flipped.
pub fn mutated_scheme(
    declared: &DeformationScheme,
    n: u64,
    bit: u32,
) -> std::result::Result<DeformationScheme, CliError> {
    let q = declared
        .tsallis_q()
        .ok_or_else(|| UsageError::new("mutate_phi needs a tsallis scheme"))?;
    if !(1..=MUTATION_TABLE_MAX).contains(&n) || bit > 51 {
        return Err(UsageError::new(format!(
            "mutate_phi wants n in 1..={MUTATION_TABLE_MAX} and a mantissa bit in 0..=51"
        ))
        .into());
    }
    let mut table: Vec<f64> = (0..=MUTATION_TABLE_MAX)
        .map(|k| tsallis_number(q, k))
        .collect();
    let idx = n as usize;
    table[idx] = f64::from_bits(table[idx].to_bits() ^ (1u64 << bit));
    Ok(DeformationScheme::custom(table)?)
}

fn parse_mutation(raw: &str) -> std::result::Result<(u64, u32), UsageError> {
    let bad = || UsageError::new(format!("mutate_phi expects n:bit, got `{raw}`"));
    let (n, bit) = raw.split_once(':').ok_or_else(bad)?;
    Ok((
        n.parse().map_err(|_| bad())?,
        bit.parse().map_err(|_| bad())?,
    ))
}

/// Runs `suite` for `declared`, exercising `under_test` (defaults to the
/// declared scheme). Cases run concurrently; the report is sorted by suite
/// and case name.
pub fn run_suite(
    suite: &str,
    declared: &DeformationScheme,
    under_test: Option<DeformationScheme>,
) -> std::result::Result<VerificationReport, UsageError> {
    let ctx = Context {
        under_test: under_test.unwrap_or_else(|| declared.clone()),
        declared: declared.clone(),
    };
    let cases = cases_for(suite, &ctx)?;
    let mut reports: Vec<CaseReport> = cases
        .par_iter()
        .map(|c| {
            let (max_residual, error) = match (c.check)(&ctx) {
                Ok(r) => (r, None),
                Err(e) => (f64::INFINITY, Some(e.to_string())),
            };
            CaseReport {
                suite: c.suite,
                name: c.name.clone(),
                anchor: c.anchor,
                pass: error.is_none() && max_residual <= c.tolerance,
                max_residual,
                tolerance: c.tolerance,
                error,
            }
        })
        .collect();
    reports.sort_by(|a, b| (a.suite, &a.name).cmp(&(b.suite, &b.name)));
    Ok(VerificationReport {
        suite: suite.to_string(),
        scheme: declared.to_string(),
        overall: reports.iter().all(|c| c.pass),
        cases: reports,
    })
}

pub(super) fn run(req: &CommandRequest) -> std::result::Result<Rendered, CliError> {
    let declared = req.parsed_scheme()?;
    let suite = req.suite.as_deref().unwrap_or("all");
    let under_test = match req.params.get("mutate_phi") {
        Some(raw) => {
            let (n, bit) = parse_mutation(raw)?;
            Some(mutated_scheme(&declared, n, bit)?)
        }
        None => None,
    };
    let report = run_suite(suite, &declared, under_test)?;
    let mut table = Table::new(vec!["suite", "name", "max_residual", "tolerance", "pass"]);
    for c in &report.cases {
        table.push(vec![
            Cell::Text(c.suite.to_string()),
            Cell::Text(c.name.clone()),
            Cell::Float(c.max_residual),
            Cell::Float(c.tolerance),
            Cell::Bool(c.pass),
        ]);
    }
    let mut counts = BTreeMap::new();
    counts.insert("cases", report.cases.len());
    counts.insert("failed", report.cases.iter().filter(|c| !c.pass).count());
    Ok(Rendered {
        scheme: declared.to_string(),
        results: serde_json::to_value(&report).expect("report serializes"),
        diagnostics: serde_json::to_value(counts).expect("counts serialize"),
        table,
        exit_code: if report.overall {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::execute;

    fn tsallis(q: f64) -> DeformationScheme {
        DeformationScheme::tsallis(q).unwrap()
    }

    fn assert_all_pass(r: &VerificationReport) {
        for c in &r.cases {
            assert!(
                c.pass,
                "{} / {}: {} > {} ({:?})",
                c.suite, c.name, c.max_residual, c.tolerance, c.error
            );
        }
        assert!(r.overall);
    }

    #[test]
    fn default_scheme_passes_every_suite() {
        let r = run_suite("all", &tsallis(1.5), None).unwrap();
        assert!(r.cases.len() > 20);
        assert_all_pass(&r);
    }

    #[test]
    fn named_cases_exist() {
        let r = run_suite("spectrum", &tsallis(1.5), None).unwrap();
        assert!(r.cases.iter().any(|c| c.name == "E1 = 1/2 + 1/q" && c.pass));
        let r = run_suite("calculus", &tsallis(2.0), None).unwrap();
        assert!(r
            .cases
            .iter()
            .any(|c| c.name == "D e₂(kx) = k e₂(kx)" && c.pass));
    }

    #[test]
    fn other_parameters_pass() {
        for s in [
            "tsallis:q=1",
            "tsallis:q=1.1",
            "tsallis:q=2",
            "tsallis:q=0.5",
            "tsallis:q=0.7",
            "boson",
            "mu:mu=0.7",
            "qosc:q=0.6",
            "symq:q=0.8",
            "pq:p=1,q=0.4",
        ] {
            let scheme: DeformationScheme = s.parse().unwrap();
            assert_all_pass(&run_suite("all", &scheme, None).unwrap());
        }
    }

    #[test]
    fn near_limit_and_extreme_parameters_pass() {
        // near q = 1 the radius is huge; far out φ(n)! leaves double range
        for s in [
            "tsallis:q=0.01",
            "tsallis:q=0.9",
            "tsallis:q=0.9999",
            "tsallis:q=1.0001",
            "tsallis:q=1.01",
            "tsallis:q=1.05",
            "qosc:q=0.9999",
            "qosc:q=10",
            "symq:q=0.1",
            "pq:p=-0.5,q=0.3",
            "mu:mu=0.0001",
            "mu:mu=1000",
        ] {
            let scheme: DeformationScheme = s.parse().unwrap();
            assert_all_pass(&run_suite("all", &scheme, None).unwrap());
        }
    }

    #[test]
    fn report_is_sorted_and_consistent() {
        let r = run_suite("all", &tsallis(1.3), None).unwrap();
        let keys: Vec<_> = r.cases.iter().map(|c| (c.suite, c.name.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let mut dedup = sorted.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), sorted.len());
    }

    #[test]
    fn unmodified_table_passes() {
        // a tabulated copy of φ_T behaves exactly like the closed form
        let declared = tsallis(1.5);
        let table: Vec<f64> = (0..=MUTATION_TABLE_MAX)
            .map(|k| tsallis_number(1.5, k))
            .collect();
        let r = run_suite(
            "all",
            &declared,
            Some(DeformationScheme::custom(table).unwrap()),
        )
        .unwrap();
        assert_all_pass(&r);
    }

    #[test]
    fn single_bit_mutation_is_caught() {
        for n in [1, 2, 3, 10, 40] {
            let m = mutated_scheme(&tsallis(1.5), n, 30).unwrap();
            let r = run_suite("all", &tsallis(1.5), Some(m)).unwrap();
            assert!(!r.overall, "mutation at n = {n} escaped");
        }
    }

    #[test]
    fn cli_exit_codes() {
        assert_eq!(execute(&["verify", "spectrum"]).code, EXIT_OK);
        assert_eq!(
            execute(&["verify", "spectrum", "--mutate_phi", "2:40"]).code,
            EXIT_VERIFY_FAILED
        );
        assert_eq!(
            execute(&["verify", "nonsense"]).code,
            super::super::EXIT_USAGE
        );
        assert_eq!(
            execute(&["verify", "series", "--mutate_phi", "2"]).code,
            super::super::EXIT_USAGE
        );
        assert_eq!(
            execute(&[
                "verify",
                "series",
                "--scheme",
                "boson",
                "--mutate_phi",
                "2:3"
            ])
            .code,
            super::super::EXIT_USAGE
        );
        let out = execute(&["verify", "spectrum", "--format", "csv"]);
        assert!(out
            .stdout
            .starts_with("suite,name,max_residual,tolerance,pass\n"));
    }
}
