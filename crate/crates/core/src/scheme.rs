//! Deformation schemes and their basic numbers.
//!
//! Every deformed oscillator handled by this crate is fixed by a structure
//! function φ(n) with φ(0) = 0, so that a†a = φ(N) and aa† = φ(N+1).
//! The built-in families are
//!
//! | descriptor           | φ(n)                                  |
//! |----------------------|---------------------------------------|
//! | `boson`              | n                                     |
//! | `qosc:q=…`           | [n]_q = (1 − qⁿ)/(1 − q)              |
//! | `symq:q=…`           | [n]_(q⁻¹,q) = (q⁻ⁿ − qⁿ)/(q⁻¹ − q)    |
//! | `pq:p=…,q=…`         | [n]_(p,q) = (pⁿ − qⁿ)/(p − q)         |
//! | `tsallis:q=…`        | [n]_(q−1) = n/(1 + (q − 1)(n − 1))    |
//! | `mu:mu=…`            | n/(1 + μn)                            |
//! | `custom:phi=0\|1\|…` | finite table                          |
//!
//! Points where the closed forms degenerate to 0/0 (q = 1, p = q) are
//! evaluated through their analytic limits, never through the quotient.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// The deformation family together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeKind {
    Boson,
    QOsc { q: f64 },
    SymmetricQ { q: f64 },
    PQ { p: f64, q: f64 },
    Tsallis { q: f64 },
    Mu { mu: f64 },
    CustomPhi(Arc<[f64]>),
}

/// A validated deformation scheme.
///
/// Parameter domains are checked once, at construction; every other
/// operation can assume them.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationScheme {
    kind: SchemeKind,
}

fn check_finite(scheme: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            scheme,
            detail: format!("{name} must be finite, got {v}"),
        })
    }
}

impl DeformationScheme {
    pub fn boson() -> Self {
        Self {
            kind: SchemeKind::Boson,
        }
    }

    /// Heine q-oscillator; requires q > 0 and q ≠ 1.
    pub fn q_osc(q: f64) -> Result<Self> {
        check_finite("qosc", "q", q)?;
        if q <= 0.0 || q == 1.0 {
            return Err(Error::InvalidParameter {
                scheme: "qosc",
                detail: format!("q must satisfy q > 0 and q != 1, got {q}"),
            });
        }
        Ok(Self {
            kind: SchemeKind::QOsc { q },
        })
    }

    /// Symmetric (q⁻¹, q)-oscillator; requires q > 0 and q ≠ 1.
    pub fn symmetric_q(q: f64) -> Result<Self> {
        check_finite("symq", "q", q)?;
        if q <= 0.0 || q == 1.0 {
            return Err(Error::InvalidParameter {
                scheme: "symq",
                detail: format!("q must satisfy q > 0 and q != 1, got {q}"),
            });
        }
        Ok(Self {
            kind: SchemeKind::SymmetricQ { q },
        })
    }

    /// Two-parameter (p, q)-oscillator; requires p ≠ q.
    pub fn pq(p: f64, q: f64) -> Result<Self> {
        check_finite("pq", "p", p)?;
        check_finite("pq", "q", q)?;
        if p == q {
            return Err(Error::InvalidParameter {
                scheme: "pq",
                detail: format!("p and q must differ, got p = q = {p}"),
            });
        }
        Ok(Self {
            kind: SchemeKind::PQ { p, q },
        })
    }

    /// Tsallis oscillator with φ_T(n) = [n]_(q−1); requires q ∈ (0, 2].
    pub fn tsallis(q: f64) -> Result<Self> {
        check_finite("tsallis", "q", q)?;
        if q <= 0.0 || q > 2.0 {
            return Err(Error::InvalidParameter {
                scheme: "tsallis",
                detail: format!(
                    "q out of range (0,2]: got {q}; the band spectrum is only established for 1 <= q <= 2"
                ),
            });
        }
        Ok(Self {
            kind: SchemeKind::Tsallis { q },
        })
    }

    /// μ-oscillator with φ(n) = n/(1 + μn); requires μ ≥ 0.
    pub fn mu(mu: f64) -> Result<Self> {
        check_finite("mu", "mu", mu)?;
        if mu < 0.0 {
            return Err(Error::InvalidParameter {
                scheme: "mu",
                detail: format!("mu must be >= 0, got {mu}"),
            });
        }
        Ok(Self {
            kind: SchemeKind::Mu { mu },
        })
    }

    /// A structure function given as the finite table φ(0), φ(1), ….
    ///
    /// The table must start with φ(0) = 0 and hold finite non-negative
    /// values. Evaluating beyond the table is an error.
    pub fn custom(table: impl Into<Arc<[f64]>>) -> Result<Self> {
        let table = table.into();
        if table.len() < 2 {
            return Err(Error::InvalidParameter {
                scheme: "custom",
                detail: "table needs at least φ(0) and φ(1)".into(),
            });
        }
        if table[0] != 0.0 {
            return Err(Error::InvalidParameter {
                scheme: "custom",
                detail: format!("φ(0) must be 0, got {}", table[0]),
            });
        }
        if let Some((n, v)) = table
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidParameter {
                scheme: "custom",
                detail: format!("φ({n}) = {v} is not a finite non-negative number"),
            });
        }
        Ok(Self {
            kind: SchemeKind::CustomPhi(table),
        })
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    /// Short family name used in descriptors.
    pub fn family(&self) -> &'static str {
        match self.kind {
            SchemeKind::Boson => "boson",
            SchemeKind::QOsc { .. } => "qosc",
            SchemeKind::SymmetricQ { .. } => "symq",
            SchemeKind::PQ { .. } => "pq",
            SchemeKind::Tsallis { .. } => "tsallis",
            SchemeKind::Mu { .. } => "mu",
            SchemeKind::CustomPhi(_) => "custom",
        }
    }

    /// The Tsallis parameter, if this is the Tsallis family.
    pub fn tsallis_q(&self) -> Option<f64> {
        match self.kind {
            SchemeKind::Tsallis { q } => Some(q),
            _ => None,
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.kind, SchemeKind::CustomPhi(_))
    }

    /// The structure function φ(n).
    pub fn phi(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return match &self.kind {
                SchemeKind::CustomPhi(t) => Ok(t[0]),
                _ => Ok(0.0),
            };
        }
        let value = match &self.kind {
            SchemeKind::Boson => n as f64,
            SchemeKind::QOsc { q } => q_number(*q, n),
            SchemeKind::SymmetricQ { q } => symmetric_q_number(*q, n),
            SchemeKind::PQ { p, q } => pq_number(*p, *q, n),
            SchemeKind::Tsallis { q } => tsallis_number(*q, n),
            SchemeKind::Mu { mu } => mu_number(*mu, n),
            SchemeKind::CustomPhi(t) => match usize::try_from(n).ok().and_then(|i| t.get(i)) {
                Some(v) => *v,
                None => {
                    return Err(Error::Range {
                        n,
                        detail: format!("custom table only defines φ(0..{})", t.len()),
                    })
                }
            },
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Range {
                n,
                detail: format!("φ({n}) of {self} is not representable ({value})"),
            })
        }
    }

    /// φ(n)! = φ(1)φ(2)…φ(n), with φ(0)! = 1.
    ///
    /// With `log_domain` the natural logarithm of the product is returned,
    /// which requires every factor to be positive.
    pub fn phi_factorial(&self, n: u64, log_domain: bool) -> Result<f64> {
        if log_domain {
            let mut acc = 0.0;
            for j in 1..=n {
                let v = self.phi(j)?;
                if v <= 0.0 {
                    return Err(Error::Domain(format!(
                        "log φ({n})! undefined: factor φ({j}) = {v} is not positive"
                    )));
                }
                acc += v.ln();
            }
            Ok(acc)
        } else {
            let mut acc = 1.0_f64;
            for j in 1..=n {
                acc *= self.phi(j)?;
                if !acc.is_finite() {
                    return Err(Error::Range {
                        n: j,
                        detail: format!("φ({j})! overflows double precision; use the log domain"),
                    });
                }
            }
            Ok(acc)
        }
    }

    /// Nonlinearity function f(n) = √(φ(n)/n) of the f-oscillator picture.
    pub fn nonlinearity_f(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Precondition(
                "the nonlinearity function is defined for n >= 1".into(),
            ));
        }
        if let SchemeKind::Tsallis { q } = self.kind {
            let d = 1.0 + (q - 1.0) * (n - 1) as f64;
            if d <= 0.0 {
                return Err(Error::Domain(format!(
                    "f({n}) undefined for tsallis q = {q}: 1 + (q-1)(n-1) = {d}"
                )));
            }
            return Ok(1.0 / d.sqrt());
        }
        let ratio = self.phi(n)? / n as f64;
        if ratio < 0.0 {
            return Err(Error::Domain(format!(
                "f({n}) undefined: φ({n})/{n} = {ratio} is negative"
            )));
        }
        Ok(ratio.sqrt())
    }
}

/// Heine's q-number [n]_q = (1 − qⁿ)/(1 − q); equals n at q = 1.
pub fn q_number(q: f64, n: u64) -> f64 {
    if q == 1.0 {
        return n as f64;
    }
    let d = q - 1.0;
    if d.abs() < 1e-3 {
        // (qⁿ − 1)/(q − 1) without cancellation near q = 1
        (n as f64 * d.ln_1p()).exp_m1() / d
    } else {
        (powu(q, n) - 1.0) / d
    }
}

/// Symmetric basic number [n]_(q⁻¹,q) = (q⁻ⁿ − qⁿ)/(q⁻¹ − q); equals n at q = 1.
pub fn symmetric_q_number(q: f64, n: u64) -> f64 {
    if q == 1.0 {
        return n as f64;
    }
    let l = q.ln();
    (n as f64 * l).sinh() / l.sinh()
}

/// Twin-basic number [n]_(p,q) = (pⁿ − qⁿ)/(p − q); equals n·p^(n−1) at p = q.
pub fn pq_number(p: f64, q: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let scale = p.abs().max(q.abs());
    if p == q || (p - q).abs() <= 1e-4 * scale {
        // Σ p^k q^(n−1−k), summed in both directions so that the result is
        // exactly symmetric under p ↔ q.
        let terms: Vec<f64> = (0..n).map(|k| powu(p, k) * powu(q, n - 1 - k)).collect();
        let up: f64 = terms.iter().sum();
        let down: f64 = terms.iter().rev().sum();
        return 0.5 * (up + down);
    }
    (powu(p, n) - powu(q, n)) / (p - q)
}

/// Tsallis deformed number [n]_(q−1) = n/(1 + (q − 1)(n − 1)).
pub fn tsallis_number(q: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    n / (1.0 + (q - 1.0) * (n - 1.0))
}

/// μ-number n/(1 + μn).
pub fn mu_number(mu: f64, n: u64) -> f64 {
    let n = n as f64;
    n / (1.0 + mu * n)
}

fn powu(x: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(k) => x.powi(k),
        Err(_) => x.powf(n as f64),
    }
}

impl fmt::Display for DeformationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SchemeKind::Boson => write!(f, "boson"),
            SchemeKind::QOsc { q } => write!(f, "qosc:q={q}"),
            SchemeKind::SymmetricQ { q } => write!(f, "symq:q={q}"),
            SchemeKind::PQ { p, q } => write!(f, "pq:p={p},q={q}"),
            SchemeKind::Tsallis { q } => write!(f, "tsallis:q={q}"),
            SchemeKind::Mu { mu } => write!(f, "mu:mu={mu}"),
            SchemeKind::CustomPhi(t) => {
                write!(f, "custom:phi=")?;
                for (i, v) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for DeformationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |detail: String| Error::Parse {
            descriptor: s.to_string(),
            detail,
        };
        let (family, rest) = match s.split_once(':') {
            Some((f, r)) => (f.trim(), r.trim()),
            None => (s.trim(), ""),
        };
        let mut params: Vec<(&str, &str)> = Vec::new();
        if !rest.is_empty() {
            for item in rest.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| parse_err(format!("expected key=value, got `{item}`")))?;
                let k = k.trim();
                if params.iter().any(|(seen, _)| *seen == k) {
                    return Err(parse_err(format!("duplicate key `{k}`")));
                }
                params.push((k, v.trim()));
            }
        }
        let expect = |keys: &[&str]| -> Result<Vec<f64>> {
            if let Some((k, _)) = params.iter().find(|(k, _)| !keys.contains(k)) {
                return Err(parse_err(format!("unknown key `{k}` for {family}")));
            }
            keys.iter()
                .map(|key| {
                    let raw = params
                        .iter()
                        .find(|(k, _)| k == key)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| parse_err(format!("missing key `{key}`")))?;
                    raw.parse::<f64>()
                        .map_err(|_| parse_err(format!("`{raw}` is not a number")))
                })
                .collect()
        };
        match family {
            "boson" => {
                expect(&[])?;
                Ok(Self::boson())
            }
            "qosc" | "q" => Self::q_osc(expect(&["q"])?[0]),
            "symq" | "symmetric" => Self::symmetric_q(expect(&["q"])?[0]),
            "pq" => {
                let v = expect(&["p", "q"])?;
                Self::pq(v[0], v[1])
            }
            "tsallis" => Self::tsallis(expect(&["q"])?[0]),
            "mu" => Self::mu(expect(&["mu"])?[0]),
            "custom" => {
                if params.len() != 1 || params[0].0 != "phi" {
                    return Err(parse_err(
                        "custom scheme takes exactly `phi=v0|v1|…`".into(),
                    ));
                }
                let table = params[0]
                    .1
                    .split('|')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|_| parse_err(format!("`{v}` is not a number")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Self::custom(table)
            }
            other => Err(parse_err(format!("unknown scheme family `{other}`"))),
        }
    }
}

impl Serialize for DeformationScheme {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn builtins() -> Vec<DeformationScheme> {
        vec![
            DeformationScheme::boson(),
            DeformationScheme::q_osc(0.7).unwrap(),
            DeformationScheme::q_osc(1.3).unwrap(),
            DeformationScheme::symmetric_q(0.8).unwrap(),
            DeformationScheme::pq(2.0, 0.5).unwrap(),
            DeformationScheme::pq(0.5, 2.0).unwrap(),
            DeformationScheme::tsallis(0.7).unwrap(),
            DeformationScheme::tsallis(1.5).unwrap(),
            DeformationScheme::tsallis(2.0).unwrap(),
            DeformationScheme::mu(0.0).unwrap(),
            DeformationScheme::mu(0.3).unwrap(),
        ]
    }

    #[test]
    fn phi_examples() {
        let t2 = DeformationScheme::tsallis(2.0).unwrap();
        assert_eq!(t2.phi(5).unwrap(), 1.0);
        assert_eq!(
            DeformationScheme::tsallis(1.5).unwrap().phi(3).unwrap(),
            1.5
        );
        assert_eq!(
            DeformationScheme::pq(2.0, 1.0).unwrap().phi(3).unwrap(),
            7.0
        );
        for s in builtins() {
            assert_eq!(s.phi(0).unwrap(), 0.0, "{s}");
        }
    }

    #[test]
    fn phi_one_is_one_except_mu() {
        for s in builtins() {
            match s.kind() {
                SchemeKind::Mu { mu } => assert_eq!(s.phi(1).unwrap(), 1.0 / (1.0 + mu)),
                _ => assert_eq!(s.phi(1).unwrap(), 1.0, "{s}"),
            }
        }
    }

    #[test]
    fn factorial_examples() {
        for s in builtins() {
            assert_eq!(s.phi_factorial(0, false).unwrap(), 1.0);
        }
        let t2 = DeformationScheme::tsallis(2.0).unwrap();
        assert_eq!(t2.phi_factorial(7, false).unwrap(), 1.0);
        assert_eq!(
            DeformationScheme::boson().phi_factorial(5, false).unwrap(),
            120.0
        );
    }

    #[test]
    fn factorial_recurrence() {
        for s in builtins() {
            for n in 1..40 {
                let prev = s.phi_factorial(n - 1, false).unwrap();
                let cur = s.phi_factorial(n, false).unwrap();
                assert_relative_eq!(cur, prev * s.phi(n).unwrap(), max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn factorial_log_domain() {
        let pq = DeformationScheme::pq(2.0, 1.0).unwrap();
        assert!(matches!(
            pq.phi_factorial(200, false),
            Err(Error::Range { .. })
        ));
        let log = pq.phi_factorial(200, true).unwrap();
        let direct: f64 = (1..=200).map(|j| pq.phi(j).unwrap().ln()).sum();
        assert_relative_eq!(log, direct, max_relative = 1e-14);
        assert_relative_eq!(
            DeformationScheme::boson().phi_factorial(10, true).unwrap(),
            3628800f64.ln(),
            max_relative = 1e-15
        );
        // fermion-like (p,q) = (-1, 1) has φ(2) = 0
        let zero = DeformationScheme::pq(-1.0, 1.0).unwrap();
        assert_eq!(zero.phi(2).unwrap(), 0.0);
        assert!(matches!(zero.phi_factorial(3, true), Err(Error::Domain(_))));
    }

    #[test]
    fn pq_overflow_is_range_error() {
        let s = DeformationScheme::pq(3.0, 2.0).unwrap();
        match s.phi(5000) {
            Err(Error::Range { n, .. }) => assert_eq!(n, 5000),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn nonlinearity_examples() {
        let t2 = DeformationScheme::tsallis(2.0).unwrap();
        assert_eq!(t2.nonlinearity_f(4).unwrap(), 0.5);
        for n in 1..20 {
            assert_eq!(DeformationScheme::boson().nonlinearity_f(n).unwrap(), 1.0);
        }
        let t = DeformationScheme::tsallis(1.5).unwrap();
        assert_relative_eq!(
            t.nonlinearity_f(3).unwrap(),
            0.5f64.sqrt(),
            max_relative = 1e-15
        );
        // generic route agrees with the Tsallis shortcut
        for n in 1..30 {
            let generic = (t.phi(n).unwrap() / n as f64).sqrt();
            assert_relative_eq!(t.nonlinearity_f(n).unwrap(), generic, max_relative = 1e-14);
        }
        assert!(t.nonlinearity_f(0).is_err());
    }

    #[test]
    fn q_to_one_recovers_integers() {
        for q in [1.0 + 1e-8, 1.0 - 1e-8] {
            let schemes = [
                DeformationScheme::q_osc(q).unwrap(),
                DeformationScheme::symmetric_q(q).unwrap(),
                DeformationScheme::tsallis(q).unwrap(),
            ];
            for s in &schemes {
                for n in 0..=100u64 {
                    let v = s.phi(n).unwrap();
                    assert!((v - n as f64).abs() <= 1e-6 * n as f64, "{s} n={n} v={v}");
                }
            }
        }
        assert_eq!(q_number(1.0, 9), 9.0);
        assert_eq!(symmetric_q_number(1.0, 9), 9.0);
        assert_eq!(pq_number(1.5, 1.5, 3), 3.0 * 1.5 * 1.5);
    }

    #[test]
    fn reductions() {
        for q in [0.3, 0.9, 1.2, 2.5] {
            let qosc = DeformationScheme::q_osc(q).unwrap();
            let symq = DeformationScheme::symmetric_q(q).unwrap();
            let pq1 = DeformationScheme::pq(1.0, q).unwrap();
            let pqs = DeformationScheme::pq(1.0 / q, q).unwrap();
            for n in 0..=50 {
                assert_relative_eq!(
                    pq1.phi(n).unwrap(),
                    qosc.phi(n).unwrap(),
                    max_relative = 1e-12
                );
                assert_relative_eq!(
                    pqs.phi(n).unwrap(),
                    symq.phi(n).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(DeformationScheme::tsallis(2.5).is_err());
        assert!(DeformationScheme::tsallis(0.0).is_err());
        assert!(DeformationScheme::q_osc(1.0).is_err());
        assert!(DeformationScheme::q_osc(-0.5).is_err());
        assert!(DeformationScheme::symmetric_q(1.0).is_err());
        assert!(DeformationScheme::pq(0.5, 0.5).is_err());
        assert!(DeformationScheme::mu(-0.1).is_err());
        assert!(DeformationScheme::custom(vec![1.0, 1.0]).is_err());
        assert!(DeformationScheme::custom(vec![0.0, -1.0]).is_err());
        let msg = DeformationScheme::tsallis(3.0).unwrap_err().to_string();
        assert!(msg.contains("q out of range (0,2]"), "{msg}");
    }

    #[test]
    fn custom_table_does_not_extrapolate() {
        let s = DeformationScheme::custom(vec![0.0, 1.0, 1.5]).unwrap();
        assert_eq!(s.phi(2).unwrap(), 1.5);
        assert!(matches!(s.phi(3), Err(Error::Range { n: 3, .. })));
    }

    #[test]
    fn descriptor_examples() {
        let s: DeformationScheme = "tsallis:q=1.5".parse().unwrap();
        assert_eq!(s, DeformationScheme::tsallis(1.5).unwrap());
        assert_eq!(s.to_string(), "tsallis:q=1.5");
        let s: DeformationScheme = "pq:p=2,q=0.5".parse().unwrap();
        assert_eq!(s.to_string(), "pq:p=2,q=0.5");
        let s: DeformationScheme = "mu:mu=0.3".parse().unwrap();
        assert_eq!(s.to_string(), "mu:mu=0.3");
        assert_eq!(
            "boson".parse::<DeformationScheme>().unwrap().to_string(),
            "boson"
        );
        let s: DeformationScheme = "custom:phi=0|1|1.5".parse().unwrap();
        assert_eq!(s.to_string(), "custom:phi=0|1|1.5");
        assert!("tsallis:q=3".parse::<DeformationScheme>().is_err());
        assert!("tsallis:q=1.5,r=2".parse::<DeformationScheme>().is_err());
        assert!("tsallis".parse::<DeformationScheme>().is_err());
        assert!("wobble:q=1".parse::<DeformationScheme>().is_err());
        assert_eq!(serde_json::to_string(&s).unwrap(), "\"custom:phi=0|1|1.5\"");
    }

    proptest! {
        #[test]
        fn pq_symmetry(p in -3.0f64..3.0, q in -3.0f64..3.0, n in 0u64..=50) {
            prop_assume!(p != q);
            let a = DeformationScheme::pq(p, q).unwrap().phi(n).unwrap();
            let b = DeformationScheme::pq(q, p).unwrap().phi(n).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn descriptor_round_trip(q in 0.01f64..=2.0, p in 0.1f64..4.0, mu in 0.0f64..5.0) {
            for s in [
                DeformationScheme::tsallis(q).unwrap(),
                DeformationScheme::mu(mu).unwrap(),
            ] {
                let back: DeformationScheme = s.to_string().parse().unwrap();
                prop_assert_eq!(back, s);
            }
            if p != q {
                let s = DeformationScheme::pq(p, q).unwrap();
                let back: DeformationScheme = s.to_string().parse().unwrap();
                prop_assert_eq!(back, s);
            }
        }
    }
}
