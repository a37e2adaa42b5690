use num_complex::Complex64;
use serde_json::{json, Value};

use super::table::{Cell, Table};
use super::{verify, CliError, Command, CommandRequest, Rendered, UsageError, EXIT_OK};
use crate::calculus::{
    derivative_on_series, jackson_derivative, pq_derivative, symmetric_derivative,
    tsallis_derivative_quadrature, QuadratureSpec, SampledFunction,
};
use crate::coherent::{coherent_state, eigen_residual, expected_n};
use crate::fock::spectrum_report;
use crate::json::extended_value;
use crate::scheme::{DeformationScheme, SchemeKind};
use crate::series::{phi_exp_series, tsallis_exp_closed, EvalPolicy, PowerSeries};

pub(super) fn dispatch(req: &CommandRequest) -> Result<Rendered, CliError> {
    match req.command {
        Command::Numbers => numbers(req),
        Command::Exp => exp(req),
        Command::Spectrum => spectrum(req),
        Command::Coherent => coherent(req),
        Command::Derive => derive(req),
        Command::Verify => verify::run(req),
    }
}

fn rendered(
    scheme: &DeformationScheme,
    results: Value,
    diagnostics: Value,
    table: Table,
) -> Rendered {
    Rendered {
        scheme: scheme.to_string(),
        results,
        diagnostics,
        table,
        exit_code: EXIT_OK,
    }
}

fn numbers(req: &CommandRequest) -> Result<Rendered, CliError> {
    let scheme = req.parsed_scheme()?;
    let n_max: u64 = req.require("n_max")?;
    let mut table = Table::new(vec!["n", "phi", "phi_factorial", "f"]);
    for n in 0..=n_max {
        let f = if n == 0 {
            Cell::Missing
        } else {
            Cell::Float(scheme.nonlinearity_f(n)?)
        };
        table.push(vec![
            Cell::Int(n),
            Cell::Float(scheme.phi(n)?),
            Cell::Float(scheme.phi_factorial(n, false)?),
            f,
        ]);
    }
    let results = json!({ "rows": table.to_json_rows() });
    Ok(rendered(&scheme, results, json!({}), table))
}

/// Closed form for the families whose φ-exponential has one.
fn closed_exponential(scheme: &DeformationScheme, x: f64) -> Option<f64> {
    match scheme.kind() {
        SchemeKind::Boson => Some(x.exp()),
        SchemeKind::Tsallis { q } => Some(tsallis_exp_closed(*q, x)),
        _ => None,
    }
}

fn exp(req: &CommandRequest) -> Result<Rendered, CliError> {
    let scheme = req.parsed_scheme()?;
    let xs = req.x_grid()?;
    let defaults = EvalPolicy::default();
    let policy = EvalPolicy::new(
        req.get("rel_tol")?.unwrap_or(defaults.rel_tol()),
        req.get("max_terms")?.unwrap_or(defaults.max_terms()),
    )?;
    let mut table = Table::new(vec!["x", "value", "closed_form", "terms_used"]);
    let mut records = Vec::new();
    for x in xs {
        let (value, diag) = phi_exp_series(&scheme, x, &policy)?;
        let closed = closed_exponential(&scheme, x);
        table.push(vec![
            Cell::Float(x),
            Cell::Float(value),
            closed.map_or(Cell::Missing, Cell::Float),
            Cell::Int(diag.terms_used as u64),
        ]);
        records.push(json!({
            "input": x,
            "value": value,
            "closed_form": closed.map_or(Value::Null, extended_value),
            "diagnostics": diag,
        }));
    }
    Ok(rendered(
        &scheme,
        json!({ "records": records }),
        json!({ "policy": policy }),
        table,
    ))
}

fn spectrum(req: &CommandRequest) -> Result<Rendered, CliError> {
    let scheme = req.parsed_scheme()?;
    let n_max: u64 = req.require("n_max")?;
    // one level past n_max so every row carries its gap
    let report = spectrum_report(&scheme, n_max + 1)?;
    let mut table = Table::new(vec!["n", "E_n", "gap_n"]);
    for n in 0..=n_max as usize {
        table.push(vec![
            Cell::Int(n as u64),
            Cell::Float(report.levels[n]),
            Cell::Float(report.gaps[n]),
        ]);
    }
    let results = json!({
        "band_top": extended_value(report.band_top),
        "band_width": extended_value(report.band_width),
        "scheme": scheme.to_string(),
        "levels": &report.levels[..=n_max as usize],
        "gaps": &report.gaps[..=n_max as usize],
    });
    Ok(rendered(&scheme, results, json!({}), table))
}

fn coherent(req: &CommandRequest) -> Result<Rendered, CliError> {
    let scheme = req.parsed_scheme()?;
    let alpha = Complex64::new(req.require("alpha")?, req.get("alpha_im")?.unwrap_or(0.0));
    let dim: Option<usize> = req.get("dim")?;
    let k: usize = req.get("k")?.unwrap_or(8);
    let state = coherent_state(&scheme, alpha, dim)?;
    let residual = if state.dim() >= 4 {
        Some(eigen_residual(&state)?)
    } else {
        None
    };
    let moment = expected_n(&state);
    let shown = k.min(state.dim());
    let mut table = Table::new(vec!["n", "re", "im", "probability"]);
    for (n, c) in state.vector()[..shown].iter().enumerate() {
        table.push(vec![
            Cell::Int(n as u64),
            Cell::Float(c.re),
            Cell::Float(c.im),
            Cell::Float(c.norm_sqr()),
        ]);
    }
    let coefficients: Vec<[f64; 2]> = state.coefficients()[..shown]
        .iter()
        .map(|c| [c.re, c.im])
        .collect();
    let results = json!({
        "scheme": scheme.to_string(),
        "alpha": [alpha.re, alpha.im],
        "dim": state.dim(),
        "norm_const": state.norm_const(),
        "coefficients": coefficients,
        "eigen_residual": residual,
        "expected_n": moment.mean,
        "tail_mass": moment.tail_mass,
    });
    Ok(rendered(
        &scheme,
        results,
        json!({ "shown_coefficients": shown }),
        table,
    ))
}

enum Selector {
    Polynomial(PowerSeries),
    TsallisExp(f64),
}

fn parse_function(raw: &str) -> Result<Selector, CliError> {
    let (kind, arg) = raw
        .split_once(':')
        .ok_or_else(|| UsageError::new(format!("function selector `{raw}` needs kind:argument")))?;
    let bad = |what: &str| UsageError::new(format!("cannot parse {what} in `{raw}`"));
    match kind {
        "monomial" => {
            let n: usize = arg.parse().map_err(|_| bad("the power"))?;
            Ok(Selector::Polynomial(PowerSeries::monomial(n)))
        }
        "tsallis-exp" => Ok(Selector::TsallisExp(arg.parse().map_err(|_| bad("k"))?)),
        "series" => {
            let text = std::fs::read_to_string(arg)
                .map_err(|e| CliError::Io(format!("cannot read {arg}: {e}")))?;
            let s: PowerSeries = serde_json::from_str(&text).map_err(|e| {
                UsageError::new(format!("{arg} is not a JSON array of coefficients: {e}"))
            })?;
            Ok(Selector::Polynomial(PowerSeries::new(s.coeffs().to_vec())?))
        }
        other => Err(UsageError::new(format!(
            "unknown function kind `{other}` (expected monomial, tsallis-exp or series)"
        ))
        .into()),
    }
}

/// The numerical path a scheme's derivative takes on sampled functions.
enum Operator {
    Ordinary,
    Jackson(f64),
    Symmetric(f64),
    Pq(f64, f64),
    TsallisQuadrature(f64),
    SeriesOnly,
}

fn operator_for(scheme: &DeformationScheme) -> Operator {
    match scheme.kind() {
        SchemeKind::Boson => Operator::Ordinary,
        SchemeKind::QOsc { q } => Operator::Jackson(*q),
        SchemeKind::SymmetricQ { q } => Operator::Symmetric(*q),
        SchemeKind::PQ { p, q } => Operator::Pq(*p, *q),
        SchemeKind::Tsallis { q } if (1.0..=2.0).contains(q) => Operator::TsallisQuadrature(*q),
        _ => Operator::SeriesOnly,
    }
}

fn derive(req: &CommandRequest) -> Result<Rendered, CliError> {
    let scheme = req.parsed_scheme()?;
    let selector = parse_function(&req.require::<String>("function")?)?;
    let xs = req.x_grid()?;
    let defaults = QuadratureSpec::default();
    let quad = QuadratureSpec::new(
        req.get("base_nodes")?.unwrap_or(defaults.base_nodes()),
        req.get("abs_tol")?.unwrap_or(defaults.abs_tol()),
        req.get("max_refinements")?
            .unwrap_or(defaults.max_refinements()),
    )?;
    let op = operator_for(&scheme);

    let (f, reference): (SampledFunction, Box<dyn Fn(f64) -> f64>) = match &selector {
        Selector::Polynomial(p) => {
            let d = derivative_on_series(p, &scheme)?;
            (
                SampledFunction::from_series(p),
                Box::new(move |x| d.eval(x)),
            )
        }
        Selector::TsallisExp(k) => {
            let q = match scheme.kind() {
                SchemeKind::Tsallis { q } => *q,
                _ => {
                    return Err(UsageError::new(
                        "tsallis-exp functions need a tsallis scheme (its q fixes e_q)",
                    )
                    .into())
                }
            };
            let k = *k;
            (
                SampledFunction::tsallis_exp(q, k),
                Box::new(move |x| k * tsallis_exp_closed(q, k * x)),
            )
        }
    };

    let mut table = Table::new(vec!["x", "Df", "reference", "abs_err"]);
    let mut paths = Vec::new();
    for x in xs {
        let (value, path) = match (&op, &selector) {
            // difference quotients are undefined at 0; polynomials use coefficients
            (
                Operator::Jackson(_) | Operator::Symmetric(_) | Operator::Pq(..),
                Selector::Polynomial(_),
            ) if x == 0.0 => (reference(x), "series"),
            (Operator::SeriesOnly, Selector::Polynomial(_)) => (reference(x), "series"),
            (Operator::SeriesOnly, Selector::TsallisExp(_)) => {
                return Err(CliError::Library(crate::Error::Unsupported(format!(
                    "no sampled-function derivative for {scheme}; pass a polynomial"
                ))))
            }
            (Operator::Ordinary, _) => (f.derivative(x), "exact"),
            (Operator::Jackson(q), _) => (jackson_derivative(&f, x, *q)?, "difference"),
            (Operator::Symmetric(q), _) => (symmetric_derivative(&f, x, *q)?, "difference"),
            (Operator::Pq(p, q), _) => (pq_derivative(&f, x, *p, *q)?, "difference"),
            (Operator::TsallisQuadrature(q), _) => (
                tsallis_derivative_quadrature(&f, x, *q, &quad)?.value,
                "quadrature",
            ),
        };
        let want = reference(x);
        table.push(vec![
            Cell::Float(x),
            Cell::Float(value),
            Cell::Float(want),
            Cell::Float((value - want).abs()),
        ]);
        paths.push(path);
    }
    let results = json!({ "rows": table.to_json_rows() });
    Ok(rendered(
        &scheme,
        results,
        json!({ "paths": paths, "quadrature": quad }),
        table,
    ))
}
