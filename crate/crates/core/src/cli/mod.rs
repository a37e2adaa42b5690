//! Batch command-line front end.
//!
//! Grammar: `phidef <command> <scheme|suite> [--key value | --key=value | key=value]...
//! [--format json|csv|table] [--out PATH]`. Keys are validated per command;
//! unknown or repeated keys are usage errors. Exit codes: 0 success,
//! 1 verification failure, 2 usage or validation error (reported on stderr
//! as one line of JSON `{error, detail}`).

mod commands;
mod table;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::scheme::DeformationScheme;

pub use table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const USAGE: &str = "\
usage: phidef <command> <scheme> [--key value]... [--format json|csv|table] [--out PATH]

commands:
  numbers  <scheme> --n_max N                       φ(n), φ(n)!, f(n) for n = 0..N
  exp      <scheme> --x X[,X...] | --x_min A --x_max B [--points K]
                    [--rel_tol T] [--max_terms M]     φ-exponential series
  spectrum <scheme> --n_max N                       E_n, gaps and band summary
  coherent <scheme> --alpha RE [--alpha_im IM] [--dim D] [--k K]
  derive   <scheme> --function monomial:N|tsallis-exp:K|series:PATH
                    (x grid as for exp) [--base_nodes B] [--abs_tol T] [--max_refinements R]
  verify   series|spectrum|coherent|calculus|all [--scheme DESCRIPTOR]

schemes: boson, qosc:q=Q, symq:q=Q, pq:p=P,q=Q, tsallis:q=Q, mu:mu=M, custom:phi=0|1|...";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Numbers,
    Exp,
    Spectrum,
    Coherent,
    Derive,
    Verify,
}

impl Command {
    fn allowed_keys(self) -> &'static [&'static str] {
        match self {
            Command::Numbers | Command::Spectrum => &["n_max"],
            Command::Exp => &["x", "x_min", "x_max", "points", "rel_tol", "max_terms"],
            Command::Coherent => &["alpha", "alpha_im", "dim", "k"],
            Command::Derive => &[
                "function",
                "x",
                "x_min",
                "x_max",
                "points",
                "base_nodes",
                "abs_tol",
                "max_refinements",
            ],
            Command::Verify => &["scheme", "mutate_phi"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Numbers => "numbers",
            Command::Exp => "exp",
            Command::Spectrum => "spectrum",
            Command::Coherent => "coherent",
            Command::Derive => "derive",
            Command::Verify => "verify",
        })
    }
}

impl FromStr for Command {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        Ok(match s {
            "numbers" => Command::Numbers,
            "exp" => Command::Exp,
            "spectrum" => Command::Spectrum,
            "coherent" => Command::Coherent,
            "derive" => Command::Derive,
            "verify" => Command::Verify,
            other => return Err(UsageError::new(format!("unknown command `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            other => Err(UsageError::new(format!(
                "unknown format `{other}` (expected json, csv or table)"
            ))),
        }
    }
}

/// A malformed command line or parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl UsageError {
    pub fn new(detail: impl Into<String>) -> Self {
        Self(detail.into())
    }
}

/// Any failure that maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(UsageError),
    Library(Error),
    Io(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Library(e) => match e {
                Error::InvalidParameter { .. } => "invalid_parameter",
                Error::Range { .. } => "range",
                Error::Domain(_) => "domain",
                Error::Divergence { .. } => "divergence",
                Error::NonConvergence { .. } => "non_convergence",
                Error::Accuracy { .. } => "accuracy",
                Error::Unsupported(_) => "unsupported",
                Error::Precondition(_) => "precondition",
                Error::Parse { .. } => "parse",
            },
        }
    }

    fn detail(&self) -> String {
        match self {
            CliError::Usage(u) => u.0.clone(),
            CliError::Io(s) => s.clone(),
            CliError::Library(e) => e.to_string(),
        }
    }

    /// Single-line `{"error": kind, "detail": message}`.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            detail: String,
        }
        serde_json::to_string(&Line {
            error: self.kind(),
            detail: self.detail(),
        })
        .expect("plain strings serialize")
    }
}

/// A parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandRequest {
    pub command: Command,
    /// Scheme descriptor; for `verify` the scheme under test.
    pub scheme: String,
    /// For `verify`, the suite name.
    pub suite: Option<String>,
    pub params: BTreeMap<String, String>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl CommandRequest {
    pub fn parse<S: AsRef<str>>(args: &[S]) -> Result<Self, UsageError> {
        let mut it = args.iter().map(|s| s.as_ref());
        let command: Command = it
            .next()
            .ok_or_else(|| UsageError::new("missing command"))?
            .parse()?;
        let target = it
            .next()
            .filter(|s| !s.starts_with("--"))
            .ok_or_else(|| {
                UsageError::new(if command == Command::Verify {
                    "verify needs a suite name"
                } else {
                    "missing scheme descriptor"
                })
            })?
            .to_string();

        let mut params = BTreeMap::new();
        let mut output_format = None;
        let mut output_path = None;
        while let Some(arg) = it.next() {
            let (key, value) = if let Some(flag) = arg.strip_prefix("--") {
                match flag.split_once('=') {
                    Some((k, v)) => (k.to_string(), v.to_string()),
                    None => {
                        let v = it
                            .next()
                            .ok_or_else(|| UsageError::new(format!("--{flag} needs a value")))?;
                        (flag.to_string(), v.to_string())
                    }
                }
            } else if let Some((k, v)) = arg.split_once('=') {
                (k.to_string(), v.to_string())
            } else {
                return Err(UsageError::new(format!("unexpected argument `{arg}`")));
            };
            match key.as_str() {
                "format" => {
                    if output_format.replace(value.parse()?).is_some() {
                        return Err(UsageError::new("--format given twice"));
                    }
                }
                "out" => {
                    if output_path.replace(PathBuf::from(value)).is_some() {
                        return Err(UsageError::new("--out given twice"));
                    }
                }
                k if command.allowed_keys().contains(&k) => {
                    if params.insert(key.clone(), value).is_some() {
                        return Err(UsageError::new(format!("key `{key}` given twice")));
                    }
                }
                _ => {
                    return Err(UsageError::new(format!(
                        "unknown key `{key}` for `{command}` (accepted: {})",
                        command.allowed_keys().join(", ")
                    )))
                }
            }
        }

        let (scheme, suite) = if command == Command::Verify {
            let scheme = params
                .remove("scheme")
                .unwrap_or_else(|| verify::DEFAULT_SCHEME.to_string());
            (scheme, Some(target))
        } else {
            (target, None)
        };
        Ok(Self {
            command,
            scheme,
            suite,
            params,
            output_format: output_format.unwrap_or_default(),
            output_path,
        })
    }

    pub fn parsed_scheme(&self) -> Result<DeformationScheme, CliError> {
        Ok(self.scheme.parse::<DeformationScheme>()?)
    }

    pub(crate) fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, UsageError> {
        self.params
            .get(key)
            .map(|raw| {
                raw.parse::<T>()
                    .map_err(|_| UsageError::new(format!("cannot parse `{key}` value `{raw}`")))
            })
            .transpose()
    }

    pub(crate) fn require<T: FromStr>(&self, key: &str) -> Result<T, UsageError> {
        self.get(key)?
            .ok_or_else(|| UsageError::new(format!("`{}` requires --{key}", self.command)))
    }

    /// The x grid: `x=a,b,c` or `x_min`, `x_max`, `points` (default 11).
    pub(crate) fn x_grid(&self) -> Result<Vec<f64>, UsageError> {
        let listed = self.params.get("x");
        let ranged = ["x_min", "x_max", "points"]
            .iter()
            .any(|k| self.params.contains_key(*k));
        match (listed, ranged) {
            (Some(_), true) => Err(UsageError::new(
                "give either --x or --x_min/--x_max, not both",
            )),
            (Some(raw), false) => raw
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| UsageError::new(format!("cannot parse x value `{v}`")))
                })
                .collect(),
            (None, true) => {
                let lo: f64 = self.require("x_min")?;
                let hi: f64 = self.require("x_max")?;
                let points: usize = self.get("points")?.unwrap_or(11);
                if points == 0 {
                    return Err(UsageError::new("--points must be positive"));
                }
                if points == 1 {
                    return Ok(vec![lo]);
                }
                Ok((0..points)
                    .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
                    .collect())
            }
            (None, false) => Err(UsageError::new(format!(
                "`{}` needs --x or --x_min/--x_max",
                self.command
            ))),
        }
    }
}

/// What a command produces before formatting.
pub struct Rendered {
    pub scheme: String,
    pub results: Value,
    pub diagnostics: Value,
    pub table: Table,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool_version: &'static str,
    command: Command,
    scheme: &'a str,
    params: &'a BTreeMap<String, String>,
    results: &'a Value,
    diagnostics: &'a Value,
}

fn format_output(req: &CommandRequest, r: &Rendered) -> String {
    match req.output_format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&Envelope {
                tool_version: env!("CARGO_PKG_VERSION"),
                command: req.command,
                scheme: &r.scheme,
                params: &req.params,
                results: &r.results,
                diagnostics: &r.diagnostics,
            })
            .expect("values serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => r.table.to_csv(),
        OutputFormat::Table => r.table.to_text(),
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line (without the program name) and captures its output.
pub fn execute<S: AsRef<str>>(args: &[S]) -> Outcome {
    if args.is_empty() || matches!(args[0].as_ref(), "-h" | "--help" | "help") {
        let code = if args.is_empty() { EXIT_USAGE } else { EXIT_OK };
        let (stdout, stderr) = if code == EXIT_OK {
            (format!("{USAGE}\n"), String::new())
        } else {
            (String::new(), format!("{USAGE}\n"))
        };
        return Outcome {
            code,
            stdout,
            stderr,
        };
    }
    let fail = |e: CliError| Outcome {
        code: EXIT_USAGE,
        stdout: String::new(),
        stderr: format!("{}\n", e.to_json_line()),
    };
    let req = match CommandRequest::parse(args) {
        Ok(r) => r,
        Err(e) => return fail(e.into()),
    };
    let rendered = match commands::dispatch(&req) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let text = format_output(&req, &rendered);
    match &req.output_path {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => Outcome {
                code: rendered.exit_code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => fail(CliError::Io(format!(
                "cannot write {}: {e}",
                path.display()
            ))),
        },
        None => Outcome {
            code: rendered.exit_code,
            stdout: text,
            stderr: String::new(),
        },
    }
}
