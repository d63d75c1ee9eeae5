//! Driver behind the `hwroots` binary. Every entry point returns a
//! [`Report`] instead of printing, so the whole front end can be tested
//! without spawning a process.

use std::fmt::Write as _;

use hwroots::enumerate::{
    cluster_multiplicities, enumerate_rational, enumerate_roots, EnumerateError, EnumerateOptions,
    DEFAULT_CLUSTER_TOL, DEFAULT_EPSILON, DEFAULT_ORDER,
};
use hwroots::hw::{g_map, hw_solve, HwQuery};
use hwroots::polyroots::Poly;
use hwroots::{eval_point, jet_of_expr, parse, Complex64, Expr, ExprError};
use serde::Serialize;

/// Input language accepted by `--expr`, `--rational`, `--param`, `--y`.
pub const GRAMMAR: &str = "\
expression grammar (variable z, imaginary unit i):
  expr   := term (('+' | '-') term)*
  term   := unary (('*' | '/') unary)*
  unary  := '-' unary | power
  power  := atom ('^' unary)?          right-associative; exponent must be a real constant
  atom   := number | number 'i' | 'i' | 'z' | func '(' expr ')' | '(' expr ')'
  func   := exp log sqrt sin cos tan sinh cosh tanh sinc
examples: (z-2)*(z-3)*(z-5)   sin(z)+exp(sin(z))/sqrt(1+tanh(z))   2+3i   1/2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Expr(String),
    Rational(String, String),
}

/// Settings for one `solve` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Input,
    pub y: Complex64,
    /// `None` asks for the polynomial degree; an error for transcendental input.
    pub count: Option<usize>,
    pub order: usize,
    pub epsilon: f64,
    pub center: Complex64,
    pub cluster_tol: f64,
    pub format: Format,
}

impl RunConfig {
    pub fn new(input: Input, y: Complex64) -> RunConfig {
        RunConfig {
            input,
            y,
            count: None,
            order: DEFAULT_ORDER,
            epsilon: DEFAULT_EPSILON,
            center: Complex64::new(0.0, 0.0),
            cluster_tol: DEFAULT_CLUSTER_TOL,
            format: Format::Text,
        }
    }
}

/// What a command produced: the exit code and both output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Report {
    fn usage(message: impl std::fmt::Display) -> Report {
        Report {
            exit_code: 1,
            stdout: String::new(),
            stderr: format!("error: {message}\n\n{GRAMMAR}\n"),
        }
    }

    fn failure(message: impl std::fmt::Display) -> Report {
        Report {
            exit_code: 1,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }

    fn finished(stdout: String, warnings: &[String]) -> Report {
        let mut stderr = String::new();
        for w in warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        Report {
            exit_code: if warnings.is_empty() { 0 } else { 2 },
            stdout,
            stderr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct JsonComplex {
    re: f64,
    im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct JsonConfig<'a> {
    expr: Option<&'a str>,
    rational: Option<[&'a str; 2]>,
    y: JsonComplex,
    count: usize,
    order: usize,
    epsilon: f64,
    center: JsonComplex,
    cluster_tol: f64,
    format: Format,
}

#[derive(Serialize)]
struct JsonRoot {
    re: f64,
    im: f64,
    residual: f64,
    multiplicity: usize,
    order_found: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: JsonConfig<'a>,
    roots: Vec<JsonRoot>,
    warnings: &'a [String],
}

/// Parses a constant such as `2`, `1/2`, `-0.3+2i` or `exp(1)`.
pub fn parse_complex(src: &str) -> Result<Complex64, String> {
    let e = parse(src).map_err(|e| format!("`{src}`: {e}"))?;
    if e.contains_var() {
        return Err(format!("`{src}` must be a constant, not a function of z"));
    }
    eval_point(&e, Complex64::new(0.0, 0.0)).map_err(|e| format!("`{src}`: {e}"))
}

/// Exact degree of a polynomial expression, `None` for anything else.
fn exact_degree(e: &Expr, center: Complex64) -> Option<usize> {
    let bound = e.polynomial_degree_bound()?;
    let jet = jet_of_expr(e, center, bound + 1).ok()?;
    Some(Poly::new(jet.into_coeffs()).degree())
}

fn parse_input(src: &str, what: &str) -> Result<Expr, Report> {
    parse(src).map_err(|e| Report::usage(format!("{what} `{src}`: {e}")))
}

/// Text rendering with five decimals: `2.36523-0.69160i`, `5.26953`.
pub fn format_complex(z: Complex64) -> String {
    // round first so that values like -0.000001 do not print as -0.00000
    let clean = |x: f64| {
        let r = (x * 1e5).round() / 1e5;
        if r == 0.0 {
            0.0
        } else {
            r
        }
    };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.5}")
    } else {
        format!("{re:.5}{im:+.5}i")
    }
}

fn enumeration_error(e: EnumerateError) -> Report {
    match e {
        EnumerateError::InvalidCount(_) | EnumerateError::InvalidOption(_) => Report::usage(e),
        EnumerateError::NotPolynomial(_) => Report::usage(e),
        other => Report::failure(other),
    }
}

/// Runs the `solve` subcommand.
pub fn run(config: &RunConfig) -> Report {
    if config.order < 2 {
        return Report::usage(format!("--order must be at least 2, got {}", config.order));
    }
    if !(config.epsilon > 0.0 && config.epsilon.is_finite()) {
        return Report::usage(format!(
            "--epsilon must be positive, got {}",
            config.epsilon
        ));
    }
    if !(config.cluster_tol > 0.0 && config.cluster_tol.is_finite()) {
        return Report::usage(format!(
            "--cluster-tol must be positive, got {}",
            config.cluster_tol
        ));
    }
    let opts = EnumerateOptions {
        order: config.order,
        epsilon: config.epsilon,
        center: config.center,
    };

    let (result, count) = match &config.input {
        Input::Expr(src) => {
            let f = match parse_input(src, "--expr") {
                Ok(f) => f,
                Err(r) => return r,
            };
            let count = match resolve_count(config.count, || {
                exact_degree(&f.clone().sub(Expr::constant(config.y)), config.center)
            }) {
                Ok(n) => n,
                Err(r) => return r,
            };
            (enumerate_roots(&f, config.y, count, &opts), count)
        }
        Input::Rational(ps, qs) => {
            let (p, q) = match (parse_input(ps, "P"), parse_input(qs, "Q")) {
                (Ok(p), Ok(q)) => (p, q),
                (Err(r), _) | (_, Err(r)) => return r,
            };
            let count = match resolve_count(config.count, || {
                let big_f = hwroots::enumerate::rational_numerator(&p, &q, config.y);
                exact_degree(&big_f, config.center)
            }) {
                Ok(n) => n,
                Err(r) => return r,
            };
            (enumerate_rational(&p, &q, config.y, count, &opts), count)
        }
    };
    let found = match result {
        Ok(found) => found,
        Err(e) => return enumeration_error(e),
    };

    let mut warnings = found.warnings.clone();
    if found.roots.len() < count {
        warnings.push(format!(
            "found {} of {count} requested root(s)",
            found.roots.len()
        ));
    }
    let clustered = cluster_multiplicities(&found.roots, config.cluster_tol);
    for (k, r) in clustered.iter().enumerate() {
        warnings.extend(r.warnings.iter().map(|w| format!("z{}: {w}", k + 1)));
    }

    let stdout = match config.format {
        Format::Text => {
            let mut out = String::new();
            for (k, r) in clustered.iter().enumerate() {
                let _ = write!(out, "z{} ≃ {}", k + 1, format_complex(r.value));
                if r.multiplicity > 1 {
                    let _ = write!(out, "  (multiplicity {})", r.multiplicity);
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let (expr, rational) = match &config.input {
                Input::Expr(s) => (Some(s.as_str()), None),
                Input::Rational(p, q) => (None, Some([p.as_str(), q.as_str()])),
            };
            let report = JsonReport {
                config: JsonConfig {
                    expr,
                    rational,
                    y: config.y.into(),
                    count,
                    order: config.order,
                    epsilon: config.epsilon,
                    center: config.center.into(),
                    cluster_tol: config.cluster_tol,
                    format: config.format,
                },
                roots: clustered
                    .iter()
                    .map(|r| JsonRoot {
                        re: r.value.re,
                        im: r.value.im,
                        residual: r.residual,
                        multiplicity: r.multiplicity,
                        order_found: r.order_found,
                    })
                    .collect(),
                warnings: &warnings,
            };
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
    };
    Report::finished(stdout, &warnings)
}

fn resolve_count(
    given: Option<usize>,
    degree: impl FnOnce() -> Option<usize>,
) -> Result<usize, Report> {
    match given {
        Some(0) => Err(Report::usage("--count must be at least 1")),
        Some(n) => Ok(n),
        None => match degree() {
            Some(0) => Err(Report::usage("equation has no roots (f - y is constant)")),
            Some(d) => Ok(d),
            None => Err(Report::usage(
                "--count is required when f is not a polynomial (it may have infinitely many roots)",
            )),
        },
    }
}

fn parse_params(params: &[String]) -> Result<Vec<Expr>, Report> {
    if params.is_empty() {
        return Err(Report::usage("at least one --param is required"));
    }
    params.iter().map(|s| parse_input(s, "--param")).collect()
}

/// Runs the `hw` subcommand: one branch evaluation `HW(params; y)`.
pub fn run_hw(
    params: &[String],
    y: Complex64,
    order: usize,
    center: Complex64,
    format: Format,
) -> Report {
    let params = match parse_params(params) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let query = match HwQuery::new(params, y, order) {
        Ok(q) => q.with_center(center),
        Err(e) => return Report::usage(e),
    };
    let res = match hw_solve(&query) {
        Ok(r) => r,
        Err(e) => return Report::failure(e),
    };
    let mut warnings: Vec<String> = res.warnings.iter().map(ToString::to_string).collect();
    if !res.candidates_converged {
        warnings.push("polynomial root finder did not converge for every candidate".into());
    }
    let stdout = match format {
        Format::Text => format!(
            "HW ≃ {}\nresidual {:.3e}, {} Newton step(s), {} candidate(s)\n",
            format_complex(res.value),
            res.residual,
            res.newton_iterations,
            res.candidate_count
        ),
        Format::Json => {
            let v = serde_json::json!({
                "value": JsonComplex::from(res.value),
                "residual": res.residual,
                "newton_iterations": res.newton_iterations,
                "candidate_count": res.candidate_count,
                "warnings": warnings,
            });
            serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
        }
    };
    Report::finished(stdout, &warnings)
}

/// Runs the `gmap` subcommand: the forward map `z·F(z)`.
pub fn run_gmap(params: &[String], z: Complex64, format: Format) -> Report {
    let params = match parse_params(params) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let value = match g_map(&params, z) {
        Ok(v) => v,
        Err(e @ ExprError::EvalDomain(_)) => return Report::failure(e),
        Err(e) => return Report::usage(e),
    };
    let stdout = match format {
        Format::Text => format!("G ≃ {}\n", format_complex(value)),
        Format::Json => {
            let v = serde_json::json!({ "value": JsonComplex::from(value) });
            serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
        }
    };
    Report::finished(stdout, &[])
}
