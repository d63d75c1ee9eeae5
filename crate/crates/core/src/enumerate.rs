//! Root enumeration by repeated `HW` evaluation and implicit deflation.
//!
//! The first root comes from `HW(log(f(z)/z); y)`. Every later root comes
//! from `HW(log(g_k(z)/z); ε)` with `g_k = (f - y) / ∏ (z - z_j)`, where the
//! tiny target `ε` stands in for the one-sided limit `ε → 0+` (at exactly 0
//! the map returns 0). The functional index `log(g/z)` collapses to `g`
//! once `exp(log(·))` is cancelled, so the deflated quotient is handed to
//! the solver directly and never expanded symbolically.

use num_complex::Complex64;

use crate::expr::{eval_point, Expr, ExprError, Func};
use crate::hw::{
    hw_solve, newton_refine, solve_equation, Candidate, HwError, HwQuery, HwResult, HwWarning,
    SeriesTarget,
};
use crate::polyroots::Poly;
use crate::series::{jet_of_expr, Jet, SeriesError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const DEFAULT_ORDER: usize = 10;
pub const DEFAULT_EPSILON: f64 = 1e-20;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-3;
/// `|Q(z)|` at or below which a root of `P - y·Q` is a shared zero and not
/// a solution of `P/Q = y`.
pub const SPURIOUS_TOL: f64 = 1e-8;
/// Largest truncation order tried when a step has to be retried.
const MAX_RETRY_ORDER: usize = 80;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnumerateError {
    #[error("count must be at least 1, got {0}")]
    InvalidCount(usize),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("f is not analytic at the expansion center {center}; shift the center: {source}")]
    SeriesPole {
        center: Complex64,
        #[source]
        source: SeriesError,
    },
    #[error("P - y·Q is constant; the rational equation has no roots")]
    DegenerateRational,
    #[error("{0} must be a polynomial in z")]
    NotPolynomial(&'static str),
    #[error(transparent)]
    Hw(HwError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl From<HwError> for EnumerateError {
    fn from(e: HwError) -> Self {
        match e {
            HwError::SeriesPole { center, source } => EnumerateError::SeriesPole { center, source },
            HwError::Expr(e) => EnumerateError::Expr(e),
            other => EnumerateError::Hw(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerateOptions {
    /// Series truncation order.
    pub order: usize,
    /// Stand-in target for the `ε → 0+` limit.
    pub epsilon: f64,
    /// Expansion center.
    pub center: Complex64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            order: DEFAULT_ORDER,
            epsilon: DEFAULT_EPSILON,
            center: ZERO,
        }
    }
}

impl EnumerateOptions {
    fn validate(&self) -> Result<(), EnumerateError> {
        if self.order < 2 {
            return Err(EnumerateError::InvalidOption(format!(
                "order must be at least 2, got {}",
                self.order
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(EnumerateError::InvalidOption(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(EnumerateError::InvalidOption(
                "center must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// `g_k(z) = (f(z) - y) / ∏ (z - z_j)`, evaluated on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflatedFunction {
    pub base: Expr,
    pub target: Complex64,
    pub extracted: Vec<Complex64>,
}

impl DeflatedFunction {
    pub fn new(base: Expr, target: Complex64) -> DeflatedFunction {
        DeflatedFunction {
            base,
            target,
            extracted: Vec::new(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, ExprError> {
        let mut v = eval_point(&self.base, z)? - self.target;
        for &r in &self.extracted {
            let d = z - r;
            if d == ZERO {
                return Err(ExprError::EvalDomain(format!(
                    "deflated function evaluated at the extracted root {r}"
                )));
            }
            v /= d;
        }
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(ExprError::EvalDomain(format!(
                "non-finite value at z = {z}"
            )));
        }
        Ok(v)
    }

    pub fn jet(&self, center: Complex64, order: usize) -> Result<Jet, SeriesError> {
        // each cancelled factor costs one trailing coefficient
        let work = order + self.extracted.len();
        let mut j = jet_of_expr(&self.base, center, work)?;
        let mut c = j.clone().into_coeffs();
        c[0] -= self.target;
        j = Jet::new(c, center)?;
        let z = Jet::variable(center, work);
        for &r in &self.extracted {
            let factor = z.sub(&Jet::constant(r, center, work))?;
            j = j.div(&factor)?;
        }
        Ok(j.truncate(order))
    }
}

impl SeriesTarget for DeflatedFunction {
    fn eval(&self, z: Complex64) -> Result<Complex64, HwError> {
        Ok(DeflatedFunction::eval(self, z)?)
    }

    fn jet(&self, center: Complex64, order: usize) -> Result<Jet, SeriesError> {
        DeflatedFunction::jet(self, center, order)
    }
}

/// One reported root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootRecord {
    pub value: Complex64,
    /// `|f(value) - y|`.
    pub residual: f64,
    pub multiplicity: usize,
    /// 1-based position in the enumeration.
    pub order_found: usize,
    pub warnings: Vec<String>,
}

/// Roots in the order they were extracted, plus enumeration-level notes
/// (failed steps, excluded roots, early stop).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Enumeration {
    pub roots: Vec<RootRecord>,
    pub warnings: Vec<String>,
}

impl Enumeration {
    pub fn values(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.value).collect()
    }
}

/// The functional index `log(f(z)/z)`.
pub fn functional_index(f: &Expr) -> Expr {
    Expr::call(Func::Log, f.clone().div(Expr::Var))
}

/// Enumerates up to `count` roots of `f(z) = y`.
///
/// Step one evaluates `HW(log(f/z); y)`; step `k+1` evaluates
/// `HW(log(g_k/z); ε)`. When `y` is exactly zero the first step also uses
/// the `ε` form, since `HW(·; 0)` is identically 0. Each root is polished
/// by Newton's method on `f - y` before it is reported and divided out.
/// A step whose Newton iteration fails is retried once at double the
/// truncation order; two consecutive failures, or a truncated series with
/// no roots, end the enumeration early.
pub fn enumerate_roots(
    f: &Expr,
    y: Complex64,
    count: usize,
    opts: &EnumerateOptions,
) -> Result<Enumeration, EnumerateError> {
    enumerate_impl(f, y, count, opts, y == ZERO)
}

fn enumerate_impl(
    f: &Expr,
    y: Complex64,
    count: usize,
    opts: &EnumerateOptions,
    epsilon_first: bool,
) -> Result<Enumeration, EnumerateError> {
    if count == 0 {
        return Err(EnumerateError::InvalidCount(count));
    }
    opts.validate()?;
    if !(y.re.is_finite() && y.im.is_finite()) {
        return Err(EnumerateError::InvalidOption("y must be finite".into()));
    }
    let eps = Complex64::new(opts.epsilon, 0.0);
    let original = DeflatedFunction::new(f.clone(), y);
    let mut deflated = original.clone();
    let mut out = Enumeration::default();
    let mut failures = 0;
    let mut order = opts.order;

    while out.roots.len() < count {
        let k = out.roots.len();
        let step: Result<HwResult, HwError> = if k == 0 && !epsilon_first {
            HwQuery::new(vec![functional_index(f)], y, order)
                .map(|q| q.with_center(opts.center))
                .and_then(|q| hw_solve(&q))
        } else {
            solve_equation(&deflated, eps, opts.center, order)
        };
        let res = match step {
            Ok(r) => r,
            Err(HwError::NoCandidates) => {
                out.warnings.push(format!(
                    "step {}: truncated series has no roots; stopping after {k} root(s)",
                    k + 1
                ));
                break;
            }
            Err(e @ HwError::SeriesPole { .. }) if k == 0 => return Err(e.into()),
            Err(e) => {
                out.warnings
                    .push(format!("step {}: {e}; stopping after {k} root(s)", k + 1));
                break;
            }
        };

        let failed = res.warnings.iter().any(HwWarning::is_divergence);
        let polished = (!failed).then(|| {
            let start = Candidate {
                value: res.value,
                residual: original.eval(res.value).map_or(f64::INFINITY, |v| v.norm()),
            };
            newton_refine(&original, ZERO, start, opts.center, 0.0)
        });
        let polished = match polished {
            Some(p) if !p.warnings.iter().any(HwWarning::is_divergence) => p,
            other => {
                let why = other
                    .map(|p| p.warnings)
                    .unwrap_or(res.warnings)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ");
                out.warnings
                    .push(format!("step {} at order {order}: {why}", k + 1));
                failures += 1;
                if failures >= 2 || order * 2 > MAX_RETRY_ORDER {
                    out.warnings.push(format!(
                        "stopping after {k} root(s): repeated Newton failure"
                    ));
                    break;
                }
                order *= 2;
                continue;
            }
        };
        failures = 0;
        order = opts.order;

        let mut warnings: Vec<String> = res.warnings.iter().map(ToString::to_string).collect();
        warnings.extend(polished.warnings.iter().map(ToString::to_string));
        let value = polished.best.value;
        out.roots.push(RootRecord {
            value,
            residual: polished.best.residual,
            multiplicity: 1,
            order_found: k + 1,
            warnings,
        });
        deflated.extracted.push(value);
    }
    Ok(out)
}

/// Enumerates roots of `P(z)/Q(z) = y` through the polynomial
/// `F = P - y·Q`, using the `ε` form from the first step on. Roots shared
/// with `Q` are dropped.
pub fn enumerate_rational(
    p: &Expr,
    q: &Expr,
    y: Complex64,
    count: usize,
    opts: &EnumerateOptions,
) -> Result<Enumeration, EnumerateError> {
    opts.validate()?;
    let dp = p
        .polynomial_degree_bound()
        .ok_or(EnumerateError::NotPolynomial("P"))?;
    let dq = q
        .polynomial_degree_bound()
        .ok_or(EnumerateError::NotPolynomial("Q"))?;
    let bound = dp.max(dq) + 1;
    let q_poly = Poly::new(
        jet_of_expr(q, opts.center, bound)
            .map_err(pole(opts))?
            .into_coeffs(),
    );
    if q_poly.degree() == 0 && q_poly.coeffs()[0] == ZERO {
        return Err(EnumerateError::InvalidOption(
            "Q vanishes identically".into(),
        ));
    }
    let big_f = rational_numerator(p, q, y);
    let f_poly = Poly::new(
        jet_of_expr(&big_f, opts.center, bound)
            .map_err(pole(opts))?
            .into_coeffs(),
    );
    if f_poly.degree() == 0 {
        return Err(EnumerateError::DegenerateRational);
    }

    let mut found = enumerate_impl(&big_f, ZERO, count, opts, true)?;
    let mut kept = Vec::with_capacity(found.roots.len());
    for mut r in found.roots.drain(..) {
        let qv = eval_point(q, r.value)?;
        if qv.norm() <= SPURIOUS_TOL {
            found.warnings.push(format!(
                "excluded {} (also a zero of Q; not a solution of P/Q = y)",
                r.value
            ));
            continue;
        }
        r.residual = (eval_point(p, r.value)? / qv - y).norm();
        kept.push(r);
    }
    found.roots = kept;
    Ok(found)
}

/// `P - y·Q`.
pub fn rational_numerator(p: &Expr, q: &Expr, y: Complex64) -> Expr {
    p.clone().sub(Expr::constant(y).mul(q.clone()))
}

fn pole(opts: &EnumerateOptions) -> impl Fn(SeriesError) -> EnumerateError + '_ {
    move |source| EnumerateError::SeriesPole {
        center: opts.center,
        source,
    }
}

/// Merges roots closer than `tol` (single linkage). A cluster reports its
/// centroid, the summed multiplicity, the worst member residual and the
/// earliest `order_found`.
pub fn cluster_multiplicities(roots: &[RootRecord], tol: f64) -> Vec<RootRecord> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i].value - roots[j].value).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match clusters.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(i),
            None => clusters.push((root, vec![i])),
        }
    }
    clusters
        .into_iter()
        .map(|(_, members)| {
            let m = members.len() as f64;
            let value = members.iter().map(|&i| roots[i].value).sum::<Complex64>() / m;
            RootRecord {
                value,
                residual: members
                    .iter()
                    .map(|&i| roots[i].residual)
                    .fold(0.0, f64::max),
                multiplicity: members.iter().map(|&i| roots[i].multiplicity).sum(),
                order_found: members
                    .iter()
                    .map(|&i| roots[i].order_found)
                    .min()
                    .unwrap_or(0),
                warnings: members
                    .iter()
                    .flat_map(|&i| roots[i].warnings.clone())
                    .collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn record(v: Complex64, k: usize) -> RootRecord {
        RootRecord {
            value: v,
            residual: 1e-12 * k as f64,
            multiplicity: 1,
            order_found: k,
            warnings: vec![],
        }
    }

    #[test]
    fn deflated_eval_matches_definition() {
        let f = parse("(z-2)*(z-3)*(z-5)").unwrap();
        let mut g = DeflatedFunction::new(f.clone(), c(2.0, 0.0));
        g.extracted = vec![c(1.0, 1.0), c(-0.5, 0.0)];
        let z = c(0.3, -0.7);
        let want = (eval_point(&f, z).unwrap() - 2.0) / ((z - c(1.0, 1.0)) * (z - c(-0.5, 0.0)));
        assert!((g.eval(z).unwrap() - want).norm() < 1e-14);
        assert!(g.eval(c(1.0, 1.0)).is_err());
        // jet constant term agrees with pointwise evaluation
        let j = g.jet(z, 3).unwrap();
        assert!((j.value() - want).norm() < 1e-13);
    }

    #[test]
    fn deflated_jet_cancels_root_at_center() {
        // (z^2 - 1)/(z - 1) = z + 1, expanded about the cancelled root
        let g = DeflatedFunction {
            base: parse("z^2").unwrap(),
            target: c(1.0, 0.0),
            extracted: vec![c(1.0, 0.0)],
        };
        let j = g.jet(c(1.0, 0.0), 3).unwrap();
        assert_eq!(j.coeffs(), &[c(2.0, 0.0), c(1.0, 0.0), ZERO]);
    }

    #[test]
    fn cluster_example_six() {
        let roots = [
            record(c(2.0, 0.0), 1),
            record(c(1.00005, 0.0), 2),
            record(c(1.0, 0.0), 3),
        ];
        let cl = cluster_multiplicities(&roots, DEFAULT_CLUSTER_TOL);
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].multiplicity, 1);
        assert_eq!(cl[0].value, c(2.0, 0.0));
        assert_eq!(cl[1].multiplicity, 2);
        assert!((cl[1].value - 1.000025).norm() < 1e-12);
        assert_eq!(cl[1].order_found, 2);
        assert_eq!(cl[1].residual, 3e-12);
    }

    #[test]
    fn cluster_simple_roots_unchanged() {
        let roots = [
            record(c(5.26953, 0.0), 1),
            record(c(2.36523, 0.69160), 2),
            record(c(2.36523, -0.69160), 3),
        ];
        assert_eq!(
            cluster_multiplicities(&roots, DEFAULT_CLUSTER_TOL),
            roots.to_vec()
        );
        assert!(cluster_multiplicities(&[], DEFAULT_CLUSTER_TOL).is_empty());
    }

    #[test]
    fn cluster_is_single_linkage() {
        // chain 0 - 0.0008 - 0.0016: ends are 1.6e-3 apart but linked
        let roots = [
            record(c(0.0, 0.0), 1),
            record(c(0.0008, 0.0), 2),
            record(c(0.0016, 0.0), 3),
        ];
        let cl = cluster_multiplicities(&roots, DEFAULT_CLUSTER_TOL);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].multiplicity, 3);
    }

    #[test]
    fn invalid_inputs() {
        let f = parse("z").unwrap();
        let o = EnumerateOptions::default();
        assert_eq!(
            enumerate_roots(&f, c(1.0, 0.0), 0, &o).unwrap_err(),
            EnumerateError::InvalidCount(0)
        );
        let bad = EnumerateOptions { epsilon: 0.0, ..o };
        assert!(matches!(
            enumerate_roots(&f, c(1.0, 0.0), 1, &bad),
            Err(EnumerateError::InvalidOption(_))
        ));
        assert_eq!(
            enumerate_rational(&f, &f, c(1.0, 0.0), 1, &o).unwrap_err(),
            EnumerateError::DegenerateRational
        );
        assert_eq!(
            enumerate_rational(&parse("sin(z)").unwrap(), &f, c(1.0, 0.0), 1, &o).unwrap_err(),
            EnumerateError::NotPolynomial("P")
        );
    }

    #[test]
    fn pole_at_center_is_reported() {
        let f = parse("1/z + 1").unwrap();
        let err = enumerate_roots(&f, c(2.0, 0.0), 1, &EnumerateOptions::default()).unwrap_err();
        assert!(matches!(err, EnumerateError::SeriesPole { .. }), "{err:?}");
        let shifted = EnumerateOptions {
            center: c(1.5, 0.0),
            ..Default::default()
        };
        let r = enumerate_roots(&f, c(2.0, 0.0), 1, &shifted).unwrap();
        assert!((r.roots[0].value - 1.0).norm() < 1e-10);
    }

    #[test]
    fn linear_then_no_candidates() {
        // only one root exists; the second step finds a constant series
        let r = enumerate_roots(
            &parse("2*z + 1").unwrap(),
            c(3.0, 0.0),
            2,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0].value - 1.0).norm() < 1e-12);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn zero_target_uses_epsilon_step() {
        let r = enumerate_roots(&parse("z^2 - 4").unwrap(), ZERO, 2, &Default::default()).unwrap();
        let mut v: Vec<f64> = r.values().iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        assert!(
            (v[0] + 2.0).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12,
            "{v:?}"
        );
    }
}
