//! The hyper-Lambert map `HW(c_1, ..., c_n; y)` and its forward map
//! `G(c_1, ..., c_n; z) = z · exp(c_1 · exp(c_2 · ... exp(c_n)))`.
//!
//! `HW` is evaluated numerically: the defining function `z·F(z) - y` is
//! expanded to a truncated Taylor polynomial about a center, every root of
//! that polynomial becomes a candidate, the candidate with the smallest
//! residual on the untruncated function is kept, and Newton's method
//! finishes the job.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::expr::{eval_point, simplify_exp_log, BinOp, Expr, ExprError, Func};
use crate::polyroots::{all_roots, Poly};
use crate::series::{jet_of_expr, Jet, SeriesError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Residual noise floor for candidate ranking, relative to
/// `1 + |fun(center)|`.
pub const RESIDUAL_FLOOR_REL: f64 = 1e-12;
/// Relative tolerance under which candidate coordinates count as tied.
pub const TIE_REL: f64 = 1e-9;
/// Relative Newton step at which iteration stops.
pub const NEWTON_REL_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 1000;
/// Iterates farther than this multiple of `1 + |center|` from the center
/// are treated as divergent.
pub const DIVERGENCE_RADIUS: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HwError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(
        "function is not analytic at the expansion center {center}; try a shifted center: {source}"
    )]
    SeriesPole {
        center: Complex64,
        #[source]
        source: SeriesError,
    },
    #[error("truncated series has no roots (degree 0 after trimming)")]
    NoCandidates,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Non-fatal conditions attached to a result.
#[derive(Debug, Clone, PartialEq)]
pub enum HwWarning {
    /// An iterate left the trust region; the best iterate seen is returned.
    NewtonDivergence { last: Complex64 },
    /// The iteration budget ran out before the step became small.
    NewtonMaxIterations,
    /// The derivative vanished at an iterate.
    ZeroDerivative { at: Complex64 },
    /// The function could not be evaluated at an iterate.
    Domain(String),
}

impl HwWarning {
    pub fn is_divergence(&self) -> bool {
        !matches!(self, HwWarning::NewtonMaxIterations)
    }
}

impl fmt::Display for HwWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HwWarning::NewtonDivergence { last } => {
                write!(f, "Newton iteration diverged (last iterate {last})")
            }
            HwWarning::NewtonMaxIterations => {
                write!(f, "Newton iteration hit {NEWTON_MAX_ITER} iterations")
            }
            HwWarning::ZeroDerivative { at } => write!(f, "derivative vanished at {at}"),
            HwWarning::Domain(msg) => write!(f, "evaluation failed during Newton: {msg}"),
        }
    }
}

/// A function that can be evaluated pointwise and expanded into a jet.
pub trait SeriesTarget {
    fn eval(&self, z: Complex64) -> Result<Complex64, HwError>;
    fn jet(&self, center: Complex64, order: usize) -> Result<Jet, SeriesError>;
}

impl SeriesTarget for Expr {
    fn eval(&self, z: Complex64) -> Result<Complex64, HwError> {
        Ok(eval_point(self, z)?)
    }

    fn jet(&self, center: Complex64, order: usize) -> Result<Jet, SeriesError> {
        jet_of_expr(self, center, order)
    }
}

impl<T: SeriesTarget + ?Sized> SeriesTarget for &T {
    fn eval(&self, z: Complex64) -> Result<Complex64, HwError> {
        (**self).eval(z)
    }

    fn jet(&self, center: Complex64, order: usize) -> Result<Jet, SeriesError> {
        (**self).jet(center, order)
    }
}

/// `HW(params; y)` truncated at `order` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct HwQuery {
    /// Functional parameters, outermost first; the last one sits innermost
    /// in the exponential tower.
    pub params: Vec<Expr>,
    pub y: Complex64,
    pub order: usize,
    pub center: Complex64,
}

impl HwQuery {
    pub fn new(params: Vec<Expr>, y: Complex64, order: usize) -> Result<HwQuery, HwError> {
        let q = HwQuery {
            params,
            y,
            order,
            center: ZERO,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_center(mut self, center: Complex64) -> HwQuery {
        self.center = center;
        self
    }

    pub fn validate(&self) -> Result<(), HwError> {
        if self.params.is_empty() {
            return Err(HwError::InvalidQuery(
                "at least one functional parameter is required".into(),
            ));
        }
        if self.order < 2 {
            return Err(HwError::InvalidQuery(format!(
                "truncation order must be at least 2, got {}",
                self.order
            )));
        }
        if !(self.y.re.is_finite() && self.y.im.is_finite()) {
            return Err(HwError::InvalidQuery("target must be finite".into()));
        }
        Ok(())
    }
}

/// A root of the truncated polynomial with its residual on the full
/// function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub value: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HwResult {
    pub value: Complex64,
    /// `|z·F(z) - y|` at `value`.
    pub residual: f64,
    pub newton_iterations: usize,
    pub candidate_count: usize,
    pub candidates: Vec<Candidate>,
    /// Whether the polynomial root finder met its tolerance. Informational:
    /// multiple roots of the truncated series routinely miss it.
    pub candidates_converged: bool,
    /// Residuals at or below this are ranked as equal.
    pub residual_floor: f64,
    pub warnings: Vec<HwWarning>,
}

/// Forward map `G(params; z0)`.
///
/// `F_1 = 1`, `F_{k+1} = exp(c·F_k)` applying the last parameter first.
/// With no parameters `G(z) = z`.
pub fn g_map(params: &[Expr], z0: Complex64) -> Result<Complex64, ExprError> {
    let mut tower = Complex64::new(1.0, 0.0);
    for c in params.iter().rev() {
        tower = (eval_point(c, z0)? * tower).exp();
    }
    Ok(z0 * tower)
}

/// Builds `z·exp(c_1·exp(c_2·…exp(c_n)…)) - y`, rewrites `exp(log(u))` to
/// `u`, and cancels `z·(u/z)` to `u`. For the functional index
/// `log(h(z)/z)` the result is `h(z) - y`.
pub fn build_fun(q: &HwQuery) -> Expr {
    let mut params = q.params.iter().rev();
    let innermost = params.next().cloned().unwrap_or(Expr::constant(ZERO));
    let mut tower = Expr::call(Func::Exp, innermost);
    for c in params {
        tower = Expr::call(Func::Exp, c.clone().mul(tower));
    }
    let product = cancel_identity_factor(simplify_exp_log(&Expr::Var.mul(tower)));
    product.sub(Expr::constant(q.y))
}

fn cancel_identity_factor(e: Expr) -> Expr {
    match e {
        Expr::Binary(BinOp::Mul, a, b) => match (*a, *b) {
            (Expr::Var, Expr::Binary(BinOp::Div, u, d)) if *d == Expr::Var => *u,
            (Expr::Binary(BinOp::Div, u, d), Expr::Var) if *d == Expr::Var => *u,
            (a, b) => Expr::binary(BinOp::Mul, a, b),
        },
        other => other,
    }
}

/// `HW(q.params; q.y)`.
pub fn hw_solve(q: &HwQuery) -> Result<HwResult, HwError> {
    q.validate()?;
    if q.y == ZERO {
        return Ok(HwResult {
            value: ZERO,
            residual: 0.0,
            newton_iterations: 0,
            candidate_count: 0,
            candidates: Vec::new(),
            candidates_converged: true,
            residual_floor: 0.0,
            warnings: Vec::new(),
        });
    }
    let fun = build_fun(q);
    solve_equation(&fun, ZERO, q.center, q.order)
}

/// Ordering used to pick a candidate: residual, then distance from the
/// center, then real part, then imaginary part. Residuals are clamped to
/// `floor` and the geometric keys compare equal within [`TIE_REL`], so
/// values that differ only by rounding fall through to the next key.
fn total_key(a: &Candidate, b: &Candidate, center: Complex64, floor: f64) -> Ordering {
    fn approx(x: f64, y: f64) -> Ordering {
        if (x - y).abs() <= TIE_REL * (1.0 + x.abs().max(y.abs())) {
            Ordering::Equal
        } else {
            x.total_cmp(&y)
        }
    }
    a.residual
        .max(floor)
        .total_cmp(&b.residual.max(floor))
        .then_with(|| approx((a.value - center).norm(), (b.value - center).norm()))
        .then_with(|| approx(a.value.re, b.value.re))
        .then_with(|| a.value.im.total_cmp(&b.value.im))
}

/// Solves `target(z) = rhs` by series truncation at `order` terms about
/// `center`, best-candidate selection, and Newton refinement.
pub fn solve_equation<T: SeriesTarget>(
    target: &T,
    rhs: Complex64,
    center: Complex64,
    order: usize,
) -> Result<HwResult, HwError> {
    if order < 2 {
        return Err(HwError::InvalidQuery(format!(
            "truncation order must be at least 2, got {order}"
        )));
    }
    let jet = target
        .jet(center, order)
        .map_err(|source| HwError::SeriesPole { center, source })?;
    let mut coeffs = jet.into_coeffs();
    coeffs[0] -= rhs;
    let scale = coeffs[0].norm();
    let poly = Poly::new(coeffs);
    if poly.degree() == 0 {
        return Err(HwError::NoCandidates);
    }
    let found = all_roots(&poly).map_err(|_| HwError::NoCandidates)?;
    let candidates: Vec<Candidate> = found
        .roots
        .iter()
        .map(|w| {
            let value = w + center;
            let residual = residual_of(target, rhs, value).unwrap_or(f64::INFINITY);
            Candidate { value, residual }
        })
        .collect();
    let floor = RESIDUAL_FLOOR_REL * (1.0 + scale);
    let start = candidates
        .iter()
        .filter(|c| c.residual.is_finite())
        .min_by(|a, b| total_key(a, b, center, floor))
        .copied()
        .ok_or(HwError::NoCandidates)?;

    let outcome = newton_refine(target, rhs, start, center, floor);
    Ok(HwResult {
        value: outcome.best.value,
        residual: outcome.best.residual,
        newton_iterations: outcome.iterations,
        candidate_count: candidates.len(),
        candidates,
        candidates_converged: found.converged,
        residual_floor: floor,
        warnings: outcome.warnings,
    })
}

fn residual_of<T: SeriesTarget>(target: &T, rhs: Complex64, z: Complex64) -> Result<f64, HwError> {
    let r = (target.eval(z)? - rhs).norm();
    if r.is_finite() {
        Ok(r)
    } else {
        Err(HwError::Expr(ExprError::EvalDomain(
            "non-finite residual".into(),
        )))
    }
}

/// Result of [`newton_refine`].
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    /// Lowest-residual point visited, the start included.
    pub best: Candidate,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<HwWarning>,
}

/// Newton's method on `target(z) = rhs` from `start`, with derivatives from
/// order-2 jets. Stops on a relative step of [`NEWTON_REL_TOL`], after
/// [`NEWTON_MAX_ITER`] steps, or when an iterate leaves the disc of radius
/// `DIVERGENCE_RADIUS·(1 + |center|)` about `center`. Residuals at or below
/// `floor` rank as equal when picking the best point.
pub fn newton_refine<T: SeriesTarget>(
    target: &T,
    rhs: Complex64,
    start: Candidate,
    center: Complex64,
    floor: f64,
) -> NewtonOutcome {
    let mut warnings = Vec::new();
    let mut best = start;
    let mut z = start.value;
    let mut iterations = 0;
    let limit = DIVERGENCE_RADIUS * (1.0 + center.norm());
    let mut converged = start.residual == 0.0;
    while !converged && iterations < NEWTON_MAX_ITER {
        let local = match target.jet(z, 2) {
            Ok(j) => j,
            Err(e) => {
                warnings.push(HwWarning::Domain(e.to_string()));
                break;
            }
        };
        let value = local.value() - rhs;
        let slope = local.derivative();
        if slope == ZERO {
            warnings.push(HwWarning::ZeroDerivative { at: z });
            break;
        }
        let step = value / slope;
        let next = z - step;
        iterations += 1;
        if !(next.re.is_finite() && next.im.is_finite()) || (next - center).norm() > limit {
            warnings.push(HwWarning::NewtonDivergence { last: next });
            break;
        }
        let scale = if z == ZERO { 1.0 } else { z.norm() };
        converged = step.norm() <= NEWTON_REL_TOL * scale;
        z = next;
        match residual_of(target, rhs, z) {
            Ok(r) => {
                let here = Candidate {
                    value: z,
                    residual: r,
                };
                if total_key(&here, &best, center, floor) != Ordering::Greater {
                    best = here;
                }
                if r == 0.0 {
                    converged = true;
                }
            }
            Err(e) => {
                warnings.push(HwWarning::Domain(e.to_string()));
                break;
            }
        }
    }
    if !converged && warnings.is_empty() {
        warnings.push(HwWarning::NewtonMaxIterations);
    }
    NewtonOutcome {
        best,
        iterations,
        converged,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const EX1: &str = "(z-2)*(z-3)*(z-5)";

    #[test]
    fn g_map_examples() {
        assert_eq!(g_map(&[], c(7.0, 0.0)).unwrap(), c(7.0, 0.0));
        let e = g_map(&[Expr::Var], c(1.0, 0.0)).unwrap();
        assert!((e - std::f64::consts::E).norm() < 1e-15);
        let idx = parse(&format!("log({EX1}/z)")).unwrap();
        let v = g_map(&[idx], c(5.26953, 0.0)).unwrap();
        assert!((v - 2.0).norm() < 1e-3, "{v}");
    }

    #[test]
    fn g_map_tower_order() {
        // G(a, b; z) = z·exp(a·exp(b)) with b innermost
        let params = [Expr::constant(c(2.0, 0.0)), Expr::constant(c(0.5, 0.0))];
        let want = (2.0 * 0.5f64.exp()).exp() * 3.0;
        assert!((g_map(&params, c(3.0, 0.0)).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn build_fun_functional_index() {
        let q = HwQuery::new(
            vec![parse(&format!("log({EX1}/z)")).unwrap()],
            c(2.0, 0.0),
            10,
        )
        .unwrap();
        assert_eq!(build_fun(&q), parse(&format!("{EX1} - 2")).unwrap());
    }

    #[test]
    fn build_fun_lambert() {
        let q = HwQuery::new(vec![Expr::Var], ZERO, 10).unwrap();
        assert_eq!(build_fun(&q), parse("z*exp(z) - 0").unwrap());
    }

    #[test]
    fn build_fun_kepler() {
        let q = HwQuery::new(
            vec![parse("log(1 - 0.1*sinc(z))").unwrap()],
            c(1.0, 0.0),
            10,
        )
        .unwrap();
        let fun = build_fun(&q);
        let reference = parse("z - 0.1*sin(z) - 1").unwrap();
        for z in [c(0.3, 0.1), c(-2.0, 0.5), c(1.0886, 0.0)] {
            let d = eval_point(&fun, z).unwrap() - eval_point(&reference, z).unwrap();
            assert!(d.norm() < 1e-14);
        }
        let a = jet_of_expr(&fun, ZERO, 8).unwrap();
        let b = jet_of_expr(&reference, ZERO, 8).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn example_one_first_root() {
        let q = HwQuery::new(
            vec![parse(&format!("log({EX1}/z)")).unwrap()],
            c(2.0, 0.0),
            10,
        )
        .unwrap();
        let r = hw_solve(&q).unwrap();
        assert!(r.warnings.is_empty());
        assert_eq!(r.candidate_count, 3);
        assert!(
            (r.value - c(2.36523, -0.69160)).norm() < 1e-4,
            "{}",
            r.value
        );
        for cand in &r.candidates {
            assert!(r.residual <= cand.residual.max(r.residual_floor));
        }
    }

    #[test]
    fn zero_target_short_circuits() {
        let q = HwQuery::new(vec![parse("sin(z)").unwrap()], ZERO, 5).unwrap();
        let r = hw_solve(&q).unwrap();
        assert_eq!(r.value, ZERO);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn kepler() {
        // Fixed-point oracle for E = 1 + 0.1 sin E.
        let mut e = 1.0f64;
        for _ in 0..200 {
            e = 1.0 + 0.1 * e.sin();
        }
        let q = HwQuery::new(
            vec![parse("log(1 - 0.1*sinc(z))").unwrap()],
            c(1.0, 0.0),
            10,
        )
        .unwrap();
        let r = hw_solve(&q).unwrap();
        assert!((r.value - e).norm() < 1e-10, "{} vs {e}", r.value);
        assert!((e - 1.08860).abs() < 1e-5);
    }

    #[test]
    fn lambert_w_principal() {
        // W(1) = Ω = 0.567143290409...
        let q = HwQuery::new(vec![Expr::Var], c(1.0, 0.0), 12).unwrap();
        let r = hw_solve(&q).unwrap();
        assert!(
            (r.value - 0.567_143_290_409_783_8).norm() < 1e-12,
            "{}",
            r.value
        );
    }

    #[test]
    fn invalid_queries() {
        assert!(matches!(
            HwQuery::new(vec![], c(1.0, 0.0), 10),
            Err(HwError::InvalidQuery(_))
        ));
        assert!(matches!(
            HwQuery::new(vec![Expr::Var], c(1.0, 0.0), 1),
            Err(HwError::InvalidQuery(_))
        ));
    }

    #[test]
    fn singular_center_reports_pole() {
        // fun = z·exp(log(1/z^2)) - 1 = 1/z - 1 has a pole at 0
        let q = HwQuery::new(vec![parse("log(1/z^2)").unwrap()], c(1.0, 0.0), 6).unwrap();
        let err = hw_solve(&q).unwrap_err();
        assert!(matches!(err, HwError::SeriesPole { .. }), "{err:?}");
        // moving the center away from the pole recovers z = 1
        let r = hw_solve(&q.with_center(c(0.8, 0.0))).unwrap();
        assert!((r.value - 1.0).norm() < 1e-10, "{}", r.value);
    }

    #[test]
    fn constant_series_has_no_candidates() {
        let q = HwQuery::new(vec![parse("log(3/z)").unwrap()], c(1.0, 0.0), 6).unwrap();
        assert_eq!(hw_solve(&q).unwrap_err(), HwError::NoCandidates);
    }

    #[test]
    fn deterministic() {
        let q = HwQuery::new(vec![parse("log(sin(z)/z)").unwrap()], c(0.5, 0.0), 10).unwrap();
        let a = hw_solve(&q).unwrap();
        let b = hw_solve(&q).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }
}
