//! Dense complex polynomials and a simultaneous (Aberth–Ehrlich) root finder.

use std::f64::consts::TAU;

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative magnitude below which trailing coefficients are trimmed.
pub const TRIM_TOL: f64 = 1e-13;
/// Sweep limit for [`all_roots`].
pub const MAX_SWEEPS: usize = 500;
/// Update size (relative to `max(1, |z|)`) at which a root stops moving.
pub const UPDATE_TOL: f64 = 1e-13;
/// Angular offset of the initial guesses; breaks the symmetry that makes
/// equally spaced starts stall on real polynomials.
pub const START_ANGLE: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomial has degree 0; it has no roots to find")]
    ConstantPolynomial,
    #[error("polynomial has non-finite coefficients")]
    NonFinite,
}

/// Complex polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial, trimming trailing coefficients that are
    /// negligible relative to the largest one.
    pub fn new(mut coeffs: Vec<Complex64>) -> Poly {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= TRIM_TOL * scale {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Poly {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `leading · ∏ (z - r)`.
    pub fn from_roots(leading: Complex64, roots: &[Complex64]) -> Poly {
        let mut c = vec![leading];
        for r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * r;
            }
            c = next;
        }
        Poly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value, derivative and a rounding-error bound for the value.
    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64, f64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        let mut bound = 0.0;
        let az = z.norm();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            bound = bound * az + p.norm();
        }
        (p, dp, bound * f64::EPSILON)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }
}

/// Output of [`all_roots`].
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// False when the sweep limit was hit; `roots` then holds the last
    /// iterate.
    pub converged: bool,
    pub sweeps: usize,
}

/// All `degree` roots of `p`, with multiplicity.
///
/// Aberth–Ehrlich iteration from points on a circle of radius
/// `1 + max |c_k / c_deg|`, followed by two guarded Newton steps per root.
/// A root stops moving once its update falls under [`UPDATE_TOL`] or
/// `|p|` reaches the rounding floor of Horner evaluation.
pub fn all_roots(p: &Poly) -> Result<RootSet, PolyError> {
    if p.coeffs
        .iter()
        .any(|c| !(c.re.is_finite() && c.im.is_finite()))
    {
        return Err(PolyError::NonFinite);
    }
    let d = p.degree();
    if d == 0 {
        return Err(PolyError::ConstantPolynomial);
    }
    let lead = p.leading();
    if d == 1 {
        return Ok(RootSet {
            roots: vec![-p.coeffs[0] / lead],
            converged: true,
            sweeps: 0,
        });
    }

    let radius = 1.0
        + p.coeffs[..d]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / d as f64 + START_ANGLE))
        .collect();
    let mut frozen = vec![false; d];
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && frozen.iter().any(|f| !f) {
        sweeps += 1;
        for i in 0..d {
            if frozen[i] {
                continue;
            }
            let (v, dv, bound) = p.eval_with_derivative(z[i]);
            if v.norm() <= bound {
                frozen[i] = true;
                continue;
            }
            let sum = (0..d)
                .filter(|&j| j != i && z[j] != z[i])
                .fold(ZERO, |acc, j| acc + (z[i] - z[j]).inv());
            let step = if dv == ZERO {
                // stationary point: nudge off it
                Complex64::new(1e-8 * (1.0 + z[i].norm()), 0.0)
            } else {
                let ratio = v / dv;
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
                if w.re.is_finite() && w.im.is_finite() {
                    w
                } else {
                    ratio
                }
            };
            z[i] -= step;
            if step.norm() <= UPDATE_TOL * z[i].norm().max(1.0) {
                frozen[i] = true;
            }
        }
    }
    let converged = frozen.iter().all(|&f| f);

    for r in z.iter_mut() {
        for _ in 0..2 {
            let (v, dv, _) = p.eval_with_derivative(*r);
            if dv == ZERO || v == ZERO {
                break;
            }
            let next = *r - v / dv;
            if p.eval(next).norm() < v.norm() {
                *r = next;
            }
        }
    }
    Ok(RootSet {
        roots: z,
        converged,
        sweeps,
    })
}

/// Synthetic division by `(z - r)`. Returns the quotient and the remainder
/// `p(r)`.
pub fn poly_deflate_linear(p: &Poly, r: Complex64) -> (Poly, Complex64) {
    let d = p.degree();
    if d == 0 {
        return (Poly { coeffs: vec![ZERO] }, p.coeffs[0]);
    }
    let mut q = vec![ZERO; d];
    let mut acc = p.coeffs[d];
    for k in (0..d).rev() {
        q[k] = acc;
        acc = p.coeffs[k] + r * acc;
    }
    (Poly { coeffs: q }, acc)
}
