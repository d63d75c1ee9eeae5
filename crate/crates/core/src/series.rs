//! Truncated power series ("jets") over complex coefficients.
//!
//! A [`Jet`] of order `n` about `a` holds the Taylor coefficients
//! `c_0 .. c_{n-1}` of a function in powers of `(z - a)`. Ring operations
//! are exact up to truncation; elementary functions are composed with the
//! usual first-order ODE recurrences. Division cancels common leading zeros
//! of numerator and denominator, so removable singularities such as
//! `sin(z)/z` at 0 are handled without a symbolic engine.

use std::fmt;

use num_complex::Complex64;

use crate::expr::{BinOp, Expr, Func};

/// Magnitude below which a leading coefficient counts as zero when
/// cancelling valuations in division.
pub const ZERO_TOL: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("jet orders differ ({lhs} vs {rhs})")]
    OrderMismatch { lhs: usize, rhs: usize },
    #[error("jet centers differ ({lhs} vs {rhs})")]
    CenterMismatch { lhs: Complex64, rhs: Complex64 },
    #[error("jet order must be at least 1")]
    InvalidOrder,
    #[error("quotient has a pole at the expansion center{}", fmt_path(.path))]
    Pole { path: String },
    #[error("division by a series that vanishes through the working order{}", fmt_path(.path))]
    ZeroDivisor { path: String },
    #[error("log of a series with vanishing constant term{}", fmt_path(.path))]
    LogOfZeroSeries { path: String },
    #[error("sqrt of a series with vanishing constant term{}", fmt_path(.path))]
    SqrtOfZeroSeries { path: String },
    #[error("fractional power of a series with vanishing constant term{}", fmt_path(.path))]
    PowOfZeroSeries { path: String },
    #[error("non-finite coefficient{}", fmt_path(.path))]
    NonFinite { path: String },
}

fn fmt_path(path: &str) -> String {
    if path.is_empty() {
        String::new()
    } else {
        format!(" (at {path})")
    }
}

impl SeriesError {
    fn with_path(self, p: String) -> SeriesError {
        use SeriesError::*;
        match self {
            Pole { path } if path.is_empty() => Pole { path: p },
            ZeroDivisor { path } if path.is_empty() => ZeroDivisor { path: p },
            LogOfZeroSeries { path } if path.is_empty() => LogOfZeroSeries { path: p },
            SqrtOfZeroSeries { path } if path.is_empty() => SqrtOfZeroSeries { path: p },
            PowOfZeroSeries { path } if path.is_empty() => PowOfZeroSeries { path: p },
            NonFinite { path } if path.is_empty() => NonFinite { path: p },
            other => other,
        }
    }

    /// AST path to the node that failed, when known.
    pub fn path(&self) -> Option<&str> {
        use SeriesError::*;
        match self {
            Pole { path }
            | ZeroDivisor { path }
            | LogOfZeroSeries { path }
            | SqrtOfZeroSeries { path }
            | PowOfZeroSeries { path }
            | NonFinite { path } => Some(path.as_str()).filter(|p| !p.is_empty()),
            _ => None,
        }
    }
}

/// Truncated Taylor series about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
    center: Complex64,
    /// Leading coefficients known to be exact up to rounding. Division with
    /// valuation cancellation pads the tail with zeros and lowers this.
    valid: usize,
}

impl Jet {
    pub fn new(coeffs: Vec<Complex64>, center: Complex64) -> Result<Jet, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::InvalidOrder);
        }
        let valid = coeffs.len();
        Ok(Jet {
            coeffs,
            center,
            valid,
        })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Jet, SeriesError> {
        Jet::new(
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            ZERO,
        )
    }

    pub fn constant(value: Complex64, center: Complex64, order: usize) -> Jet {
        let mut coeffs = vec![ZERO; order.max(1)];
        coeffs[0] = value;
        Jet {
            valid: coeffs.len(),
            coeffs,
            center,
        }
    }

    /// The identity function `z` expanded about `center`.
    pub fn variable(center: Complex64, order: usize) -> Jet {
        let mut j = Jet::constant(center, center, order);
        if j.coeffs.len() > 1 {
            j.coeffs[1] = ONE;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Number of leading coefficients not affected by padding.
    pub fn valid_len(&self) -> usize {
        self.valid
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// First derivative at the center.
    pub fn derivative(&self) -> Complex64 {
        self.coeffs.get(1).copied().unwrap_or(ZERO)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.clamp(1, self.order());
        Jet {
            coeffs: self.coeffs[..order].to_vec(),
            center: self.center,
            valid: self.valid.min(order),
        }
    }

    /// Number of leading coefficients with magnitude at most [`ZERO_TOL`].
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .take_while(|c| c.norm() <= ZERO_TOL)
            .count()
    }

    /// Evaluates the truncated polynomial at `z`.
    pub fn eval_truncated(&self, z: Complex64) -> Complex64 {
        let w = z - self.center;
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * w + c)
    }

    fn check(&self, rhs: &Jet) -> Result<(), SeriesError> {
        if self.order() != rhs.order() {
            return Err(SeriesError::OrderMismatch {
                lhs: self.order(),
                rhs: rhs.order(),
            });
        }
        if self.center != rhs.center {
            return Err(SeriesError::CenterMismatch {
                lhs: self.center,
                rhs: rhs.center,
            });
        }
        Ok(())
    }

    fn like(&self, coeffs: Vec<Complex64>, valid: usize) -> Jet {
        Jet {
            coeffs,
            center: self.center,
            valid,
        }
    }

    pub fn neg(&self) -> Jet {
        self.like(self.coeffs.iter().map(|c| -c).collect(), self.valid)
    }

    pub fn scale(&self, k: Complex64) -> Jet {
        self.like(self.coeffs.iter().map(|c| c * k).collect(), self.valid)
    }

    pub fn add(&self, rhs: &Jet) -> Result<Jet, SeriesError> {
        self.check(rhs)?;
        let c = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(self.like(c, self.valid.min(rhs.valid)))
    }

    pub fn sub(&self, rhs: &Jet) -> Result<Jet, SeriesError> {
        self.check(rhs)?;
        let c = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(self.like(c, self.valid.min(rhs.valid)))
    }

    pub fn mul(&self, rhs: &Jet) -> Result<Jet, SeriesError> {
        self.check(rhs)?;
        let n = self.order();
        let (a, b) = (&self.coeffs, &rhs.coeffs);
        let c = (0..n)
            .map(|k| (0..=k).fold(ZERO, |acc, j| acc + a[j] * b[k - j]))
            .collect();
        Ok(self.like(c, self.valid.min(rhs.valid)))
    }

    /// Long division. Leading zeros common to both operands are cancelled
    /// first; a quotient that would need negative powers is a
    /// [`SeriesError::Pole`].
    pub fn div(&self, rhs: &Jet) -> Result<Jet, SeriesError> {
        self.check(rhs)?;
        let n = self.order();
        let shift = rhs.valuation();
        if shift >= n {
            return Err(SeriesError::ZeroDivisor {
                path: String::new(),
            });
        }
        if self.valuation() < shift {
            return Err(SeriesError::Pole {
                path: String::new(),
            });
        }
        let a = &self.coeffs[shift..];
        let b = &rhs.coeffs[shift..];
        let m = n - shift;
        let mut q = Vec::with_capacity(n);
        for k in 0..m {
            let s = (1..=k).fold(a[k], |acc, j| acc - b[j] * q[k - j]);
            q.push(s / b[0]);
        }
        q.resize(n, ZERO);
        let valid = self.valid.min(rhs.valid).saturating_sub(shift);
        Ok(self.like(q, valid))
    }

    pub fn exp(&self) -> Jet {
        let a = &self.coeffs;
        let mut e = vec![a[0].exp()];
        for k in 1..self.order() {
            let s = (1..=k).fold(ZERO, |acc, j| acc + a[j] * e[k - j] * j as f64);
            e.push(s / k as f64);
        }
        self.like(e, self.valid)
    }

    pub fn ln(&self) -> Result<Jet, SeriesError> {
        let a = &self.coeffs;
        if a[0].norm() <= ZERO_TOL {
            return Err(SeriesError::LogOfZeroSeries {
                path: String::new(),
            });
        }
        let mut l = vec![a[0].ln()];
        for k in 1..self.order() {
            let s = (1..k).fold(ZERO, |acc, j| acc + l[j] * a[k - j] * j as f64);
            l.push((a[k] - s / k as f64) / a[0]);
        }
        Ok(self.like(l, self.valid))
    }

    pub fn sqrt(&self) -> Result<Jet, SeriesError> {
        let a = &self.coeffs;
        if a[0].norm() <= ZERO_TOL {
            return Err(SeriesError::SqrtOfZeroSeries {
                path: String::new(),
            });
        }
        let s0 = a[0].sqrt();
        let mut s = vec![s0];
        for k in 1..self.order() {
            let acc = (1..k).fold(ZERO, |acc, j| acc + s[j] * s[k - j]);
            s.push((a[k] - acc) / (s0 * 2.0));
        }
        Ok(self.like(s, self.valid))
    }

    /// Returns `(sin, cos)` when `hyperbolic` is false and `(sinh, cosh)`
    /// otherwise.
    fn sin_cos_pair(&self, hyperbolic: bool) -> (Jet, Jet) {
        let a = &self.coeffs;
        let (s0, c0) = if hyperbolic {
            (a[0].sinh(), a[0].cosh())
        } else {
            (a[0].sin(), a[0].cos())
        };
        let sign = if hyperbolic { 1.0 } else { -1.0 };
        let mut s = vec![s0];
        let mut c = vec![c0];
        for k in 1..self.order() {
            let mut sk = ZERO;
            let mut ck = ZERO;
            for j in 1..=k {
                let ja = a[j] * j as f64;
                sk += ja * c[k - j];
                ck += ja * s[k - j];
            }
            s.push(sk / k as f64);
            c.push(ck * sign / k as f64);
        }
        (self.like(s, self.valid), self.like(c, self.valid))
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos_pair(false).0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos_pair(false).1
    }

    pub fn sinh(&self) -> Jet {
        self.sin_cos_pair(true).0
    }

    pub fn cosh(&self) -> Jet {
        self.sin_cos_pair(true).1
    }

    /// tan' = (1 + tan^2) x' and tanh' = (1 - tanh^2) x'.
    fn tan_like(&self, hyperbolic: bool) -> Jet {
        let a = &self.coeffs;
        let n = self.order();
        let sign = if hyperbolic { -1.0 } else { 1.0 };
        let t0 = if hyperbolic { a[0].tanh() } else { a[0].tan() };
        let mut t = vec![t0];
        // u = 1 ± t^2
        let mut u = vec![ONE + t0 * t0 * sign];
        for k in 1..n {
            let tk = (1..=k).fold(ZERO, |acc, j| acc + a[j] * u[k - j] * j as f64) / k as f64;
            t.push(tk);
            let sq = (0..=k).fold(ZERO, |acc, i| acc + t[i] * t[k - i]);
            u.push(sq * sign);
        }
        self.like(t, self.valid)
    }

    pub fn tan(&self) -> Jet {
        self.tan_like(false)
    }

    pub fn tanh(&self) -> Jet {
        self.tan_like(true)
    }

    /// `sin(x)/x`, cancelling the common zero when `x` vanishes at the
    /// center.
    pub fn sinc(&self) -> Result<Jet, SeriesError> {
        self.sin().div(self)
    }

    pub fn powi(&self, n: i64) -> Result<Jet, SeriesError> {
        let one = Jet::constant(ONE, self.center, self.order());
        let mut base = self.clone();
        let mut acc = one.clone();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        if n < 0 {
            one.div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// Principal-branch real power `x^p`.
    pub fn powf(&self, p: f64) -> Result<Jet, SeriesError> {
        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
            return self.powi(p as i64);
        }
        let a = &self.coeffs;
        if a[0].norm() <= ZERO_TOL {
            return Err(SeriesError::PowOfZeroSeries {
                path: String::new(),
            });
        }
        let mut y = vec![(a[0].ln() * p).exp()];
        for k in 1..self.order() {
            let s = (1..=k).fold(ZERO, |acc, j| {
                acc + a[j] * y[k - j] * ((p + 1.0) * j as f64 - k as f64)
            });
            y.push(s / (a[0] * k as f64));
        }
        Ok(self.like(y, self.valid))
    }

    pub fn compose(&self, func: Func) -> Result<Jet, SeriesError> {
        Ok(match func {
            Func::Exp => self.exp(),
            Func::Log => self.ln()?,
            Func::Sqrt => self.sqrt()?,
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Tan => self.tan(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Tanh => self.tanh(),
            Func::Sinc => self.sinc()?,
        })
    }

    fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] @ {}", self.center)
    }
}

/// Arithmetic operation for [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn jet_arith(lhs: &Jet, rhs: &Jet, op: JetOp) -> Result<Jet, SeriesError> {
    match op {
        JetOp::Add => lhs.add(rhs),
        JetOp::Sub => lhs.sub(rhs),
        JetOp::Mul => lhs.mul(rhs),
        JetOp::Div => lhs.div(rhs),
    }
}

pub fn jet_compose_elementary(func: Func, x: &Jet) -> Result<Jet, SeriesError> {
    x.compose(func)
}

/// Largest extra working order tried by [`jet_of_expr`].
const MAX_SLACK: usize = 64;

/// Taylor jet of `e` about `center` with `order` coefficients.
///
/// Valuation cancellation in a quotient costs trailing coefficients, so the
/// expression is evaluated at a higher working order and truncated; the
/// first `m` coefficients are therefore the same for every requested order
/// `>= m`.
pub fn jet_of_expr(e: &Expr, center: Complex64, order: usize) -> Result<Jet, SeriesError> {
    if order == 0 {
        return Err(SeriesError::InvalidOrder);
    }
    let mut slack = 2;
    loop {
        let mut path = Vec::new();
        let jet = jet_rec(e, center, order + slack, &mut path)?;
        if jet.valid >= order || slack >= MAX_SLACK {
            return Ok(jet.truncate(order));
        }
        slack *= 2;
    }
}

fn jet_rec(
    e: &Expr,
    center: Complex64,
    order: usize,
    path: &mut Vec<String>,
) -> Result<Jet, SeriesError> {
    let here = |path: &Vec<String>, label: &str| {
        let mut p = path.join("/");
        if !p.is_empty() {
            p.push('/');
        }
        p.push_str(label);
        p
    };
    let out = match e {
        Expr::Const(c) => Jet::constant(*c, center, order),
        Expr::Var => Jet::variable(center, order),
        Expr::Neg(a) => {
            path.push("neg".into());
            let j = jet_rec(a, center, order, path)?;
            path.pop();
            j.neg()
        }
        Expr::Call(func, a) => {
            path.push(format!("{}.arg", func.name()));
            let j = jet_rec(a, center, order, path)?;
            path.pop();
            j.compose(*func)
                .map_err(|err| err.with_path(here(path, func.name())))?
        }
        Expr::Binary(BinOp::Pow, a, b) => {
            path.push("pow.base".into());
            let j = jet_rec(a, center, order, path)?;
            path.pop();
            let p = match **b {
                Expr::Const(p) => p.re,
                _ => unreachable!("parser guarantees constant exponents"),
            };
            j.powf(p).map_err(|err| err.with_path(here(path, "pow")))?
        }
        Expr::Binary(op, a, b) => {
            path.push(format!("{}.lhs", op.name()));
            let l = jet_rec(a, center, order, path)?;
            path.pop();
            path.push(format!("{}.rhs", op.name()));
            let r = jet_rec(b, center, order, path)?;
            path.pop();
            match op {
                BinOp::Add => l.add(&r),
                BinOp::Sub => l.sub(&r),
                BinOp::Mul => l.mul(&r),
                BinOp::Div => l.div(&r),
                BinOp::Pow => unreachable!(),
            }
            .map_err(|err| err.with_path(here(path, op.name())))?
        }
    };
    if !out.is_finite() {
        return Err(SeriesError::NonFinite {
            path: here(path, "value"),
        });
    }
    Ok(out)
}
