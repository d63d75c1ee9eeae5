use num_complex::Complex64;

use super::{BinOp, Expr, ExprError, Func};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn domain(msg: impl Into<String>) -> ExprError {
    ExprError::EvalDomain(msg.into())
}

pub(crate) fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

pub(crate) fn apply_func(func: Func, x: Complex64) -> Result<Complex64, ExprError> {
    Ok(match func {
        Func::Exp => x.exp(),
        Func::Log => {
            if x == ZERO {
                return Err(domain("log(0)"));
            }
            x.ln()
        }
        Func::Sqrt => x.sqrt(),
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Sinh => x.sinh(),
        Func::Cosh => x.cosh(),
        Func::Tanh => x.tanh(),
        Func::Sinc => sinc(x),
    })
}

pub(crate) fn apply_pow(base: Complex64, p: f64) -> Result<Complex64, ExprError> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        if base == ZERO && p < 0.0 {
            return Err(domain("zero raised to a negative power"));
        }
        return Ok(base.powi(p as i32));
    }
    if base == ZERO {
        return if p > 0.0 {
            Ok(ZERO)
        } else {
            Err(domain("zero raised to a negative power"))
        };
    }
    Ok((base.ln() * p).exp())
}

/// Evaluates `e` at `z0` using principal branches of `log`, `sqrt` and
/// fractional powers.
pub fn eval_point(e: &Expr, z0: Complex64) -> Result<Complex64, ExprError> {
    let v = eval_rec(e, z0)?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(domain(format!("non-finite value at z = {z0}")));
    }
    Ok(v)
}

fn eval_rec(e: &Expr, z0: Complex64) -> Result<Complex64, ExprError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var => z0,
        Expr::Neg(a) => -eval_rec(a, z0)?,
        Expr::Call(f, a) => apply_func(*f, eval_rec(a, z0)?)?,
        Expr::Binary(op, a, b) => {
            let lhs = eval_rec(a, z0)?;
            match op {
                BinOp::Pow => {
                    let Expr::Const(p) = **b else {
                        return Err(domain("non-constant exponent"));
                    };
                    apply_pow(lhs, p.re)?
                }
                _ => {
                    let rhs = eval_rec(b, z0)?;
                    match op {
                        BinOp::Add => lhs + rhs,
                        BinOp::Sub => lhs - rhs,
                        BinOp::Mul => lhs * rhs,
                        BinOp::Div => {
                            if rhs == ZERO {
                                return Err(domain(format!("division by zero at z = {z0}")));
                            }
                            lhs / rhs
                        }
                        BinOp::Pow => unreachable!(),
                    }
                }
            }
        }
    })
}
