//! Complex analytic expressions in the single free variable `z`.
//!
//! Expressions are read with [`parse`], evaluated pointwise with
//! [`eval_point`], and turned into truncated Taylor series by
//! [`crate::series::jet_of_expr`]. The only symbolic rewrite performed
//! anywhere is [`simplify_exp_log`].

mod eval;
mod parse;
mod simplify;

use std::fmt;

use num_complex::Complex64;

pub use eval::eval_point;
pub use parse::{parse, MAX_DEPTH, MAX_NODES};
pub use simplify::simplify_exp_log;

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Exponent is always a real constant (checked by the parser).
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    pub(crate) fn name(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
            BinOp::Pow => "pow",
        }
    }
}

/// Elementary functions understood by the parser, the evaluator and the
/// series engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    /// `sin(z)/z`, with the removable singularity filled in as 1.
    Sinc,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Sinc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sinc => "sinc",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(value: impl Into<Complex64>) -> Expr {
        Expr::Const(value.into())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Add, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Sub, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Mul, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Div, self, rhs)
    }

    /// Integer or rational power; `exponent` must be real.
    pub fn pow(self, exponent: f64) -> Expr {
        Expr::binary(BinOp::Pow, self, Expr::constant(exponent))
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Neg(e) | Expr::Call(_, e) => 1 + e.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Neg(e) | Expr::Call(_, e) => 1 + e.depth(),
            Expr::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Neg(e) | Expr::Call(_, e) => e.contains_var(),
            Expr::Binary(_, a, b) => a.contains_var() || b.contains_var(),
        }
    }

    /// Upper bound on the degree when `self` is a polynomial in `z`
    /// (no function calls, no division by `z`-dependent terms, only
    /// non-negative integer powers). `None` otherwise.
    pub fn polynomial_degree_bound(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => Some(0),
            Expr::Var => Some(1),
            Expr::Neg(e) => e.polynomial_degree_bound(),
            Expr::Call(..) => None,
            Expr::Binary(op, a, b) => match op {
                BinOp::Add | BinOp::Sub => Some(
                    a.polynomial_degree_bound()?
                        .max(b.polynomial_degree_bound()?),
                ),
                BinOp::Mul => Some(a.polynomial_degree_bound()? + b.polynomial_degree_bound()?),
                BinOp::Div => {
                    if b.contains_var() {
                        None
                    } else {
                        a.polynomial_degree_bound()
                    }
                }
                BinOp::Pow => {
                    let Expr::Const(p) = **b else { return None };
                    let base = a.polynomial_degree_bound()?;
                    if p.im == 0.0 && p.re >= 0.0 && p.re.fract() == 0.0 && p.re <= 1e6 {
                        Some(base * p.re as usize)
                    } else if base == 0 {
                        Some(0)
                    } else {
                        None
                    }
                }
            },
        }
    }
}

fn fmt_real(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // Debug gives the shortest representation that parses back exactly.
    write!(f, "{x:?}")
}

impl fmt::Display for Expr {
    /// Fully parenthesized infix form that [`parse`] reads back to the
    /// same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var => f.write_str("z"),
            Expr::Const(c) => {
                let re_plain = c.re.is_sign_positive() && c.im == 0.0;
                if re_plain {
                    return fmt_real(c.re, f);
                }
                f.write_str("(")?;
                if c.im == 0.0 {
                    fmt_real(c.re, f)?;
                } else if c.re == 0.0 && c.re.is_sign_positive() {
                    if c.im.is_sign_negative() {
                        f.write_str("-")?;
                    }
                    fmt_real(c.im.abs(), f)?;
                    f.write_str("i")?;
                } else {
                    fmt_real(c.re, f)?;
                    f.write_str(if c.im.is_sign_negative() { "-" } else { "+" })?;
                    fmt_real(c.im.abs(), f)?;
                    f.write_str("i")?;
                }
                f.write_str(")")
            }
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

/// Errors raised while reading or evaluating expressions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("domain error: {0}")]
    EvalDomain(String),
}
