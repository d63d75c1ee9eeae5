use num_complex::Complex64;

use super::{BinOp, Expr, ExprError, Func};

/// Maximum nesting depth accepted by the parser.
pub const MAX_DEPTH: usize = 200;
/// Maximum number of AST nodes accepted by the parser.
pub const MAX_NODES: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let value: f64 = text[start..i]
                .parse()
                .map_err(|_| syntax(start, format!("bad number `{}`", &text[start..i])))?;
            let imag = bytes.get(i) == Some(&b'i')
                && !bytes
                    .get(i + 1)
                    .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
            if imag {
                i += 1;
                out.push(Token {
                    tok: Tok::Imag(value),
                    pos: start,
                });
            } else {
                out.push(Token {
                    tok: Tok::Num(value),
                    pos: start,
                });
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                pos: start,
            });
            continue;
        }
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        out.push(Token { tok, pos: start });
        i += 1;
    }
    out.push(Token {
        tok: Tok::End,
        pos: text.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    depth: usize,
    nodes: usize,
}

/// Folds operations whose operands are both constants. This is what turns
/// `2+3i` or `-1.5` into a single literal.
fn fold(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    if let (Expr::Const(a), Expr::Const(b)) = (&lhs, &rhs) {
        let folded = match op {
            BinOp::Add => Some(a + b),
            BinOp::Sub => Some(a - b),
            BinOp::Mul => Some(a * b),
            BinOp::Div if *b != Complex64::new(0.0, 0.0) => Some(a / b),
            BinOp::Pow if b.im == 0.0 && b.re.fract() == 0.0 && b.re.abs() <= 64.0 => {
                Some(a.powi(b.re as i32))
            }
            BinOp::Pow if b.im == 0.0 && a.im == 0.0 && a.re > 0.0 => {
                Some(Complex64::new(a.re.powf(b.re), 0.0))
            }
            _ => None,
        };
        if let Some(v) = folded {
            return Expr::Const(v);
        }
    }
    Expr::binary(op, lhs, rhs)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn node(&mut self, pos: usize) -> Result<(), ExprError> {
        self.nodes += 1;
        if self.nodes > MAX_NODES {
            return Err(syntax(pos, format!("expression exceeds {MAX_NODES} nodes")));
        }
        Ok(())
    }

    fn enter(&mut self, pos: usize) -> Result<(), ExprError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(
                pos,
                format!("expression nested deeper than {MAX_DEPTH}"),
            ));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            self.node(pos)?;
            let rhs = self.term()?;
            lhs = fold(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            self.node(pos)?;
            let rhs = self.unary()?;
            lhs = fold(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        let pos = self.peek().pos;
        match self.peek().tok {
            Tok::Op('-') => {
                self.bump();
                self.enter(pos)?;
                self.node(pos)?;
                let inner = self.unary()?;
                self.depth -= 1;
                Ok(match inner {
                    Expr::Const(c) => Expr::Const(-c),
                    other => Expr::Neg(Box::new(other)),
                })
            }
            Tok::Op('+') => {
                self.bump();
                self.enter(pos)?;
                let inner = self.unary()?;
                self.depth -= 1;
                Ok(inner)
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        let pos = self.bump().pos;
        self.enter(pos)?;
        self.node(pos)?;
        let exponent = self.unary()?;
        self.depth -= 1;
        match exponent {
            Expr::Const(p) if p.im == 0.0 && p.re.is_finite() => {
                Ok(fold(BinOp::Pow, base, Expr::Const(p)))
            }
            _ => Err(syntax(
                pos,
                "exponent must be a real integer or rational constant",
            )),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let Token { tok, pos } = self.bump();
        self.node(pos)?;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(Complex64::new(v, 0.0))),
            Tok::Imag(v) => Ok(Expr::Const(Complex64::new(0.0, v))),
            Tok::LParen => {
                self.enter(pos)?;
                let e = self.expr()?;
                self.depth -= 1;
                self.expect_rparen(pos)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(Expr::Var),
                "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                _ => {
                    if self.peek().tok != Tok::LParen {
                        return Err(syntax(pos, format!("unknown identifier `{name}`")));
                    }
                    let func = Func::from_name(&name).ok_or(ExprError::UnknownFunction {
                        name,
                        position: pos,
                    })?;
                    let open = self.bump().pos;
                    self.enter(open)?;
                    let arg = self.expr()?;
                    self.depth -= 1;
                    self.expect_rparen(open)?;
                    Ok(Expr::call(func, arg))
                }
            },
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            Tok::RParen => Err(syntax(pos, "unexpected `)`")),
            Tok::Op(c) => Err(syntax(pos, format!("unexpected operator `{c}`"))),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ExprError> {
        let t = self.bump();
        match t.tok {
            Tok::RParen => Ok(()),
            Tok::End => Err(syntax(
                t.pos,
                format!("unclosed `(` opened at position {open}"),
            )),
            _ => Err(syntax(t.pos, "expected `)`")),
        }
    }
}

/// Parses an infix expression in `z`.
///
/// Precedence from tightest: `^` (right associative), unary minus, `*` `/`,
/// `+` `-`. Numeric literals may carry an `i` suffix (`3i`, `2.5i`); the bare
/// identifier `i` is the imaginary unit. Constant subexpressions built from
/// `+ - * /` are folded, so `2+3i` is a single literal.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        at: 0,
        depth: 0,
        nodes: 0,
    };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.pos, "unexpected trailing input"));
    }
    Ok(e)
}
