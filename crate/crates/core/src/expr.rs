//! Expressions in the single variable `t`.
//!
//! Grammar (whitespace is ignored, ASCII only):
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | power
//! power    := atom ("^" exponent)?
//! exponent := "-"? (number | "(" constant-expr ")") ("^" exponent)?
//! atom     := number | "t" | ident "(" expr ")" | "(" expr ")"
//! ident    := "sin" | "cos" | "exp"
//! ```
//!
//! Exponents must be constants, so `-t^2` is `-(t^2)` and `t^3^2` is `t^9`.

use std::fmt;

use crate::error::{Error, Result};

/// Highest derivative order [`Expr::derivative`] accepts.
pub const MAX_DERIVATIVE_ORDER: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a constant exponent.
    Pow(Box<Expr>, f64),
    Neg(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        Parser::new(src)?.parse_all()
    }

    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    /// Evaluates at `t`. Division by zero and fractional powers of negative
    /// bases are errors rather than infinities or NaN.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => t,
            Expr::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Expr::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Expr::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Expr::Div(a, b) => {
                let den = b.eval(t)?;
                if den == 0.0 {
                    return Err(Error::Eval(format!("division by zero at t = {t}")));
                }
                a.eval(t)? / den
            }
            Expr::Pow(base, p) => pow(base.eval(t)?, *p, t)?,
            Expr::Neg(a) => -a.eval(t)?,
            Expr::Sin(a) => a.eval(t)?.sin(),
            Expr::Cos(a) => a.eval(t)?.cos(),
            Expr::Exp(a) => a.eval(t)?.exp(),
        })
    }

    /// True when the expression does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                a.is_constant()
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                1 + a.size()
            }
        }
    }

    /// The `order`-th derivative with respect to `t`, simplified after each pass.
    pub fn derivative(&self, order: u32) -> Result<Expr> {
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeCap(order));
        }
        let mut out = self.clone();
        for _ in 0..order {
            out = simplify(d(&out));
        }
        Ok(out)
    }

    /// All derivatives `0..=max_order`, sharing the intermediate passes.
    pub fn derivatives(&self, max_order: u32) -> Result<Vec<Expr>> {
        if max_order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeCap(max_order));
        }
        let mut out = Vec::with_capacity(max_order as usize + 1);
        out.push(self.clone());
        for k in 0..max_order as usize {
            let next = simplify(d(&out[k]));
            out.push(next);
        }
        Ok(out)
    }

    /// Constant folding plus the identities `0*x`, `1*x`, `x+0`, `x-0`,
    /// `x/1`, `x^1` and `x^0`.
    pub fn simplified(&self) -> Expr {
        simplify(self.clone())
    }
}

fn pow(base: f64, p: f64, t: f64) -> Result<f64> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        if base == 0.0 && p < 0.0 {
            return Err(Error::Eval(format!("division by zero in power at t = {t}")));
        }
        return Ok(base.powi(p as i32));
    }
    if base < 0.0 {
        return Err(Error::Eval(format!(
            "negative base {base} raised to non-integer power {p} at t = {t}"
        )));
    }
    if base == 0.0 {
        if p < 0.0 {
            return Err(Error::Eval(format!("division by zero in power at t = {t}")));
        }
        return Ok(0.0);
    }
    Ok(base.powf(p))
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// One unsimplified differentiation pass.
fn d(e: &Expr) -> Expr {
    use Expr::*;
    match e {
        Const(_) => Const(0.0),
        Var => Const(1.0),
        Add(a, b) => Add(bx(d(a)), bx(d(b))),
        Sub(a, b) => Sub(bx(d(a)), bx(d(b))),
        Mul(a, b) => Add(
            bx(Mul(bx(d(a)), b.clone())),
            bx(Mul(a.clone(), bx(d(b)))),
        ),
        Div(a, b) => Div(
            bx(Sub(
                bx(Mul(bx(d(a)), b.clone())),
                bx(Mul(a.clone(), bx(d(b)))),
            )),
            bx(Pow(b.clone(), 2.0)),
        ),
        Pow(a, p) => Mul(
            bx(Mul(bx(Const(*p)), bx(Pow(a.clone(), p - 1.0)))),
            bx(d(a)),
        ),
        Neg(a) => Neg(bx(d(a))),
        Sin(a) => Mul(bx(Cos(a.clone())), bx(d(a))),
        Cos(a) => Neg(bx(Mul(bx(Sin(a.clone())), bx(d(a))))),
        Exp(a) => Mul(bx(Exp(a.clone())), bx(d(a))),
    }
}

fn simplify(e: Expr) -> Expr {
    use Expr::*;
    match e {
        Const(_) | Var => e,
        Add(a, b) => match (simplify(*a), simplify(*b)) {
            (Const(x), Const(y)) => Const(x + y),
            (Const(z), other) | (other, Const(z)) if z == 0.0 => other,
            (x, y) => Add(bx(x), bx(y)),
        },
        Sub(a, b) => match (simplify(*a), simplify(*b)) {
            (Const(x), Const(y)) => Const(x - y),
            (x, Const(z)) if z == 0.0 => x,
            (Const(z), y) if z == 0.0 => simplify(Neg(bx(y))),
            (x, y) => Sub(bx(x), bx(y)),
        },
        Mul(a, b) => match (simplify(*a), simplify(*b)) {
            (Const(x), Const(y)) => Const(x * y),
            (Const(z), _) | (_, Const(z)) if z == 0.0 => Const(0.0),
            (Const(o), other) | (other, Const(o)) if o == 1.0 => other,
            (Const(x), Mul(inner_a, inner_b)) if matches!(*inner_a, Const(_)) => {
                let Const(y) = *inner_a else { unreachable!() };
                Mul(bx(Const(x * y)), inner_b)
            }
            (x, y) => Mul(bx(x), bx(y)),
        },
        Div(a, b) => match (simplify(*a), simplify(*b)) {
            (Const(x), Const(y)) if y != 0.0 => Const(x / y),
            (x, Const(o)) if o == 1.0 => x,
            (Const(z), y) if z == 0.0 => {
                let _ = y;
                Const(0.0)
            }
            (x, y) => Div(bx(x), bx(y)),
        },
        Pow(a, p) => {
            if p == 0.0 {
                return Const(1.0);
            }
            match simplify(*a) {
                x if p == 1.0 => x,
                Const(x) => match pow(x, p, f64::NAN) {
                    Ok(v) => Const(v),
                    Err(_) => Pow(bx(Const(x)), p),
                },
                Pow(inner, q) if (p.fract() == 0.0 && q.fract() == 0.0) => {
                    simplify(Pow(inner, p * q))
                }
                x => Pow(bx(x), p),
            }
        }
        Neg(a) => match simplify(*a) {
            Const(x) => Const(-x),
            Neg(inner) => *inner,
            x => Neg(bx(x)),
        },
        Sin(a) => match simplify(*a) {
            Const(x) => Const(x.sin()),
            x => Sin(bx(x)),
        },
        Cos(a) => match simplify(*a) {
            Const(x) => Const(x.cos()),
            x => Cos(bx(x)),
        },
        Exp(a) => match simplify(*a) {
            Const(x) => Const(x.exp()),
            x => Exp(bx(x)),
        },
    }
}

// ---------------------------------------------------------------------------
// Printing

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Const(c) if *c < 0.0 => 3,
        _ => 5,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    // `{:?}` is the shortest round-trip representation and uses `e` notation
    // for very large or small magnitudes, both accepted by the parser.
    if v < 0.0 {
        write!(f, "-{:?}", -v)
    } else {
        write!(f, "{v:?}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_number(f, *c),
            Expr::Var => f.write_str("t"),
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("*")?;
                write_operand(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("/")?;
                write_operand(f, b, 3)
            }
            Expr::Pow(a, p) => {
                write_operand(f, a, 5)?;
                f.write_str("^")?;
                if *p < 0.0 {
                    f.write_str("(")?;
                    write_number(f, *p)?;
                    f.write_str(")")
                } else {
                    write_number(f, *p)
                }
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
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
                let text = &src[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number '{text}'")))?;
                out.push((start, Tok::Num(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(syntax(
                    start,
                    format!("unexpected character '{}'", src[start..].chars().next().unwrap()),
                ))
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn parse_all(&mut self) -> Result<Expr> {
        let e = self.expr()?;
        if *self.peek() != Tok::End {
            return Err(syntax(
                self.offset(),
                format!("expected operator or end of input, found {}", self.peek().describe()),
            ));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(bx(lhs), bx(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(bx(lhs), bx(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(bx(lhs), bx(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(bx(lhs), bx(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(bx(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let p = self.exponent()?;
            return Ok(Expr::Pow(bx(base), p));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<f64> {
        let start = self.offset();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let value = match self.bump() {
            Tok::Num(v) => v,
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                if !inner.is_constant() {
                    return Err(syntax(start, "non-constant exponent"));
                }
                inner
                    .eval(0.0)
                    .map_err(|e| syntax(start, format!("invalid exponent: {e}")))?
            }
            Tok::Ident(name) if name == "t" => {
                return Err(syntax(start, "non-constant exponent"));
            }
            other => {
                return Err(syntax(
                    start,
                    format!("expected constant exponent, found {}", other.describe()),
                ))
            }
        };
        let mut value = if negative { -value } else { value };
        if *self.peek() == Tok::Caret {
            self.bump();
            let rest = self.exponent()?;
            value = value.powf(rest);
        }
        if !value.is_finite() {
            return Err(syntax(start, "exponent is not finite"));
        }
        Ok(value)
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var),
                "sin" | "cos" | "exp" => {
                    self.expect(Tok::LParen)?;
                    let arg = bx(self.expr()?);
                    self.expect(Tok::RParen)?;
                    Ok(match name.as_str() {
                        "sin" => Expr::Sin(arg),
                        "cos" => Expr::Cos(arg),
                        _ => Expr::Exp(arg),
                    })
                }
                _ => Err(syntax(
                    start,
                    format!("unknown identifier '{name}', expected t, sin, cos or exp"),
                )),
            },
            other => Err(syntax(
                start,
                format!("expected number, 't', function or '(', found {}", other.describe()),
            )),
        }
    }
}
