//! Coefficient expressions in one real variable `x`.
//!
//! Grammar (loosest binding first):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          right associative
//! primary := number ['i'] | 'i' | 'x' | 'pi' | func '(' args ')' | '(' expr ')'
//! func    := sin | cos | exp | ln | sqrt | abs | pow
//! ```
//!
//! `-x^2` parses as `-(x^2)` and `2^-1` as `2^(-1)`. A number immediately
//! followed by `i` is an imaginary literal.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("{message} at x = {x}")]
    Domain { x: f64, message: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

/// Parsed expression tree. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Complex64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let mut p = Parser { src: text, pos: 0 };
        p.skip_ws();
        if p.pos >= text.len() {
            return Err(p.error("empty expression"));
        }
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn constant(value: f64) -> Expr {
        Expr::Num(Complex64::new(value, 0.0))
    }

    /// `Some(c)` when the tree contains no `x`.
    pub fn as_constant(&self) -> Option<Complex64> {
        if self.contains_var() {
            None
        } else {
            self.eval(1.0).ok()
        }
    }

    /// Literally zero, i.e. the tree is a zero literal (possibly negated).
    pub fn is_zero(&self) -> bool {
        match self {
            Expr::Num(c) => *c == Complex64::new(0.0, 0.0),
            Expr::Neg(e) => e.is_zero(),
            _ => false,
        }
    }

    fn contains_var(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var => true,
            Expr::Neg(e) => e.contains_var(),
            Expr::Bin(_, a, b) => a.contains_var() || b.contains_var(),
            Expr::Call(_, args) => args.iter().any(Expr::contains_var),
        }
    }

    pub fn eval(&self, x: f64) -> Result<Complex64, ExprError> {
        let v = self.eval_inner(x)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::Domain {
                x,
                message: "non-finite value",
            })
        }
    }

    fn eval_inner(&self, x: f64) -> Result<Complex64, ExprError> {
        let domain = |message| ExprError::Domain { x, message };
        Ok(match self {
            Expr::Num(c) => *c,
            Expr::Var => Complex64::new(x, 0.0),
            Expr::Neg(e) => -e.eval_inner(x)?,
            Expr::Bin(op, a, b) => {
                let a = a.eval_inner(x)?;
                let b = b.eval_inner(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.re == 0.0 && b.im == 0.0 {
                            return Err(domain("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b).ok_or_else(|| domain("zero to a non-positive power"))?,
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval_inner(x)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a.re == 0.0 && a.im == 0.0 {
                            return Err(domain("logarithm of zero"));
                        }
                        if a.im == 0.0 && a.re > 0.0 {
                            Complex64::new(a.re.ln(), 0.0)
                        } else {
                            a.ln()
                        }
                    }
                    Func::Sqrt => {
                        if a.im == 0.0 && a.re >= 0.0 {
                            Complex64::new(a.re.sqrt(), 0.0)
                        } else {
                            a.sqrt()
                        }
                    }
                    Func::Abs => Complex64::new(a.norm(), 0.0),
                    Func::Pow => {
                        let b = args[1].eval_inner(x)?;
                        power(a, b).ok_or_else(|| domain("zero to a non-positive power"))?
                    }
                }
            }
        })
    }
}

/// Principal-branch power with exact paths for real operands.
fn power(base: Complex64, exp: Complex64) -> Option<Complex64> {
    let zero = base.re == 0.0 && base.im == 0.0;
    if exp.im == 0.0 {
        let p = exp.re;
        if zero {
            return if p > 0.0 { Some(Complex64::new(0.0, 0.0)) } else { None };
        }
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            return Some(base.powi(p as i32));
        }
        if base.im == 0.0 && base.re > 0.0 {
            return Some(Complex64::new(base.re.powf(p), 0.0));
        }
        return Some(base.powf(p));
    }
    if zero {
        return if exp.re > 0.0 {
            Some(Complex64::new(0.0, 0.0))
        } else {
            None
        };
    }
    Some(base.powc(exp))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                match name {
                    "x" => Ok(Expr::Var),
                    "i" => Ok(Expr::Num(Complex64::new(0.0, 1.0))),
                    "pi" => Ok(Expr::constant(core::f64::consts::PI)),
                    _ => {
                        let Some(func) = Func::from_name(name) else {
                            return Err(ExprError::UnknownIdentifier {
                                offset: start,
                                name: name.to_string(),
                            });
                        };
                        if !self.eat(b'(') {
                            return Err(self.error("expected `(` after function name"));
                        }
                        let mut args = Vec::with_capacity(func.arity());
                        args.push(self.expr()?);
                        while self.eat(b',') {
                            args.push(self.expr()?);
                        }
                        if !self.eat(b')') {
                            return Err(self.error("expected `)`"));
                        }
                        if args.len() != func.arity() {
                            return Err(ExprError::Syntax {
                                offset: start,
                                message: alloc::format!(
                                    "{} takes {} argument(s), got {}",
                                    func.name(),
                                    func.arity(),
                                    args.len()
                                ),
                            });
                        }
                        Ok(Expr::Call(func, args))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        // exponent only when followed by digits
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mut k = self.pos + 1;
            if matches!(bytes.get(k), Some(b'+' | b'-')) {
                k += 1;
            }
            if matches!(bytes.get(k), Some(c) if c.is_ascii_digit()) {
                self.pos = k;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        let text = &self.src[start..self.pos];
        let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
            offset: start,
            message: alloc::format!("invalid number `{text}`"),
        })?;
        // imaginary suffix, but not the start of an identifier like `in`
        if self.peek() == Some(b'i')
            && !matches!(bytes.get(self.pos + 1), Some(c) if c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
            return Ok(Expr::Num(Complex64::new(0.0, value)));
        }
        Ok(Expr::constant(value))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f, 0)
    }
}

fn expr_precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(op, _, _) => op.precedence(),
        Expr::Neg(_) => 3,
        Expr::Num(c) if c.re < 0.0 || c.im < 0.0 || (c.re != 0.0 && c.im != 0.0) => 0,
        _ => 5,
    }
}

fn write_num(c: &Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match (c.re, c.im) {
        (re, im) if im == 0.0 && re >= 0.0 => write!(f, "{re:?}"),
        (re, im) if re == 0.0 && im > 0.0 => {
            if im == 1.0 {
                f.write_str("i")
            } else {
                write!(f, "{im:?}i")
            }
        }
        (re, im) => write!(f, "({re:?}{:+?}i)", im),
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
    let prec = expr_precedence(e);
    let paren = prec < min_prec;
    if paren {
        f.write_str("(")?;
    }
    match e {
        Expr::Num(c) => write_num(c, f)?,
        Expr::Var => f.write_str("x")?,
        Expr::Neg(inner) => {
            f.write_str("-")?;
            write_expr(inner, f, 3)?;
        }
        Expr::Bin(op, a, b) => {
            let p = op.precedence();
            if *op == BinOp::Pow {
                // base binds tighter than unary minus; exponent is a unary
                write_expr(a, f, 5)?;
                f.write_str("^")?;
                write_expr(b, f, 3)?;
            } else {
                write_expr(a, f, p)?;
                write!(f, "{}", op.symbol())?;
                write_expr(b, f, p + 1)?;
            }
        }
        Expr::Call(func, args) => {
            write!(f, "{}(", func.name())?;
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write_expr(a, f, 0)?;
            }
            f.write_str(")")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}
