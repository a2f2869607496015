use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::error::{ParseError, ParseErrorKind, Pos};
use crate::poly::{Mode, Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Int(BigInt),
    /// Only accepted in float mode.
    Decimal(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(Number),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Expression node. Equality ignores source positions.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    /// Operator position for compound nodes, start position otherwise.
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    pub fn int(v: i64) -> Self {
        Expr::new(ExprKind::Num(Number::Int(v.into())), Pos::default())
    }

    pub fn ident(s: &str) -> Self {
        Expr::new(ExprKind::Ident(s.to_string()), Pos::default())
    }

    fn prec(&self) -> u8 {
        match &self.kind {
            ExprKind::Add(..) | ExprKind::Sub(..) => 1,
            ExprKind::Mul(..) | ExprKind::Div(..) => 2,
            ExprKind::Neg(_) => 3,
            ExprKind::Pow(..) => 4,
            ExprKind::Num(_) | ExprKind::Ident(_) => 5,
        }
    }

    /// Identifiers in order of first appearance.
    pub fn identifiers(&self) -> Vec<(String, Pos)> {
        let mut out = Vec::new();
        self.walk_idents(&mut out);
        out
    }

    fn walk_idents(&self, out: &mut Vec<(String, Pos)>) {
        match &self.kind {
            ExprKind::Num(_) => {}
            ExprKind::Ident(s) => out.push((s.clone(), self.pos)),
            ExprKind::Neg(a) | ExprKind::Pow(a, _) => a.walk_idents(out),
            ExprKind::Add(a, b)
            | ExprKind::Sub(a, b)
            | ExprKind::Mul(a, b)
            | ExprKind::Div(a, b) => {
                a.walk_idents(out);
                b.walk_idents(out);
            }
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.prec() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the fewest parentheses that reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Num(Number::Int(i)) => write!(f, "{i}"),
            ExprKind::Num(Number::Decimal(v)) => write!(f, "{v:?}"),
            ExprKind::Ident(s) => f.write_str(s),
            ExprKind::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(if matches!(self.kind, ExprKind::Add(..)) {
                    " + "
                } else {
                    " - "
                })?;
                write_child(f, b, 2)
            }
            ExprKind::Mul(a, b) | ExprKind::Div(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(if matches!(self.kind, ExprKind::Mul(..)) {
                    "*"
                } else {
                    "/"
                })?;
                write_child(f, b, 3)
            }
            ExprKind::Pow(a, e) => {
                write_child(f, a, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

/// Evaluation context: variables map to coordinate indices, parameters to
/// constants.
pub(crate) struct Env<'a> {
    pub vars: &'a HashMap<String, usize>,
    pub params: &'a HashMap<String, Scalar>,
    pub nvars: usize,
    pub mode: Mode,
}

impl Env<'_> {
    pub fn eval(&self, e: &Expr) -> Result<Polynomial, ParseError> {
        let err = |kind, msg: String| ParseError::new(kind, e.pos, msg);
        Ok(match &e.kind {
            ExprKind::Num(Number::Int(i)) => {
                let r = BigRational::from_integer(i.clone());
                Polynomial::constant(self.nvars, Scalar::Exact(r).to_mode(self.mode))
            }
            ExprKind::Num(Number::Decimal(v)) => {
                if self.mode == Mode::Exact {
                    return Err(err(
                        ParseErrorKind::InexactLiteral,
                        format!("decimal literal {v:?} needs float mode"),
                    ));
                }
                Polynomial::constant(self.nvars, Scalar::Float(*v))
            }
            ExprKind::Ident(s) => {
                if let Some(&i) = self.vars.get(s) {
                    Polynomial::var(self.nvars, i, self.mode)
                } else if let Some(c) = self.params.get(s) {
                    Polynomial::constant(self.nvars, c.to_mode(self.mode))
                } else {
                    return Err(err(
                        ParseErrorKind::UndeclaredIdentifier,
                        format!("`{s}` is neither a variable nor a parameter"),
                    ));
                }
            }
            ExprKind::Neg(a) => -&self.eval(a)?,
            ExprKind::Add(a, b) => &self.eval(a)? + &self.eval(b)?,
            ExprKind::Sub(a, b) => &self.eval(a)? - &self.eval(b)?,
            ExprKind::Mul(a, b) => &self.eval(a)? * &self.eval(b)?,
            ExprKind::Div(a, b) => {
                let num = self.eval(a)?;
                let den = self.eval(b)?;
                if !den.is_constant() {
                    return Err(err(
                        ParseErrorKind::NonPolynomial,
                        format!("division by the non-constant `{b}`"),
                    ));
                }
                let c = den.constant_term();
                let inv = Scalar::one(self.mode)
                    .checked_div(&c)
                    .ok_or_else(|| err(ParseErrorKind::DivisionByZero, format!("`{b}` is zero")))?;
                num.scale(&inv).expect("modes agree")
            }
            ExprKind::Pow(a, k) => self.eval(a)?.pow(*k),
        })
    }
}
