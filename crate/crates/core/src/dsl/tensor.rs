//! Tensor literals such as `T = (7/10*z - 1) d/dz` or `x d/dx ⊗ dy`.

use std::collections::HashMap;

use super::ast::{Env, Expr, ExprKind};
use super::error::{ParseError, ParseErrorKind, Pos};
use super::lexer::Tok;
use super::parser::{Parser, SystemSpec};
use crate::poly::{Polynomial, Scalar};
use crate::tensor::{TensorField, TensorType};

enum Factor {
    Upper(usize),
    Lower(usize),
    Scalar(Expr),
    Divisor(Expr),
}

struct TensorParser<'a> {
    p: Parser,
    vars: HashMap<String, usize>,
    params: &'a HashMap<String, Scalar>,
}

impl TensorParser<'_> {
    fn covector_var(&self, s: &str) -> Option<usize> {
        if self.vars.contains_key(s) || self.params.contains_key(s) {
            return None;
        }
        s.strip_prefix('d').and_then(|v| self.vars.get(v).copied())
    }

    fn basis(&mut self) -> Option<Factor> {
        if let Tok::Ident(s) = self.p.peek().clone() {
            if s == "d" && self.p.peek_at(1) == &Tok::Slash {
                if let Tok::Ident(t) = self.p.peek_at(2).clone() {
                    if let Some(&i) = t.strip_prefix('d').and_then(|v| self.vars.get(v)) {
                        self.p.bump();
                        self.p.bump();
                        self.p.bump();
                        return Some(Factor::Upper(i));
                    }
                }
            }
            if let Some(i) = self.covector_var(&s) {
                self.p.bump();
                return Some(Factor::Lower(i));
            }
        }
        None
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        if let Some(b) = self.basis() {
            return Ok(b);
        }
        Ok(Factor::Scalar(self.p.unary()?))
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.p.peek(),
            Tok::Ident(_) | Tok::Int(_) | Tok::Decimal(_) | Tok::LParen
        )
    }

    /// One product term: scalar factors and basis elements joined by `*`,
    /// `⊗` or juxtaposition.
    fn term(&mut self) -> Result<(Vec<Factor>, Pos), ParseError> {
        let pos = self.p.pos();
        let mut fs = vec![self.factor()?];
        loop {
            match self.p.peek() {
                Tok::Star | Tok::Otimes => {
                    self.p.bump();
                    fs.push(self.factor()?);
                }
                Tok::Slash => {
                    self.p.bump();
                    let pos = self.p.pos();
                    match self.factor()? {
                        Factor::Scalar(e) => fs.push(Factor::Divisor(e)),
                        _ => {
                            return Err(ParseError::new(
                                ParseErrorKind::NonPolynomial,
                                pos,
                                "cannot divide by a basis element",
                            ))
                        }
                    }
                }
                _ if self.starts_factor() => fs.push(self.factor()?),
                _ => return Ok((fs, pos)),
            }
        }
    }
}

/// Parses a tensor in the variables and parameters of `system`. Contravariant
/// slots come first in the resulting index tuples, each group in order of
/// appearance.
pub fn parse_tensor(src: &str, system: &SystemSpec) -> Result<TensorField, ParseError> {
    let params = system.param_values()?;
    let mut tp = TensorParser {
        p: Parser::new(src)?,
        vars: system.var_map(),
        params: &params,
    };
    let n = system.dim();
    tp.p.skip_newlines();
    if matches!(tp.p.peek(), Tok::Ident(_)) && tp.p.peek_at(1) == &Tok::Eq {
        tp.p.bump();
        tp.p.bump();
    }
    let vars = system.var_map();
    let env = Env {
        vars: &vars,
        params: &params,
        nvars: n,
        mode: system.mode,
    };
    let mut out: Option<TensorField> = None;
    let mut negate = false;
    if tp.p.eat(&Tok::Minus) {
        negate = true;
    } else {
        tp.p.eat(&Tok::Plus);
    }
    loop {
        let (factors, pos) = tp.term()?;
        let mut coeff = Polynomial::one(n, system.mode);
        let (mut up, mut down) = (Vec::new(), Vec::new());
        for f in factors {
            match f {
                Factor::Upper(i) => up.push(i),
                Factor::Lower(i) => down.push(i),
                Factor::Scalar(e) => coeff = &coeff * &env.eval(&e)?,
                Factor::Divisor(e) => {
                    let quot = Expr::new(
                        ExprKind::Div(Box::new(Expr::int(1)), Box::new(e.clone())),
                        e.pos,
                    );
                    coeff = &coeff * &env.eval(&quot)?;
                }
            }
        }
        if negate {
            coeff = -&coeff;
        }
        let ttype = TensorType::new(up.len(), down.len());
        let t = out.get_or_insert_with(|| TensorField::zero(n, ttype, system.mode));
        if t.ttype() != ttype {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                pos,
                format!("term of type {ttype} in a tensor of type {}", t.ttype()),
            ));
        }
        up.extend(down);
        t.add_component(up, &coeff)
            .expect("indices are declared variables");
        negate = match tp.p.peek() {
            Tok::Plus => false,
            Tok::Minus => true,
            _ => break,
        };
        tp.p.bump();
    }
    tp.p.skip_newlines();
    if tp.p.peek() != &Tok::Eof {
        return Err(tp.p.unexpected("end of input"));
    }
    Ok(out.expect("at least one term"))
}
