use std::collections::HashMap;
use std::fmt;

use super::ast::{Env, Expr, ExprKind, Number};
use super::error::{ParseError, ParseErrorKind, Pos};
use super::lexer::{tokenize, Tok, Token};
use crate::grading::Grading;
use crate::poly::{Mode, Scalar, VectorField};

pub(crate) struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            at: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(
            ParseErrorKind::Syntax,
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    pub fn expect(&mut self, t: &Tok, wanted: &str) -> Result<Token, ParseError> {
        if self.peek() == t {
            Ok(self.bump())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    pub fn skip_newlines(&mut self) {
        while self.eat(&Tok::Newline) {}
    }

    pub fn end_of_statement(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("end of line")),
        }
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            let kind: fn(Box<Expr>, Box<Expr>) -> ExprKind = match self.peek() {
                Tok::Plus => ExprKind::Add,
                Tok::Minus => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::new(kind(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let kind: fn(Box<Expr>, Box<Expr>) -> ExprKind = match self.peek() {
                Tok::Star => ExprKind::Mul,
                Tok::Slash => ExprKind::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::new(kind(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    pub fn unary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        if self.eat(&Tok::Minus) {
            let a = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(a)), pos));
        }
        self.power()
    }

    pub fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        let pos = self.pos();
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        match self.bump().tok {
            Tok::Int(k) => {
                let k: u32 = k.try_into().map_err(|_| {
                    ParseError::new(ParseErrorKind::Syntax, pos, "exponent is too large")
                })?;
                Ok(Expr::new(ExprKind::Pow(Box::new(base), k), pos))
            }
            Tok::Minus | Tok::Decimal(_) => Err(ParseError::new(
                ParseErrorKind::NonPolynomial,
                pos,
                "exponents must be nonnegative integers",
            )),
            _ => Err(ParseError::new(
                ParseErrorKind::Syntax,
                pos,
                "expected an integer exponent after `^`",
            )),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::new(ExprKind::Num(Number::Int(i)), pos))
            }
            Tok::Decimal(v) => {
                self.bump();
                Ok(Expr::new(ExprKind::Num(Number::Decimal(v)), pos))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::new(ExprKind::Ident(s), pos))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

/// A parsed system: equations in declaration order, parameters and optional
/// grading directives. Equality is structural and ignores positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub variables: Vec<String>,
    pub equations: Vec<Expr>,
    pub params: Vec<(String, Expr)>,
    pub weights: Option<Vec<u32>>,
    pub degree: Option<u32>,
    pub mode: Mode,
}

impl SystemSpec {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub(crate) fn var_map(&self) -> HashMap<String, usize> {
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect()
    }

    /// Parameter values; later parameters may refer to earlier ones.
    pub fn param_values(&self) -> Result<HashMap<String, Scalar>, ParseError> {
        let empty = HashMap::new();
        let mut vals = HashMap::new();
        for (name, e) in &self.params {
            let env = Env {
                vars: &empty,
                params: &vals,
                nvars: 0,
                mode: self.mode,
            };
            let p = env.eval(e)?;
            vals.insert(name.clone(), p.constant_term());
        }
        Ok(vals)
    }

    /// The instantiated field with parameters substituted.
    pub fn to_vector_field(&self) -> Result<VectorField, ParseError> {
        let params = self.param_values()?;
        let vars = self.var_map();
        let env = Env {
            vars: &vars,
            params: &params,
            nvars: self.dim(),
            mode: self.mode,
        };
        let comps = self
            .equations
            .iter()
            .map(|e| env.eval(e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorField::new(comps).expect("components share one ring"))
    }

    /// Grading from the `weights` and `degree` directives, when both exist.
    pub fn grading(&self) -> Option<Grading> {
        match (&self.weights, self.degree) {
            (Some(w), Some(m)) => Grading::new(w.clone(), m).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.params.is_empty() {
            let items: Vec<String> = self
                .params
                .iter()
                .map(|(n, e)| format!("{n} = {e}"))
                .collect();
            writeln!(f, "params {{ {} }}", items.join(", "))?;
        }
        if let Some(w) = &self.weights {
            let ws: Vec<String> = w.iter().map(|v| v.to_string()).collect();
            writeln!(f, "weights = [{}]", ws.join(", "))?;
        }
        if let Some(m) = self.degree {
            writeln!(f, "degree = {m}")?;
        }
        for (v, e) in self.variables.iter().zip(&self.equations) {
            writeln!(f, "{v}' = {e}")?;
        }
        Ok(())
    }
}

fn directive_err(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::InvalidDirective, pos, msg)
}

fn small_uint(p: &mut Parser, what: &str) -> Result<u32, ParseError> {
    let pos = p.pos();
    match p.bump().tok {
        Tok::Int(i) => i
            .try_into()
            .map_err(|_| directive_err(pos, format!("{what} is out of range"))),
        _ => Err(directive_err(
            pos,
            format!("{what} must be a nonnegative integer"),
        )),
    }
}

/// Parses an exact system.
pub fn parse_system(src: &str) -> Result<SystemSpec, ParseError> {
    parse_system_with(src, Mode::Exact)
}

/// Parses a system in the given arithmetic mode. Decimal literals are only
/// accepted in float mode.
pub fn parse_system_with(src: &str, mode: Mode) -> Result<SystemSpec, ParseError> {
    let mut p = Parser::new(src)?;
    let mut variables: Vec<String> = Vec::new();
    let mut equations = Vec::new();
    let mut params: Vec<(String, Expr)> = Vec::new();
    let mut params_seen = false;
    let mut weights: Option<(Vec<u32>, Pos)> = None;
    let mut degree = None;
    loop {
        p.skip_newlines();
        let pos = p.pos();
        let name = match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(s) => s,
            _ => return Err(p.unexpected("an equation or directive")),
        };
        if p.peek_at(1) == &Tok::Prime {
            p.bump();
            p.bump();
            p.expect(&Tok::Eq, "`=`")?;
            let e = p.expr()?;
            p.end_of_statement()?;
            if variables.contains(&name) {
                return Err(ParseError::new(
                    ParseErrorKind::DuplicateEquation,
                    pos,
                    format!("second equation for `{name}`"),
                ));
            }
            variables.push(name);
            equations.push(e);
            continue;
        }
        match name.as_str() {
            "params" => {
                if params_seen {
                    return Err(directive_err(pos, "more than one params block"));
                }
                params_seen = true;
                p.bump();
                p.expect(&Tok::LBrace, "`{`")?;
                while !p.eat(&Tok::RBrace) {
                    let ppos = p.pos();
                    let pname = match p.bump().tok {
                        Tok::Ident(s) => s,
                        _ => {
                            return Err(ParseError::new(
                                ParseErrorKind::Syntax,
                                ppos,
                                "expected a parameter name",
                            ))
                        }
                    };
                    p.expect(&Tok::Eq, "`=`")?;
                    let e = p.expr()?;
                    if params.iter().any(|(n, _)| *n == pname) {
                        return Err(directive_err(
                            ppos,
                            format!("parameter `{pname}` set twice"),
                        ));
                    }
                    params.push((pname, e));
                    p.eat(&Tok::Comma);
                }
                p.end_of_statement()?;
            }
            "weights" => {
                p.bump();
                if weights.is_some() {
                    return Err(directive_err(pos, "weights given twice"));
                }
                p.expect(&Tok::Eq, "`=`")?;
                p.expect(&Tok::LBracket, "`[`")?;
                let mut w = Vec::new();
                while !p.eat(&Tok::RBracket) {
                    w.push(small_uint(&mut p, "a weight")?);
                    if !p.eat(&Tok::Comma) {
                        p.expect(&Tok::RBracket, "`,` or `]`")?;
                        break;
                    }
                }
                p.end_of_statement()?;
                weights = Some((w, pos));
            }
            "degree" => {
                p.bump();
                if degree.is_some() {
                    return Err(directive_err(pos, "degree given twice"));
                }
                p.expect(&Tok::Eq, "`=`")?;
                degree = Some((small_uint(&mut p, "the degree")?, pos));
                p.end_of_statement()?;
            }
            _ => {
                p.bump();
                return Err(p.unexpected("`'` after the variable name"));
            }
        }
    }
    if variables.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::Syntax,
            p.pos(),
            "no equations",
        ));
    }
    if let Some((w, pos)) = &weights {
        if w.len() != variables.len() {
            return Err(directive_err(
                *pos,
                format!("{} weights for {} variables", w.len(), variables.len()),
            ));
        }
    }
    if let Some((m, pos)) = degree {
        if m < 2 {
            return Err(directive_err(pos, "degree must be at least 2"));
        }
    }
    let spec = SystemSpec {
        variables,
        equations,
        params,
        weights: weights.map(|w| w.0),
        degree: degree.map(|d| d.0),
        mode,
    };
    check_names(&spec)?;
    spec.to_vector_field()?;
    Ok(spec)
}

fn check_names(spec: &SystemSpec) -> Result<(), ParseError> {
    let vars = spec.var_map();
    let mut declared: Vec<&str> = Vec::new();
    for (name, e) in &spec.params {
        if vars.contains_key(name) {
            return Err(directive_err(
                e.pos,
                format!("parameter `{name}` shadows a variable"),
            ));
        }
        for (id, pos) in e.identifiers() {
            if !declared.contains(&id.as_str()) {
                return Err(ParseError::new(
                    ParseErrorKind::UndeclaredIdentifier,
                    pos,
                    format!("`{id}` is not an earlier parameter"),
                ));
            }
        }
        declared.push(name);
    }
    for e in &spec.equations {
        for (id, pos) in e.identifiers() {
            if !vars.contains_key(&id) && !declared.contains(&id.as_str()) {
                return Err(ParseError::new(
                    ParseErrorKind::UndeclaredIdentifier,
                    pos,
                    format!("`{id}` is neither a variable nor a parameter"),
                ));
            }
        }
    }
    Ok(())
}
