use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::monomial::Monomial;
use super::scalar::{Mode, Scalar};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial.
///
/// Terms live in a `BTreeMap` keyed by graded-lex monomial order and zero
/// coefficients are never stored, so two polynomials are equal exactly when
/// their term maps are. The zero polynomial is an empty map; its dimension is
/// always explicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    mode: Mode,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(nvars: usize, mode: Mode) -> Self {
        Polynomial {
            nvars,
            mode,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mode = c.mode();
        let mut p = Self::zero(nvars, mode);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize, mode: Mode) -> Self {
        Self::constant(nvars, Scalar::one(mode))
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nvars: usize, i: usize, mode: Mode) -> Self {
        assert!(
            i < nvars,
            "variable index {i} out of range for dimension {nvars}"
        );
        Self::term(Monomial::var(nvars, i), Scalar::one(mode))
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(m.nvars(), c.mode());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a canonical polynomial, summing repeated monomials.
    pub fn from_terms<I>(nvars: usize, mode: Mode, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut p = Self::zero(nvars, mode);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: m.nvars(),
                });
            }
            if c.mode() != mode {
                return Err(Error::ModeMismatch);
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Accumulates `c * m` in place. Callers guarantee matching mode.
    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.mode))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = Polynomial::zero(self.nvars, self.mode);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Polynomial> {
        if c.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        if c.is_zero() {
            return Ok(Polynomial::zero(self.nvars, self.mode));
        }
        let mut out = Polynomial::zero(self.nvars, self.mode);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars, self.mode);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to `x_i` (0-based).
    pub fn partial(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.nvars,
            });
        }
        let mut out = Polynomial::zero(self.nvars, self.mode);
        for (m, c) in &self.terms {
            if let Some((k, lowered)) = m.lower(i) {
                out.add_term(lowered, c * &Scalar::from_int(k as i64, self.mode));
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mode = self.mode;
        if point.iter().any(|s| s.mode() != mode) {
            return Err(Error::ModeMismatch);
        }
        let mut acc = Scalar::zero(mode);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(m.exponents()) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Double-precision evaluation; the point length must equal `nvars`.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(point)
                    .fold(c.to_f64(), |acc, (&k, &x)| acc * x.powi(k as i32))
            })
            .sum()
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        debug_assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .zip(point)
                    .fold(Complex64::new(c.to_f64(), 0.0), |acc, (&k, x)| {
                        acc * x.powu(k)
                    })
            })
            .sum()
    }

    /// Full composition `p(images[0], ..., images[n-1])`. All images must
    /// share one target dimension and this polynomial's mode.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: images.len(),
            });
        }
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        for img in images {
            if img.nvars != target {
                return Err(Error::DimensionMismatch {
                    expected: target,
                    found: img.nvars,
                });
            }
            if img.mode != self.mode {
                return Err(Error::ModeMismatch);
            }
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|img| vec![Polynomial::one(target, self.mode), img.clone()])
            .collect();
        let mut out = Polynomial::zero(target, self.mode);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &k) in m.exponents().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= k as usize {
                    let next = &cache[cache.len() - 1] * &cache[1];
                    cache.push(next);
                }
                t = &t * &cache[k as usize];
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Replaces the bound variables (0-based) and keeps the rest.
    pub fn substitute(&self, bindings: &BTreeMap<usize, Polynomial>) -> Result<Polynomial> {
        let mut images = Vec::with_capacity(self.nvars);
        for i in 0..self.nvars {
            match bindings.get(&i) {
                Some(p) => {
                    if p.nvars != self.nvars {
                        return Err(Error::DimensionMismatch {
                            expected: self.nvars,
                            found: p.nvars,
                        });
                    }
                    images.push(p.clone())
                }
                None => images.push(Polynomial::var(self.nvars, i, self.mode)),
            }
        }
        if let Some(&bad) = bindings.keys().find(|&&k| k >= self.nvars) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.nvars,
            });
        }
        self.compose(&images)
    }

    /// Terms of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> Polynomial {
        self.filter_terms(|m| m.degree() == k)
    }

    pub fn filter_terms<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            mode: self.mode,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The same polynomial in `nvars + extra` variables.
    pub fn extend_vars(&self, extra: usize) -> Polynomial {
        Polynomial {
            nvars: self.nvars + extra,
            mode: self.mode,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.extend(extra), c.clone()))
                .collect(),
        }
    }

    pub fn to_float(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars, Mode::Float);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), Scalar::Float(c.to_f64()));
        }
        out
    }

    pub fn to_mode(&self, mode: Mode) -> Polynomial {
        match mode {
            Mode::Float => self.to_float(),
            Mode::Exact => {
                assert_eq!(
                    self.mode,
                    Mode::Exact,
                    "cannot convert float polynomial to exact"
                );
                self.clone()
            }
        }
    }

    /// Plain-text rendering with the given variable names, leading term first.
    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.format_with(names);
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

/// Default variable names `x1, ..., xn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&default_names(self.nvars)))
    }
}

// Operator forms panic on dimension or mode mismatch; use the named
// methods for a `Result`.
impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        Polynomial::add(self, rhs).expect("polynomial add")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        Polynomial::sub(self, rhs).expect("polynomial sub")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs).expect("polynomial mul")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            mode: self.mode,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}
