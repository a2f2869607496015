//! Eigenvalues of small square matrices, exact where the characteristic
//! polynomial has rational roots and floating (complex) otherwise.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{format_rational, rational_to_f64, Scalar};

/// Magnitude above which divisor search gives way to rationalized float roots.
const DIVISOR_SEARCH_LIMIT: u64 = 1_000_000_000_000;

/// One eigenvalue: exact rational or a float approximation.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    Exact(BigRational),
    Approx(Complex64),
}

impl Exponent {
    pub fn from_int(v: i64) -> Self {
        Exponent::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Exponent::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Exponent::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Exponent::Exact(r) => Some(r),
            Exponent::Approx(_) => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Exponent::Exact(r) => Complex64::new(rational_to_f64(r), 0.0),
            Exponent::Approx(z) => *z,
        }
    }

    pub fn re(&self) -> f64 {
        self.to_complex().re
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Exponent::Exact(r) => r.is_zero(),
            Exponent::Approx(z) => *z == Complex64::new(0.0, 0.0),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Exact(r) => f.write_str(&format_rational(r)),
            Exponent::Approx(z) if z.im == 0.0 => write!(f, "{:?}", z.re),
            Exponent::Approx(z) => write!(f, "{:?}{:+?}i", z.re, z.im),
        }
    }
}

/// Dense univariate polynomial over Q, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly(pub Vec<BigRational>);

impl UniPoly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn constant(c: BigRational) -> Self {
        UniPoly(vec![c]).trim()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly(out).trim()
    }

    fn sub(&self, other: &UniPoly) -> UniPoly {
        let len = self.0.len().max(other.0.len());
        let out = (0..len)
            .map(|i| {
                let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                let b = other.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                a - b
            })
            .collect();
        UniPoly(out).trim()
    }

    /// Quotient and remainder.
    fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.0[dd].clone();
        let mut rem = self.0.clone();
        let mut quot = vec![BigRational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            let shift = top - dd;
            for (i, dc) in d.0.iter().enumerate() {
                rem[shift + i] -= &c * dc;
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (UniPoly(quot).trim(), UniPoly(rem).trim())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

/// `det(lambda I - A)` by fraction-free (Bareiss) elimination over `Q[lambda]`.
pub fn charpoly_exact(a: &[Vec<BigRational>]) -> UniPoly {
    let n = a.len();
    let mut m: Vec<Vec<UniPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut c = vec![-a[i][j].clone()];
                    if i == j {
                        c.push(BigRational::one());
                    }
                    UniPoly(c).trim()
                })
                .collect()
        })
        .collect();
    let mut prev = UniPoly::constant(BigRational::one());
    let mut sign = BigRational::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(sel) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return UniPoly(Vec::new());
            };
            m.swap(k, sel);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        return UniPoly::constant(BigRational::one());
    }
    let det = m[n - 1][n - 1].clone();
    UniPoly(det.0.into_iter().map(|c| c * &sign).collect())
}

fn divisors(v: &BigInt) -> Option<Vec<BigInt>> {
    let v = v.abs().to_u64()?;
    if v > DIVISOR_SEARCH_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Rational roots with multiplicity, and the leftover factor.
fn rational_roots(p: &UniPoly) -> (Vec<BigRational>, UniPoly) {
    let mut roots = Vec::new();
    let mut rest = p.clone();
    // zero roots first
    while rest.0.len() > 1 && rest.0[0].is_zero() {
        roots.push(BigRational::zero());
        rest.0.remove(0);
    }
    if rest.degree().unwrap_or(0) == 0 {
        return (roots, rest);
    }
    let lcm = rest
        .0
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = rest
        .0
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let candidates: Vec<BigRational> =
        match (divisors(&ints[0]), divisors(ints.last().expect("nonempty"))) {
            (Some(ps), Some(qs)) => {
                let mut c = Vec::new();
                for pn in &ps {
                    for qd in &qs {
                        let r = BigRational::new(pn.clone(), qd.clone());
                        c.push(r.clone());
                        c.push(-r);
                    }
                }
                c.sort();
                c.dedup();
                c
            }
            _ => float_root_guesses(&rest),
        };
    for r in candidates {
        loop {
            if rest.degree().unwrap_or(0) == 0 || !rest.eval(&r).is_zero() {
                break;
            }
            let lin = UniPoly(vec![-r.clone(), BigRational::one()]);
            rest = rest.div_rem(&lin).0;
            roots.push(r.clone());
        }
    }
    (roots, rest)
}

fn float_root_guesses(p: &UniPoly) -> Vec<BigRational> {
    companion_roots(p)
        .into_iter()
        .filter(|z| z.im.abs() < 1e-9)
        .filter_map(|z| rationalize(z.re, 1_000_000))
        .collect()
}

fn companion_roots(p: &UniPoly) -> Vec<Complex64> {
    let Some(d) = p.degree() else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let lead = rational_to_f64(&p.0[d]);
    let mut c = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        c[(i, d - 1)] = -rational_to_f64(&p.0[i]) / lead;
    }
    c.complex_eigenvalues().iter().copied().collect()
}

/// Best continued-fraction approximation of `x` with denominator at most
/// `max_den`, if within `1e-9` relative error.
pub fn rationalize(x: f64, max_den: u64) -> Option<BigRational> {
    rationalize_within(x, max_den, 1e-9)
}

/// As [`rationalize`] with an explicit relative tolerance.
pub fn rationalize_within(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= 1e-12 * x.abs().max(1.0) {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = v - a;
        if frac.abs() < 1e-300 {
            break;
        }
        v = 1.0 / frac;
    }
    (k1 != 0 && (h1 as f64 / k1 as f64 - x).abs() <= tol * x.abs().max(1.0))
        .then(|| BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Spectrum of a square matrix. Exact entries give exact rational
/// eigenvalues where possible; the remaining factor (and any float matrix)
/// gives approximate complex eigenvalues.
pub fn eigenvalues(a: &[Vec<Scalar>]) -> Vec<Exponent> {
    let exact: Option<Vec<Vec<BigRational>>> = a
        .iter()
        .map(|r| r.iter().map(|s| s.as_exact().cloned()).collect())
        .collect();
    let mut out = match exact {
        Some(q) => {
            let cp = charpoly_exact(&q);
            let (roots, rest) = rational_roots(&cp);
            let mut v: Vec<Exponent> = roots.into_iter().map(Exponent::Exact).collect();
            v.extend(companion_roots(&rest).into_iter().map(Exponent::Approx));
            v
        }
        None => {
            let n = a.len();
            let m = DMatrix::from_fn(n, n, |i, j| a[i][j].to_f64());
            m.complex_eigenvalues()
                .iter()
                .map(|z| Exponent::Approx(*z))
                .collect()
        }
    };
    sort_spectrum(&mut out);
    out
}

/// Real part descending, then imaginary part ascending.
pub fn sort_spectrum(v: &mut [Exponent]) {
    v.sort_by(|a, b| match (a, b) {
        (Exponent::Exact(x), Exponent::Exact(y)) => y.cmp(x),
        _ => {
            let (za, zb) = (a.to_complex(), b.to_complex());
            zb.re
                .partial_cmp(&za.re)
                .unwrap_or(Ordering::Equal)
                .then(za.im.partial_cmp(&zb.im).unwrap_or(Ordering::Equal))
        }
    });
}
