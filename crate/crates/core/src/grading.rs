//! Quasi-homogeneous gradings: weighted degrees, weight discovery and the
//! semi-quasihomogeneous split of a vector field into a cut and remainder.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, VectorField};
use crate::tensor::TensorField;

pub const DEFAULT_S_MAX: u32 = 4;
pub const DEFAULT_M_MAX: u32 = 5;

/// Weights `s_1..s_n` and degree `m > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Grading {
    pub weights: Vec<u32>,
    pub degree: u32,
}

impl Grading {
    pub fn new(weights: Vec<u32>, degree: u32) -> Result<Self> {
        if weights.iter().all(|&s| s == 0) {
            return Err(Error::InvalidGrading("all weights are zero".into()));
        }
        if degree < 2 {
            return Err(Error::InvalidGrading(format!(
                "degree must exceed 1, got {degree}"
            )));
        }
        Ok(Grading { weights, degree })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `alpha = 1/(m-1)`.
    pub fn alpha(&self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(self.degree - 1))
    }

    /// Diagonal of `H = alpha S`.
    pub fn h(&self) -> Vec<BigRational> {
        let a = self.alpha();
        self.weights
            .iter()
            .map(|&s| &a * BigRational::from_integer(BigInt::from(s)))
            .collect()
    }

    /// True when `gcd(s_1, .., s_n, m-1) = 1`, the representative kept by
    /// [`find_weights`].
    pub fn is_canonical(&self) -> bool {
        let g = self
            .weights
            .iter()
            .fold(self.degree - 1, |acc, &s| acc.gcd(&s));
        g == 1
    }

    /// Field degree of a monomial of weight `w` in component `j`.
    pub fn field_degree(&self, j: usize, w: i64) -> i64 {
        w - self.weights[j] as i64 + 1
    }
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.weights.iter().map(u32::to_string).collect();
        write!(f, "s=({}), m={}", s.join(","), self.degree)
    }
}

/// Whether the remainder sits above or below the cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Pure,
    Positive,
    Negative,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Pure => "pure",
            Sign::Positive => "positive",
            Sign::Negative => "negative",
        })
    }
}

/// `F = g_m + sum of rest`, with every rest slice on one side of `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiQhDecomposition {
    pub grading: Grading,
    pub cut: VectorField,
    pub rest: Vec<(i64, VectorField)>,
    pub sign: Sign,
}

impl SemiQhDecomposition {
    pub fn reconstruct(&self) -> VectorField {
        self.rest.iter().fold(self.cut.clone(), |acc, (_, v)| {
            acc.add(v).expect("same shape")
        })
    }
}

/// A grading found by [`find_weights`] together with the cut size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradingMatch {
    #[serde(flatten)]
    pub grading: Grading,
    pub sign: Sign,
    pub cut_terms: usize,
}

/// `{ sum_i s_i k_i }` over the monomials of `p`.
pub fn weighted_degree(p: &Polynomial, weights: &[u32]) -> BTreeSet<i64> {
    p.terms().map(|(m, _)| m.weighted_degree(weights)).collect()
}

/// Splits `f` into slices of equal field degree `w - s_j + 1`.
pub fn field_slices(f: &VectorField, weights: &[u32]) -> Result<BTreeMap<i64, VectorField>> {
    let n = f.dim();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    let mut parts: BTreeMap<i64, Vec<Polynomial>> = BTreeMap::new();
    for (j, comp) in f.components().iter().enumerate() {
        for (m, c) in comp.terms() {
            let d = m.weighted_degree(weights) - weights[j] as i64 + 1;
            let slot = parts
                .entry(d)
                .or_insert_with(|| vec![Polynomial::zero(n, f.mode()); n]);
            slot[j].add_term(m.clone(), c.clone());
        }
    }
    parts
        .into_iter()
        .map(|(d, comps)| Ok((d, VectorField::new(comps)?)))
        .collect()
}

/// Every monomial of `F^j` has weight `s_j + m - 1`.
pub fn check_quasihomogeneous(f: &VectorField, g: &Grading) -> bool {
    match field_slices(f, &g.weights) {
        Ok(slices) => slices.keys().all(|&d| d == g.degree as i64),
        Err(_) => false,
    }
}

pub fn decompose(f: &VectorField, g: &Grading) -> Result<SemiQhDecomposition> {
    let mut slices = field_slices(f, &g.weights)?;
    let m = g.degree as i64;
    let cut = slices
        .remove(&m)
        .ok_or_else(|| Error::NotSemiQuasihomogeneous(format!("no terms of degree {m} for {g}")))?;
    let sign = if slices.is_empty() {
        Sign::Pure
    } else if slices.keys().all(|&d| d > m) {
        Sign::Positive
    } else if slices.keys().all(|&d| d < m) {
        Sign::Negative
    } else {
        let ds: Vec<String> = slices.keys().map(i64::to_string).collect();
        return Err(Error::NotSemiQuasihomogeneous(format!(
            "slices at degrees {} straddle the cut degree {m} for {g}",
            ds.join(", ")
        )));
    };
    Ok(SemiQhDecomposition {
        grading: g.clone(),
        cut,
        rest: slices.into_iter().collect(),
        sign,
    })
}

/// Searches `0 <= s_i <= s_max`, `2 <= m <= m_max` for gradings under which
/// `f` is quasi-homogeneous or semi-quasihomogeneous with a nonzero cut.
/// Only canonical representatives (`gcd(s, m-1) = 1`) are kept. Results are
/// ordered pure first, then by cut size (largest first), then by `(s, m)`.
pub fn find_weights(f: &VectorField, s_max: u32, m_max: u32) -> Vec<GradingMatch> {
    let n = f.dim();
    if n == 0 || m_max < 2 {
        return Vec::new();
    }
    let per_axis = s_max as usize + 1;
    let total = per_axis.pow(n as u32);
    let mut found: Vec<GradingMatch> = (1..total)
        .into_par_iter()
        .flat_map_iter(|code| {
            let mut weights = vec![0u32; n];
            let mut c = code;
            for w in weights.iter_mut().rev() {
                *w = (c % per_axis) as u32;
                c /= per_axis;
            }
            (2..=m_max).filter_map(move |m| {
                let g = Grading::new(weights.clone(), m).ok()?;
                if !g.is_canonical() {
                    return None;
                }
                let d = decompose(f, &g).ok()?;
                let cut_terms = d.cut.components().iter().map(Polynomial::num_terms).sum();
                Some(GradingMatch {
                    grading: g,
                    sign: d.sign,
                    cut_terms,
                })
            })
        })
        .collect();
    found.sort_by(|a, b| {
        (a.sign != Sign::Pure)
            .cmp(&(b.sign != Sign::Pure))
            .then(b.cut_terms.cmp(&a.cut_terms))
            .then(a.grading.cmp(&b.grading))
    });
    found
}

/// `l = w + sum s_J - sum s_I` for every term of every component.
pub fn tensor_weighted_degree(t: &TensorField, weights: &[u32]) -> BTreeSet<i64> {
    tensor_slices(t, weights).into_keys().collect()
}

/// Splits `t` into its quasi-homogeneous parts by tensor degree.
pub fn tensor_slices(t: &TensorField, weights: &[u32]) -> BTreeMap<i64, TensorField> {
    let p = t.ttype().p;
    let mut out: BTreeMap<i64, TensorField> = BTreeMap::new();
    for (idx, comp) in t.components() {
        let shift = index_shift(idx, p, weights);
        for (m, c) in comp.terms() {
            let l = m.weighted_degree(weights) + shift;
            let slice = out
                .entry(l)
                .or_insert_with(|| TensorField::zero(t.dim(), t.ttype(), t.mode()));
            slice
                .add_component(idx.clone(), &Polynomial::term(m.clone(), c.clone()))
                .expect("same shape");
        }
    }
    out
}

/// `sum s_J - sum s_I` for an index tuple with `p` upper indices.
pub fn index_shift(idx: &[usize], p: usize, weights: &[u32]) -> i64 {
    let up: i64 = idx[..p].iter().map(|&i| weights[i] as i64).sum();
    let down: i64 = idx[p..].iter().map(|&j| weights[j] as i64).sum();
    down - up
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Mode, Scalar};

    fn var(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i, Mode::Exact)
    }

    #[test]
    fn weighted_degree_examples() {
        let p = &var(3, 0) * &var(3, 2);
        assert_eq!(weighted_degree(&p, &[1, 1, 0]), BTreeSet::from([1]));
        assert!(weighted_degree(&Polynomial::zero(2, Mode::Exact), &[1, 1]).is_empty());
        let q = &var(2, 0).pow(2) + &var(2, 1);
        assert_eq!(weighted_degree(&q, &[1, 2]), BTreeSet::from([2]));
    }

    #[test]
    fn linear_field_is_not_quasihomogeneous() {
        let f = VectorField::new(vec![var(1, 0)]).unwrap();
        assert!(!check_quasihomogeneous(
            &f,
            &Grading::new(vec![1], 2).unwrap()
        ));
        assert!(find_weights(&f, 4, 5).iter().all(|g| g.sign != Sign::Pure));
    }

    #[test]
    fn straddling_slices_are_rejected() {
        // x' = x + x^3 has slices at degrees 1 and 3 around m = 2
        let x = var(1, 0);
        let f = VectorField::new(vec![&(&x + &x.pow(3)) + &x.pow(2)]).unwrap();
        let err = decompose(&f, &Grading::new(vec![1], 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotSemiQuasihomogeneous(_)));
    }

    #[test]
    fn invalid_gradings() {
        assert!(Grading::new(vec![0, 0], 2).is_err());
        assert!(Grading::new(vec![1], 1).is_err());
        assert!(!Grading::new(vec![2, 2], 3).unwrap().is_canonical());
        assert_eq!(
            Grading::new(vec![1, 1, 0], 3).unwrap().alpha(),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn tensor_degree_examples() {
        use crate::tensor::TensorType;
        let n = 2;
        let w = [1, 2];
        let t = TensorField::from_components(
            n,
            TensorType::new(1, 1),
            Mode::Exact,
            [(vec![0, 0], var(n, 0))],
        )
        .unwrap();
        assert_eq!(tensor_weighted_degree(&t, &w), BTreeSet::from([1]));
        let t = TensorField::from_components(
            n,
            TensorType::new(1, 1),
            Mode::Exact,
            [(vec![1, 0], var(n, 0))],
        )
        .unwrap();
        assert_eq!(tensor_weighted_degree(&t, &w), BTreeSet::from([0]));
        let c = TensorField::scalar(Polynomial::constant(n, Scalar::from_int(3, Mode::Exact)));
        assert_eq!(tensor_weighted_degree(&c, &w), BTreeSet::from([0]));
    }
}
