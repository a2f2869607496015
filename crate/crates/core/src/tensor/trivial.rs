use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use super::{TensorField, TensorType, DEFAULT_RANK_CAP};
use crate::error::Result;
use crate::linalg;
use crate::poly::{Mode, Polynomial, Scalar};

/// A linear combination `sum_sigma c_sigma T_sigma` of the permutation
/// pairings of type `(p, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivialFamily {
    pub p: usize,
    /// Keyed by the permutation written as the image tuple `(sigma(0), ..)`.
    pub coefficients: BTreeMap<Vec<usize>, Scalar>,
}

impl TrivialFamily {
    /// The single pairing `T_sigma`.
    pub fn pairing(sigma: Vec<usize>, mode: Mode) -> Self {
        TrivialFamily {
            p: sigma.len(),
            coefficients: BTreeMap::from([(sigma, Scalar::one(mode))]),
        }
    }

    /// For `p >= 4` membership rests on the unproved general form.
    pub fn conjectural(&self) -> bool {
        self.p >= 4
    }

    /// Nonzero constant components over dimension `n`, produced lazily in
    /// index order of the upper indices.
    pub fn components(&self, n: usize) -> impl Iterator<Item = (Vec<usize>, Scalar)> + '_ {
        let p = self.p;
        TensorType::new(p, 0)
            .index_tuples(n)
            .flat_map(move |upper| {
                let mut local: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
                for (sigma, c) in &self.coefficients {
                    let mut idx = upper.clone();
                    idx.extend(sigma.iter().map(|&s| upper[s]));
                    let entry = local.entry(idx).or_insert_with(|| Scalar::zero(c.mode()));
                    *entry = &*entry + c;
                }
                local.into_iter().filter(|(_, c)| !c.is_zero())
            })
    }

    pub fn to_tensor(&self, n: usize) -> TensorField {
        let mode = self
            .coefficients
            .values()
            .next()
            .map(Scalar::mode)
            .unwrap_or(Mode::Exact);
        let mut t = TensorField::zero(n, TensorType::new(self.p, self.p), mode);
        for (idx, c) in self.components(n) {
            t.components.insert(idx, Polynomial::constant(n, c));
        }
        t
    }
}

/// All permutations of `0..p` as image tuples, in lexicographic order
/// (identity first).
pub fn permutations(p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..p).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..p).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..p)
            .rev()
            .find(|&j| cur[j] > cur[i - 1])
            .expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// The `p!` pairings `T_sigma` of type `(p, p)` on `n` dimensions, subject to
/// the default rank cap `2p <= 4`.
pub fn trivial_family_basis(p: usize, n: usize) -> Result<Vec<TensorField>> {
    trivial_family_basis_capped(p, n, DEFAULT_RANK_CAP)
}

pub fn trivial_family_basis_capped(p: usize, n: usize, cap: usize) -> Result<Vec<TensorField>> {
    TensorType::new(p, p).check_cap(cap)?;
    Ok(permutations(p)
        .into_iter()
        .map(|s| TrivialFamily::pairing(s, Mode::Exact).to_tensor(n))
        .collect())
}

/// Decomposes `t` over the trivial family if it is a constant `(p, p)` tensor
/// in its span.
pub fn is_trivial(t: &TensorField) -> Option<TrivialFamily> {
    let TensorType { p, q } = t.ttype();
    if p != q {
        return None;
    }
    if t.components().values().any(|c| !c.is_constant()) {
        return None;
    }
    let n = t.dim();
    let perms = permutations(p);
    // one equation per (I, J) with J a rearrangement of I
    let mut rows: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for upper in TensorType::new(p, 0).index_tuples(n) {
        for (col, sigma) in perms.iter().enumerate() {
            let mut idx = upper.clone();
            idx.extend(sigma.iter().map(|&s| upper[s]));
            rows.entry(idx).or_default().push(col);
        }
    }
    if t.components().keys().any(|k| !rows.contains_key(k)) {
        return None;
    }
    let support: BTreeSet<Vec<usize>> = rows.keys().cloned().collect();
    let coeffs: Vec<Scalar> = match t.mode() {
        Mode::Exact => {
            let a: Vec<Vec<BigRational>> = support
                .iter()
                .map(|k| {
                    let mut row = vec![BigRational::from_integer(0.into()); perms.len()];
                    for &c in &rows[k] {
                        row[c] += BigRational::from_integer(1.into());
                    }
                    row
                })
                .collect();
            let b: Vec<BigRational> = support
                .iter()
                .map(|k| {
                    t.component(k)
                        .constant_term()
                        .as_exact()
                        .cloned()
                        .expect("exact mode")
                })
                .collect();
            linalg::solve_exact(&a, &b)?
                .into_iter()
                .map(Scalar::Exact)
                .collect()
        }
        Mode::Float => {
            let a: Vec<Vec<f64>> = support
                .iter()
                .map(|k| {
                    let mut row = vec![0.0; perms.len()];
                    for &c in &rows[k] {
                        row[c] += 1.0;
                    }
                    row
                })
                .collect();
            let b: Vec<f64> = support
                .iter()
                .map(|k| t.component(k).constant_term().to_f64())
                .collect();
            linalg::solve_float(&a, &b)?
                .into_iter()
                .map(Scalar::Float)
                .collect()
        }
    };
    Some(TrivialFamily {
        p,
        coefficients: perms
            .into_iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .collect(),
    })
}
