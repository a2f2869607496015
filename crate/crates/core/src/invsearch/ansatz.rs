use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::index_shift;
use crate::poly::{monomials_of_degree, monomials_of_weight, Monomial};
use crate::tensor::TensorType;

/// Default exponent cap for weight-zero variables in a graded ansatz.
pub const DEFAULT_ZERO_WEIGHT_CAP: u32 = 4;

/// Which polynomial coefficients an ansatz admits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzMode {
    /// Quasi-homogeneous of tensor degree `degree`. Exponents of weight-zero
    /// variables are capped at `zero_weight_cap`.
    Graded {
        weights: Vec<u32>,
        degree: i64,
        zero_weight_cap: u32,
    },
    /// Homogeneous of total degree `k` in every component.
    TotalDegree(u32),
    /// All total degrees in `lo..=hi`.
    TotalDegreeWindow(u32, u32),
}

/// One unknown coefficient per `(index tuple, monomial)` slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpace {
    pub dim: usize,
    pub ttype: TensorType,
    pub mode: AnsatzMode,
    pub slots: Vec<(Vec<usize>, Monomial)>,
}

impl AnsatzSpace {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn position(&self, idx: &[usize], m: &Monomial) -> Option<usize> {
        self.slots
            .iter()
            .position(|(i, mm)| i.as_slice() == idx && mm == m)
    }
}

pub fn build_ansatz(
    ttype: TensorType,
    mode: AnsatzMode,
    n: usize,
    rank_cap: usize,
) -> Result<AnsatzSpace> {
    ttype.check_cap(rank_cap)?;
    let mut slots = Vec::new();
    match &mode {
        AnsatzMode::Graded {
            weights,
            degree,
            zero_weight_cap,
        } => {
            if weights.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: weights.len(),
                });
            }
            for idx in ttype.index_tuples(n) {
                let w = degree - index_shift(&idx, ttype.p, weights);
                for m in monomials_of_weight(weights, w, *zero_weight_cap) {
                    slots.push((idx.clone(), m));
                }
            }
        }
        AnsatzMode::TotalDegree(k) => {
            let ms = monomials_of_degree(n, *k);
            for idx in ttype.index_tuples(n) {
                slots.extend(ms.iter().map(|m| (idx.clone(), m.clone())));
            }
        }
        AnsatzMode::TotalDegreeWindow(lo, hi) => {
            let ms: Vec<Monomial> = (*lo..=*hi)
                .flat_map(|k| monomials_of_degree(n, k))
                .collect();
            for idx in ttype.index_tuples(n) {
                slots.extend(ms.iter().map(|m| (idx.clone(), m.clone())));
            }
        }
    }
    Ok(AnsatzSpace {
        dim: n,
        ttype,
        mode,
        slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::DEFAULT_RANK_CAP;

    fn graded(w: &[u32], l: i64) -> AnsatzMode {
        AnsatzMode::Graded {
            weights: w.to_vec(),
            degree: l,
            zero_weight_cap: DEFAULT_ZERO_WEIGHT_CAP,
        }
    }

    #[test]
    fn lotka_vector_ansatz_sizes() {
        let t = TensorType::new(1, 0);
        let a = build_ansatz(t, graded(&[1, 1, 1], -1), 3, DEFAULT_RANK_CAP).unwrap();
        assert_eq!(a.len(), 3);
        assert!(a.slots.iter().all(|(_, m)| m.is_one()));
        let a = build_ansatz(t, graded(&[1, 1, 1], 1), 3, DEFAULT_RANK_CAP).unwrap();
        assert_eq!(a.len(), 18);
    }

    #[test]
    fn scalar_constant_ansatz() {
        let a = build_ansatz(TensorType::new(0, 0), graded(&[2, 0, 5], 0), 3, 4).unwrap();
        assert_eq!(a.len(), 5); // z^0..z^4 for the weight-zero variable
        let a = build_ansatz(TensorType::new(0, 0), graded(&[1, 1], 0), 2, 4).unwrap();
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn negative_weights_give_empty_space() {
        let a = build_ansatz(TensorType::new(0, 1), graded(&[1, 1], -3), 2, 4).unwrap();
        assert!(a.is_empty());
    }

    #[test]
    fn rank_cap_applies() {
        let r = build_ansatz(TensorType::new(3, 2), AnsatzMode::TotalDegree(0), 2, 4);
        assert!(matches!(r, Err(Error::RankCapExceeded { rank: 5, cap: 4 })));
    }
}
