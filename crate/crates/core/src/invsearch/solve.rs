use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ansatz::{AnsatzMode, AnsatzSpace};
use crate::error::{Error, Result};
use crate::linalg::{self, PIVOT_TOL};
use crate::poly::{Mode, Monomial, Polynomial, Scalar, VectorField};
use crate::tensor::{permutations, TensorField, TrivialFamily};

/// Upper limit on `slots * constraints` for one linear system.
pub const MAX_SYSTEM_ENTRIES: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientStatus {
    Applied,
    NotRequested,
    Inapplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    Float { rank_tolerance: f64 },
}

/// Invariants found in an ansatz space.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantBasis {
    pub basis: Vec<TensorField>,
    /// `basis.len()`.
    pub dimension: usize,
    /// Nullspace dimension before removing trivial invariants.
    pub raw_dimension: usize,
    /// Dimension of the trivial span removed (0 unless applied).
    pub trivial_dimension: usize,
    pub quotient: QuotientStatus,
    pub exactness: Exactness,
    /// Trivial quotient used the unproved `p >= 4` family.
    pub conjectural: bool,
}

type ConstraintKey = (Vec<usize>, Monomial);

/// Image of each slot under `L_F`, as sparse `(constraint, coefficient)` maps.
fn slot_images(f: &VectorField, space: &AnsatzSpace) -> Vec<BTreeMap<ConstraintKey, Scalar>> {
    let jac = f.jacobian();
    let n = space.dim;
    let mode = f.mode();
    space
        .slots
        .par_iter()
        .map(|(idx, m)| {
            let mut t = TensorField::zero(n, space.ttype, mode);
            t.add_component(idx.clone(), &Polynomial::term(m.clone(), Scalar::one(mode)))
                .expect("slot within shape");
            let l = t.lie_derivative_with(f, &jac);
            let mut out = BTreeMap::new();
            for (oi, p) in l.components() {
                for (om, c) in p.terms() {
                    out.insert((oi.clone(), om.clone()), c.clone());
                }
            }
            out
        })
        .collect()
}

fn tensor_from_coeffs(space: &AnsatzSpace, coeffs: &[Scalar], mode: Mode) -> TensorField {
    let mut comps: BTreeMap<Vec<usize>, Vec<(Monomial, Scalar)>> = BTreeMap::new();
    for ((idx, m), c) in space.slots.iter().zip(coeffs) {
        if !c.is_zero() {
            comps
                .entry(idx.clone())
                .or_default()
                .push((m.clone(), c.clone()));
        }
    }
    TensorField::from_components(
        space.dim,
        space.ttype,
        mode,
        comps.into_iter().map(|(idx, terms)| {
            let p = Polynomial::from_terms(space.dim, mode, terms).expect("consistent terms");
            (idx, p)
        }),
    )
    .expect("slots within shape")
}

/// Coordinates of the trivial pairings in the slot basis, or `None` if some
/// pairing is not representable in this ansatz.
fn trivial_coordinates(space: &AnsatzSpace, mode: Mode) -> Option<Vec<Vec<Scalar>>> {
    let p = space.ttype.p;
    if p != space.ttype.q {
        return None;
    }
    let one = Monomial::one(space.dim);
    let lookup: BTreeMap<&[usize], usize> = space
        .slots
        .iter()
        .enumerate()
        .filter(|(_, (_, m))| *m == one)
        .map(|(i, (idx, _))| (idx.as_slice(), i))
        .collect();
    let mut out = Vec::new();
    for sigma in permutations(p) {
        let fam = TrivialFamily::pairing(sigma, mode);
        let mut v = vec![Scalar::zero(mode); space.len()];
        for (idx, c) in fam.components(space.dim) {
            let pos = *lookup.get(idx.as_slice())?;
            v[pos] = c;
        }
        out.push(v);
    }
    Some(out)
}

fn to_rational(v: &[Scalar]) -> Vec<BigRational> {
    v.iter()
        .map(|s| s.as_exact().cloned().expect("exact scalar"))
        .collect()
}

fn rank_of(vs: &[Vec<Scalar>], ncols: usize, mode: Mode) -> usize {
    match mode {
        Mode::Exact => {
            let rows: Vec<Vec<BigRational>> = vs.iter().map(|v| to_rational(v)).collect();
            linalg::rank_exact(&rows, ncols)
        }
        Mode::Float => {
            let rows: Vec<Vec<f64>> = vs
                .iter()
                .map(|v| v.iter().map(Scalar::to_f64).collect())
                .collect();
            linalg::rank_float(&rows, ncols)
        }
    }
}

/// Imposes `L_F T = 0` on the ansatz and returns a nullspace basis, optionally
/// with the trivial `(p,p)` invariants quotiented out. Every returned tensor
/// is re-verified.
pub fn solve_invariants(
    f: &VectorField,
    space: &AnsatzSpace,
    quotient_trivial: bool,
) -> Result<InvariantBasis> {
    if f.dim() != space.dim {
        return Err(Error::DimensionMismatch {
            expected: space.dim,
            found: f.dim(),
        });
    }
    let mode = f.mode();
    let ncols = space.len();
    let images = slot_images(f, space);
    let keys: BTreeSet<&ConstraintKey> = images.iter().flat_map(|m| m.keys()).collect();
    let nrows = keys.len();
    if ncols.saturating_mul(nrows) > MAX_SYSTEM_ENTRIES {
        return Err(Error::SystemTooLarge {
            slots: ncols,
            constraints: nrows,
            limit: MAX_SYSTEM_ENTRIES,
        });
    }
    let row_of: BTreeMap<&ConstraintKey, usize> =
        keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let raw: Vec<Vec<Scalar>> = match mode {
        Mode::Exact => {
            let mut rows = vec![vec![BigRational::zero(); ncols]; nrows];
            for (col, img) in images.iter().enumerate() {
                for (k, c) in img {
                    rows[row_of[k]][col] = c.as_exact().cloned().expect("exact");
                }
            }
            linalg::nullspace_exact(&rows, ncols)
                .into_iter()
                .map(|v| {
                    linalg::primitive_direction(&v)
                        .into_iter()
                        .map(|x| Scalar::Exact(BigRational::from_integer(x)))
                        .collect()
                })
                .collect()
        }
        Mode::Float => {
            let mut rows = vec![vec![0.0; ncols]; nrows];
            for (col, img) in images.iter().enumerate() {
                for (k, c) in img {
                    rows[row_of[k]][col] = c.to_f64();
                }
            }
            linalg::nullspace_float(&rows, ncols)
                .into_iter()
                .map(|v| {
                    let mx = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                    v.into_iter().map(|x| Scalar::Float(x / mx)).collect()
                })
                .collect()
        }
    };
    let raw_dimension = raw.len();

    let trivial = if quotient_trivial {
        trivial_coordinates(space, mode)
    } else {
        None
    };
    let quotient = match (quotient_trivial, &trivial) {
        (false, _) => QuotientStatus::NotRequested,
        (true, None) => QuotientStatus::Inapplicable,
        (true, Some(_)) => QuotientStatus::Applied,
    };
    let (vectors, trivial_dimension) = match trivial {
        Some(triv) => {
            // greedy extension of the trivial span by raw nullspace vectors
            let t_rank = rank_of(&triv, ncols, mode);
            let mut acc = triv;
            let mut rank = t_rank;
            let mut kept = Vec::new();
            for v in raw {
                acc.push(v.clone());
                let r = rank_of(&acc, ncols, mode);
                if r > rank {
                    rank = r;
                    kept.push(v);
                } else {
                    acc.pop();
                }
            }
            // trivial invariants lie in every nullspace
            if rank != raw_dimension {
                return Err(Error::Verification(
                    "trivial family is not contained in the nullspace".into(),
                ));
            }
            (kept, t_rank)
        }
        None => (raw, 0),
    };

    let basis: Vec<TensorField> = vectors
        .iter()
        .map(|v| tensor_from_coeffs(space, v, mode))
        .collect();
    for t in &basis {
        let (ok, res) = t.is_invariant(f)?;
        if !ok {
            return Err(Error::Verification(format!(
                "solved tensor is not invariant (residual max coefficient {:e})",
                res.max_abs_coeff()
            )));
        }
    }
    Ok(InvariantBasis {
        dimension: basis.len(),
        basis,
        raw_dimension,
        trivial_dimension,
        quotient,
        exactness: match mode {
            Mode::Exact => Exactness::Exact,
            Mode::Float => Exactness::Float {
                rank_tolerance: PIVOT_TOL,
            },
        },
        conjectural: quotient == QuotientStatus::Applied && space.ttype.p >= 4,
    })
}

/// `true` if `t` is a nonzero scalar multiple of `target` (exact mode).
pub fn proportional(t: &TensorField, target: &TensorField) -> bool {
    if t.ttype() != target.ttype() || t.is_zero() || target.is_zero() {
        return false;
    }
    let Some((idx, p)) = target.components().iter().next() else {
        return false;
    };
    let (m, c) = p.terms().next().expect("nonzero component");
    let tc = t.component(idx).coeff(m);
    if tc.is_zero() {
        return false;
    }
    let ratio = &tc / c;
    match target.scale(&ratio) {
        Ok(s) => match t.sub(&s) {
            Ok(d) => d.is_numerically_zero(),
            Err(_) => false,
        },
        Err(_) => false,
    }
}

/// The mode-specific ansatz degree recorded in reports.
pub fn ansatz_degree(mode: &AnsatzMode) -> i64 {
    match mode {
        AnsatzMode::Graded { degree, .. } => *degree,
        AnsatzMode::TotalDegree(k) => *k as i64,
        AnsatzMode::TotalDegreeWindow(lo, _) => *lo as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invsearch::ansatz::{build_ansatz, DEFAULT_ZERO_WEIGHT_CAP};
    use crate::tensor::{TensorType, DEFAULT_RANK_CAP};

    fn var(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i, Mode::Exact)
    }

    fn lotka() -> VectorField {
        let n = 3;
        let c = |v: i64| Polynomial::constant(n, Scalar::from_int(v, Mode::Exact));
        let (x, y, z) = (var(n, 0), var(n, 1), var(n, 2));
        VectorField::new(vec![
            &(&(&c(2) * &(&x * &x)) + &(&c(2) * &(&x * &y))) + &(&x * &z),
            &(&(-&(&x * &y)) + &(&y * &y)) + &(&c(3) * &(&y * &z)),
            &(&(-&(&x * &z)) - &(&y * &z)) + &(&c(2) * &(&z * &z)),
        ])
        .unwrap()
    }

    fn graded(l: i64) -> AnsatzMode {
        AnsatzMode::Graded {
            weights: vec![1, 1, 1],
            degree: l,
            zero_weight_cap: DEFAULT_ZERO_WEIGHT_CAP,
        }
    }

    #[test]
    fn lotka_symmetry_is_the_field() {
        let f = lotka();
        let a = build_ansatz(TensorType::new(1, 0), graded(1), 3, DEFAULT_RANK_CAP).unwrap();
        let b = solve_invariants(&f, &a, true).unwrap();
        assert_eq!(b.dimension, 1);
        assert_eq!(b.quotient, QuotientStatus::Inapplicable);
        assert!(proportional(
            &b.basis[0],
            &TensorField::from_vector_field(&f)
        ));
    }

    #[test]
    fn lotka_identity_quotient() {
        let f = lotka();
        let a = build_ansatz(TensorType::new(1, 1), graded(0), 3, DEFAULT_RANK_CAP).unwrap();
        let raw = solve_invariants(&f, &a, false).unwrap();
        assert_eq!(raw.dimension, 1);
        let q = solve_invariants(&f, &a, true).unwrap();
        assert_eq!(q.quotient, QuotientStatus::Applied);
        assert_eq!(
            (q.dimension, q.raw_dimension, q.trivial_dimension),
            (0, 1, 1)
        );
    }
}
