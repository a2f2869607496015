//! Tensor fields of type `(p, q)` with polynomial components and their Lie
//! derivative along a polynomial vector field.

mod trivial;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ZERO_TOL;
use crate::poly::{default_names, Mode, Polynomial, Scalar, VectorField};

pub use trivial::{
    is_trivial, permutations, trivial_family_basis, trivial_family_basis_capped, TrivialFamily,
};

/// Default cap on `p + q` for ansatz construction.
pub const DEFAULT_RANK_CAP: usize = 4;

/// `p` contravariant (vector) slots and `q` covariant (covector) slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TensorType {
    pub p: usize,
    pub q: usize,
}

impl TensorType {
    pub const fn new(p: usize, q: usize) -> Self {
        TensorType { p, q }
    }

    pub fn rank(&self) -> usize {
        self.p + self.q
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.rank() > cap {
            return Err(Error::RankCapExceeded {
                rank: self.rank(),
                cap,
            });
        }
        Ok(())
    }

    /// Every index tuple `(i_1..i_p, j_1..j_q)` over `0..n`, lexicographic.
    pub fn index_tuples(&self, n: usize) -> IndexTuples {
        IndexTuples::new(self.rank(), n)
    }
}

impl fmt::Display for TensorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Lexicographic iterator over `{0..n}^len`.
#[derive(Debug, Clone)]
pub struct IndexTuples {
    cur: Option<Vec<usize>>,
    n: usize,
}

impl IndexTuples {
    pub fn new(len: usize, n: usize) -> Self {
        let cur = if n == 0 && len > 0 {
            None
        } else {
            Some(vec![0; len])
        };
        IndexTuples { cur, n }
    }
}

impl Iterator for IndexTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let mut next = out.clone();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                self.cur = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.n {
                self.cur = Some(next);
                break;
            }
            next[pos] = 0;
        }
        Some(out)
    }
}

/// A `(p, q)` tensor field. Components are keyed by 0-based index tuples with
/// the `p` upper indices first; absent entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    dim: usize,
    ttype: TensorType,
    mode: Mode,
    components: BTreeMap<Vec<usize>, Polynomial>,
}

impl TensorField {
    pub fn zero(dim: usize, ttype: TensorType, mode: Mode) -> Self {
        TensorField {
            dim,
            ttype,
            mode,
            components: BTreeMap::new(),
        }
    }

    pub fn scalar(p: Polynomial) -> Self {
        let mut t = TensorField::zero(p.nvars(), TensorType::new(0, 0), p.mode());
        t.components.insert(Vec::new(), p);
        t.prune();
        t
    }

    /// The vector field viewed as a `(1,0)` tensor.
    pub fn from_vector_field(f: &VectorField) -> Self {
        let mut t = TensorField::zero(f.dim(), TensorType::new(1, 0), f.mode());
        for (i, c) in f.components().iter().enumerate() {
            t.components.insert(vec![i], c.clone());
        }
        t.prune();
        t
    }

    pub fn from_components<I>(dim: usize, ttype: TensorType, mode: Mode, comps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Polynomial)>,
    {
        let mut t = TensorField::zero(dim, ttype, mode);
        for (idx, p) in comps {
            t.add_component(idx, &p)?;
        }
        Ok(t)
    }

    /// Adds `p` into the component at `idx`.
    pub fn add_component(&mut self, idx: Vec<usize>, p: &Polynomial) -> Result<()> {
        if idx.len() != self.ttype.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.ttype.rank(),
                found: idx.len(),
            });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.dim,
            });
        }
        if p.nvars() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.nvars(),
            });
        }
        if p.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        if p.is_zero() {
            return Ok(());
        }
        let slot = self
            .components
            .entry(idx.clone())
            .or_insert_with(|| Polynomial::zero(self.dim, self.mode));
        *slot = &*slot + p;
        if slot.is_zero() {
            self.components.remove(&idx);
        }
        Ok(())
    }

    fn prune(&mut self) {
        self.components.retain(|_, p| !p.is_zero());
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ttype(&self) -> TensorType {
        self.ttype
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, Polynomial> {
        &self.components
    }

    pub fn component(&self, idx: &[usize]) -> Polynomial {
        self.components
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim, self.mode))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.components
            .values()
            .map(Polynomial::max_abs_coeff)
            .fold(0.0, f64::max)
    }

    /// Zero test: structural in exact mode, max-norm below [`ZERO_TOL`] in
    /// float mode.
    pub fn is_numerically_zero(&self) -> bool {
        match self.mode {
            Mode::Exact => self.is_zero(),
            Mode::Float => self.max_abs_coeff() < ZERO_TOL,
        }
    }

    fn check_same_shape(&self, other: &TensorField) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.ttype != other.ttype {
            return Err(Error::TypeMismatch(
                self.ttype.p,
                self.ttype.q,
                other.ttype.p,
                other.ttype.q,
            ));
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (idx, p) in &other.components {
            out.add_component(idx.clone(), p)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.add(&other.scale(&Scalar::from_int(-1, other.mode))?)
    }

    pub fn scale(&self, c: &Scalar) -> Result<TensorField> {
        let mut out = TensorField::zero(self.dim, self.ttype, self.mode);
        for (idx, p) in &self.components {
            let s = p.scale(c)?;
            if !s.is_zero() {
                out.components.insert(idx.clone(), s);
            }
        }
        Ok(out)
    }

    /// Multiplies every component by the polynomial `f`.
    pub fn mul_poly(&self, f: &Polynomial) -> Result<TensorField> {
        let mut out = TensorField::zero(self.dim, self.ttype, self.mode);
        for (idx, p) in &self.components {
            out.add_component(idx.clone(), &p.mul(f)?)?;
        }
        Ok(out)
    }

    /// `(A ⊗ B)` with upper indices of `A`, upper of `B`, lower of `A`, lower of `B`.
    pub fn tensor_product(&self, other: &TensorField) -> Result<TensorField> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch);
        }
        let (pa, pb) = (self.ttype.p, other.ttype.p);
        let ttype = TensorType::new(pa + pb, self.ttype.q + other.ttype.q);
        let mut out = TensorField::zero(self.dim, ttype, self.mode);
        for (ia, a) in &self.components {
            for (ib, b) in &other.components {
                let mut idx = Vec::with_capacity(ttype.rank());
                idx.extend_from_slice(&ia[..pa]);
                idx.extend_from_slice(&ib[..pb]);
                idx.extend_from_slice(&ia[pa..]);
                idx.extend_from_slice(&ib[pb..]);
                out.add_component(idx, &a.mul(b)?)?;
            }
        }
        Ok(out)
    }

    /// Applies `f` to every component; the results must all have dimension
    /// `new_dim`.
    pub fn map_components<G>(&self, new_dim: usize, f: G) -> Result<TensorField>
    where
        G: Fn(&Polynomial) -> Result<Polynomial>,
    {
        let mut out = TensorField::zero(new_dim, self.ttype, self.mode);
        for (idx, p) in &self.components {
            let q = f(p)?;
            if q.nvars() != new_dim {
                return Err(Error::DimensionMismatch {
                    expected: new_dim,
                    found: q.nvars(),
                });
            }
            if !q.is_zero() {
                out.components.insert(idx.clone(), q);
            }
        }
        Ok(out)
    }

    pub fn to_float(&self) -> TensorField {
        TensorField {
            dim: self.dim,
            ttype: self.ttype,
            mode: Mode::Float,
            components: self
                .components
                .iter()
                .map(|(i, p)| (i.clone(), p.to_float()))
                .collect(),
        }
    }

    /// Splits off the terms of total degree exactly `k` in every component.
    pub fn grade_split(&self, k: u32) -> (TensorField, TensorField) {
        let mut graded = TensorField::zero(self.dim, self.ttype, self.mode);
        let mut rest = TensorField::zero(self.dim, self.ttype, self.mode);
        for (idx, p) in &self.components {
            let a = p.filter_terms(|m| m.degree() == k);
            let b = p.filter_terms(|m| m.degree() != k);
            if !a.is_zero() {
                graded.components.insert(idx.clone(), a);
            }
            if !b.is_zero() {
                rest.components.insert(idx.clone(), b);
            }
        }
        (graded, rest)
    }

    /// Smallest total degree of any term, `None` for the zero tensor.
    pub fn min_degree(&self) -> Option<u32> {
        self.components
            .values()
            .filter_map(Polynomial::min_degree)
            .min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.components
            .values()
            .filter_map(Polynomial::total_degree)
            .max()
    }

    /// Components evaluated at `x`, as a dense row-major array of length `n^(p+q)`.
    pub fn eval_dense(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n.pow(self.ttype.rank() as u32)];
        for (idx, p) in &self.components {
            out[flat_index(idx, n)] = p.eval_f64(x);
        }
        out
    }

    /// Lie derivative `L_F T`.
    pub fn lie_derivative(&self, f: &VectorField) -> Result<TensorField> {
        let jac = self.check_field(f)?;
        Ok(self.lie_derivative_with(f, &jac))
    }

    fn check_field(&self, f: &VectorField) -> Result<Vec<Vec<Polynomial>>> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        if f.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        Ok(f.jacobian())
    }

    /// Lie derivative with a precomputed Jacobian `jac[i][j] = dF^i/dx^j`.
    pub(crate) fn lie_derivative_with(
        &self,
        f: &VectorField,
        jac: &[Vec<Polynomial>],
    ) -> TensorField {
        let n = self.dim;
        let p = self.ttype.p;
        let rank = self.ttype.rank();
        let mut acc: BTreeMap<Vec<usize>, Polynomial> = BTreeMap::new();
        let mut push = |idx: Vec<usize>, poly: Polynomial| {
            if poly.is_zero() {
                return;
            }
            match acc.get_mut(&idx) {
                Some(slot) => *slot = &*slot + &poly,
                None => {
                    acc.insert(idx, poly);
                }
            }
        };
        for (idx, comp) in &self.components {
            // transport term F^s d_s T
            let mut transport = Polynomial::zero(n, self.mode);
            for (s, fs) in f.components().iter().enumerate() {
                if fs.is_zero() {
                    continue;
                }
                let d = comp.partial(s).expect("index in range");
                if !d.is_zero() {
                    transport = &transport + &(fs * &d);
                }
            }
            push(idx.clone(), transport);
            for r in 0..rank {
                let src = idx[r];
                #[allow(clippy::needless_range_loop)]
                for other in 0..n {
                    let mut out = idx.clone();
                    out[r] = other;
                    if r < p {
                        // -T^{..l..} dF^{i_r}/dx^l with l = src, i_r = other
                        let d = &jac[other][src];
                        if !d.is_zero() {
                            push(out, -&(comp * d));
                        }
                    } else {
                        // +T_{..k..} dF^k/dx^{j_r} with k = src, j_r = other
                        let d = &jac[src][other];
                        if !d.is_zero() {
                            push(out, comp * d);
                        }
                    }
                }
            }
        }
        let mut t = TensorField::zero(n, self.ttype, self.mode);
        t.components = acc.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        t
    }

    /// `(L_F T == 0, L_F T)`; the zero test follows [`Self::is_numerically_zero`].
    pub fn is_invariant(&self, f: &VectorField) -> Result<(bool, TensorField)> {
        let l = self.lie_derivative(f)?;
        Ok((l.is_numerically_zero(), l))
    }

    /// Human-readable form such as `(7/10*z - 1) d/dz`.
    pub fn format_with(&self, names: &[String]) -> String {
        if self.components.is_empty() {
            return "0".to_string();
        }
        let p = self.ttype.p;
        let mut parts = Vec::new();
        for (idx, comp) in &self.components {
            let mut bases = Vec::new();
            for (r, &i) in idx.iter().enumerate() {
                if r < p {
                    bases.push(format!("d/d{}", names[i]));
                } else {
                    bases.push(format!("d{}", names[i]));
                }
            }
            let coeff = comp.format_with(names);
            if bases.is_empty() {
                parts.push(coeff);
            } else if coeff == "1" {
                parts.push(bases.join(" ⊗ "));
            } else {
                parts.push(format!("({coeff}) {}", bases.join(" ⊗ ")));
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Display for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&default_names(self.dim)))
    }
}

pub fn flat_index(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}
