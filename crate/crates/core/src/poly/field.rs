use std::fmt;

use super::polynomial::{default_names, Polynomial};
use super::scalar::{Mode, Scalar};
use crate::error::{Error, Result};

/// A polynomial vector field `x' = F(x)` on an `n`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Polynomial>,
    mode: Mode,
}

impl VectorField {
    /// All components must have dimension `components.len()` and one mode.
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        let mode = components
            .first()
            .map(Polynomial::mode)
            .unwrap_or(Mode::Exact);
        for c in &components {
            if c.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.nvars(),
                });
            }
            if c.mode() != mode {
                return Err(Error::ModeMismatch);
            }
        }
        Ok(VectorField { components, mode })
    }

    pub fn zero(n: usize, mode: Mode) -> Self {
        VectorField {
            components: vec![Polynomial::zero(n, mode); n],
            mode,
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    /// `J[i][j] = dF^i / dx^j`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|f| {
                (0..self.dim())
                    .map(|j| f.partial(j).expect("index in range"))
                    .collect()
            })
            .collect()
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }

    pub fn to_float(&self) -> VectorField {
        VectorField {
            components: self.components.iter().map(Polynomial::to_float).collect(),
            mode: Mode::Float,
        }
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Result<Vec<Scalar>> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_f64(point)).collect()
    }

    /// Maximum total degree over all components.
    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .filter_map(Polynomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// True iff every component vanishes at the origin.
    pub fn fixes_origin(&self) -> bool {
        self.components.iter().all(|c| c.constant_term().is_zero())
    }

    /// Linear part as a dense matrix `A[i][j]`, the coefficient of `x_j` in `F^i`.
    pub fn linear_part(&self) -> Vec<Vec<Scalar>> {
        let n = self.dim();
        self.components
            .iter()
            .map(|f| {
                (0..n)
                    .map(|j| f.coeff(&super::Monomial::var(n, j)))
                    .collect()
            })
            .collect()
    }

    pub fn format_with(&self, names: &[String]) -> Vec<String> {
        self.components
            .iter()
            .zip(names)
            .map(|(c, name)| format!("{name}' = {}", c.format_with(names)))
            .collect()
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.dim());
        f.write_str(&self.format_with(&names).join("\n"))
    }
}
