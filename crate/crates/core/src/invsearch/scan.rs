use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ansatz::{build_ansatz, AnsatzMode, DEFAULT_ZERO_WEIGHT_CAP};
use super::solve::{solve_invariants, InvariantBasis};
use crate::error::{Error, Result};
use crate::grading::SemiQhDecomposition;
use crate::poly::{Monomial, Polynomial, Scalar, VectorField};
use crate::resonance::{
    admissible_degree_window, enumerate_fixed_point, enumerate_semi_qh, fixed_point_window,
    DegreeWindow, ResonanceOptions, ResonanceSolution,
};
use crate::spectrum::{self, Exponent};
use crate::tensor::{TensorType, DEFAULT_RANK_CAP};

pub const DEFAULT_FIXED_POINT_K_MAX: u32 = 6;

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub resonance: ResonanceOptions,
    /// Largest order `k` searched at a fixed point.
    pub fixed_point_k_max: u32,
    pub quotient_trivial: bool,
    pub zero_weight_cap: u32,
    pub rank_cap: usize,
    /// Graded degrees solved in addition to the window.
    pub extra_degrees: Vec<i64>,
    /// At a fixed point, also solve the full field over total degrees
    /// `0..=d` and check the lowest grade of each solution.
    pub nonlinear_degree: Option<u32>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            resonance: ResonanceOptions::default(),
            fixed_point_k_max: DEFAULT_FIXED_POINT_K_MAX,
            quotient_trivial: true,
            zero_weight_cap: DEFAULT_ZERO_WEIGHT_CAP,
            rank_cap: DEFAULT_RANK_CAP,
            extra_degrees: Vec::new(),
            nonlinear_degree: None,
        }
    }
}

/// Where the search is anchored.
#[derive(Debug, Clone, Copy)]
pub enum ScanTarget<'a> {
    /// Quasi-homogeneous invariants of the cut, along a balance with these
    /// Kovalevskaya exponents.
    Graded {
        decomposition: &'a SemiQhDecomposition,
        exponents: &'a [Exponent],
    },
    /// Homogeneous invariants of the linear part at the origin.
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Graded,
    FixedPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeResult {
    /// Tensor degree `l` (graded) or order `k` (fixed point).
    pub degree: i64,
    pub in_window: bool,
    pub resonances: Vec<ResonanceSolution>,
    pub basis: InvariantBasis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearResult {
    pub max_degree: u32,
    pub basis: InvariantBasis,
    /// Lowest total degree of each basis tensor.
    pub lowest_grades: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub ttype: TensorType,
    pub kind: ScanKind,
    pub spectrum: Vec<Exponent>,
    pub window: DegreeWindow,
    pub results: Vec<DegreeResult>,
    pub nonlinear: Option<NonlinearResult>,
}

impl ScanReport {
    pub fn dimension_at(&self, degree: i64) -> Option<usize> {
        self.results
            .iter()
            .find(|r| r.degree == degree)
            .map(|r| r.basis.dimension)
    }

    pub fn total_dimension(&self) -> usize {
        self.results.iter().map(|r| r.basis.dimension).sum()
    }
}

fn necessity(degree: i64, ttype: TensorType, r: &DegreeResult) -> Result<()> {
    if r.basis.raw_dimension > 0 && r.resonances.is_empty() {
        return Err(Error::Verification(format!(
            "invariants of type {ttype} found at degree {degree} without a resonance"
        )));
    }
    Ok(())
}

/// Linear part `x' = Ax` of a field fixing the origin.
pub fn linear_field(f: &VectorField) -> VectorField {
    let n = f.dim();
    let comps = f
        .components()
        .iter()
        .map(|p| p.filter_terms(|m| m.degree() == 1))
        .collect();
    VectorField::new(comps).unwrap_or_else(|_| VectorField::zero(n, f.mode()))
}

/// Runs resonance enumeration and invariant search over the admissible
/// degrees. A nonzero invariant space at a degree with no resonance is an
/// internal error, since the resonance conditions are necessary.
pub fn full_scan(
    f: &VectorField,
    target: ScanTarget<'_>,
    ttype: TensorType,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    match target {
        ScanTarget::Graded {
            decomposition,
            exponents,
        } => graded_scan(decomposition, exponents, ttype, opts),
        ScanTarget::FixedPoint => fixed_point_scan(f, ttype, opts),
    }
}

fn graded_scan(
    d: &SemiQhDecomposition,
    exponents: &[Exponent],
    ttype: TensorType,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    let g = &d.grading;
    let window = admissible_degree_window(exponents, g.degree, ttype, &g.weights, &opts.resonance);
    let mut degrees: Vec<i64> = window.degrees.clone();
    degrees.extend(opts.extra_degrees.iter().copied());
    degrees.sort_unstable();
    degrees.dedup();
    if !degrees.is_empty() {
        ttype.check_cap(opts.rank_cap)?;
    }
    let results: Vec<DegreeResult> = degrees
        .par_iter()
        .map(|&l| -> Result<DegreeResult> {
            let resonances = enumerate_semi_qh(exponents, g.degree, ttype, l, &opts.resonance)?;
            let mode = AnsatzMode::Graded {
                weights: g.weights.clone(),
                degree: l,
                zero_weight_cap: opts.zero_weight_cap,
            };
            let space = build_ansatz(ttype, mode, d.cut.dim(), opts.rank_cap)?;
            let basis = solve_invariants(&d.cut, &space, opts.quotient_trivial)?;
            let r = DegreeResult {
                degree: l,
                in_window: window.degrees.contains(&l),
                resonances,
                basis,
            };
            necessity(l, ttype, &r)?;
            Ok(r)
        })
        .collect::<Result<_>>()?;
    Ok(ScanReport {
        ttype,
        kind: ScanKind::Graded,
        spectrum: exponents.to_vec(),
        window,
        results,
        nonlinear: None,
    })
}

fn fixed_point_scan(f: &VectorField, ttype: TensorType, opts: &ScanOptions) -> Result<ScanReport> {
    if !f.fixes_origin() {
        return Err(Error::NoFixedPointAtOrigin);
    }
    let spec = spectrum::eigenvalues(&f.linear_part());
    let window = fixed_point_window(&spec, ttype, opts.fixed_point_k_max, &opts.resonance);
    let lin = linear_field(f);
    let orders: Vec<u32> = if window.is_empty() {
        Vec::new()
    } else {
        (0..=window.upper.max(0) as u32).collect()
    };
    if !orders.is_empty() {
        ttype.check_cap(opts.rank_cap)?;
    }
    let results: Vec<DegreeResult> = orders
        .par_iter()
        .map(|&k| -> Result<DegreeResult> {
            let resonances = enumerate_fixed_point(&spec, ttype, k, &opts.resonance);
            let space = build_ansatz(ttype, AnsatzMode::TotalDegree(k), f.dim(), opts.rank_cap)?;
            let basis = solve_invariants(&lin, &space, opts.quotient_trivial)?;
            let r = DegreeResult {
                degree: k as i64,
                in_window: window.degrees.contains(&(k as i64)),
                resonances,
                basis,
            };
            necessity(k as i64, ttype, &r)?;
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let nonlinear = match opts.nonlinear_degree {
        Some(dmax) => {
            ttype.check_cap(opts.rank_cap)?;
            let space = build_ansatz(
                ttype,
                AnsatzMode::TotalDegreeWindow(0, dmax),
                f.dim(),
                opts.rank_cap,
            )?;
            let basis = solve_invariants(f, &space, opts.quotient_trivial)?;
            let mut lowest = Vec::new();
            for t in &basis.basis {
                let k0 = t.min_degree().unwrap_or(0);
                if enumerate_fixed_point(&spec, ttype, k0, &opts.resonance).is_empty() {
                    return Err(Error::Verification(format!(
                        "invariant of type {ttype} with lowest grade {k0} has no resonance"
                    )));
                }
                lowest.push(k0);
            }
            Some(NonlinearResult {
                max_degree: dmax,
                basis,
                lowest_grades: lowest,
            })
        }
        None => None,
    };
    Ok(ScanReport {
        ttype,
        kind: ScanKind::FixedPoint,
        spectrum: spec,
        window,
        results,
        nonlinear,
    })
}

/// `x' = diag(d) x`, used by examples and tests.
pub fn diagonal_linear_field(d: &[Scalar]) -> VectorField {
    let n = d.len();
    let comps = d
        .iter()
        .enumerate()
        .map(|(i, c)| Polynomial::term(Monomial::var(n, i), c.clone()))
        .collect();
    VectorField::new(comps).expect("consistent diagonal field")
}
