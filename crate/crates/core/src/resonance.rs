//! Bounded enumeration of resonance conditions among eigenvalues (at a fixed
//! point) or Kovalevskaya exponents (along a balance), and the tensor-degree
//! windows they leave open.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Exponent;
use crate::tensor::TensorType;

pub const DEFAULT_K_MAX: u32 = 20;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceOptions {
    /// Bound on `sum k_j`.
    pub k_max: u32,
    /// Relative tolerance for inexact spectra.
    pub tol: f64,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        ResonanceOptions {
            k_max: DEFAULT_K_MAX,
            tol: DEFAULT_TOL,
        }
    }
}

/// One solution `(k, I, J[, l])` of a resonance condition. Indices are
/// 0-based and each side is a sorted multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResonanceSolution {
    pub k: Vec<u32>,
    pub upper: Vec<usize>,
    pub lower: Vec<usize>,
    pub l: Option<i64>,
    pub residual: Residual,
    /// Holds for every spectrum: all net coefficients vanish (and `l = 0`).
    pub tautological: bool,
}

/// `Exact` certifies equality; `Approx` records the float defect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    Exact,
    Approx(f64),
}

impl Eq for Residual {}

impl Ord for Residual {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (Residual::Exact, Residual::Exact) => Ordering::Equal,
            (Residual::Exact, Residual::Approx(_)) => Ordering::Less,
            (Residual::Approx(_), Residual::Exact) => Ordering::Greater,
            (Residual::Approx(a), Residual::Approx(b)) => a.total_cmp(b),
        }
    }
}

impl PartialOrd for Residual {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::hash::Hash for Residual {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Residual::Exact => 0u8.hash(state),
            Residual::Approx(v) => v.to_bits().hash(state),
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact => f.write_str("0"),
            Residual::Approx(v) => write!(f, "{v:e}"),
        }
    }
}

impl ResonanceSolution {
    pub fn order(&self) -> u32 {
        self.k.iter().sum()
    }
}

/// All `k` in `N^n` with `sum k = total`, lexicographically descending.
pub fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if n == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; n];
    fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() - 1 {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v;
            rec(cur, pos + 1, left - v, out);
        }
        cur[pos] = 0;
    }
    rec(&mut cur, 0, total, &mut out);
    out
}

/// Sorted multisets of size `size` drawn from `0..n`.
pub fn multisets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, size, i, cur, out);
            cur.pop();
        }
    }
    rec(n, size, 0, &mut cur, &mut out);
    out
}

/// Net coefficients `c_j = k_j + #J(j) - #I(j)`.
fn net_coefficients(k: &[u32], upper: &[usize], lower: &[usize]) -> Vec<i64> {
    let mut c: Vec<i64> = k.iter().map(|&v| v as i64).collect();
    for &j in lower {
        c[j] += 1;
    }
    for &i in upper {
        c[i] -= 1;
    }
    c
}

/// Tests `shift + sum_j c_j lambda_j == 0`, exactly when every exponent with
/// `c_j != 0` is exact.
fn check(
    spec: &[Exponent],
    c: &[i64],
    k: &[u32],
    shift: &BigRational,
    rhs_mag: f64,
    tol: f64,
) -> Option<Residual> {
    let exact = c.iter().zip(spec).all(|(&cj, l)| cj == 0 || l.is_exact());
    if exact {
        let mut s = shift.clone();
        for (&cj, l) in c.iter().zip(spec) {
            if cj != 0 {
                s += l.as_exact().expect("exact") * BigRational::from_integer(BigInt::from(cj));
            }
        }
        return s.is_zero().then_some(Residual::Exact);
    }
    let mut s = Complex64::new(crate::poly::rational_to_f64(shift), 0.0);
    let mut mag = shift.to_f64().unwrap_or(0.0).abs() + rhs_mag + 1.0;
    for ((&cj, l), &kj) in c.iter().zip(spec).zip(k) {
        let z = l.to_complex();
        s += z * cj as f64;
        mag += kj as f64 * z.norm();
    }
    let bound = tol * mag;
    (s.re.abs() <= bound && s.im.abs() <= bound).then_some(Residual::Approx(s.norm()))
}

fn rhs_magnitude(spec: &[Exponent], upper: &[usize], lower: &[usize]) -> f64 {
    let z: Complex64 = upper
        .iter()
        .map(|&i| spec[i].to_complex())
        .sum::<Complex64>()
        - lower
            .iter()
            .map(|&j| spec[j].to_complex())
            .sum::<Complex64>();
    z.norm()
}

fn enumerate(
    spec: &[Exponent],
    ttype: TensorType,
    order: u32,
    l_shift: Option<(i64, u32)>,
    tol: f64,
) -> Vec<ResonanceSolution> {
    let n = spec.len();
    let uppers = multisets(n, ttype.p);
    let lowers = multisets(n, ttype.q);
    let pairs: Vec<(&Vec<usize>, &Vec<usize>, f64)> = uppers
        .iter()
        .flat_map(|u| lowers.iter().map(move |d| (u, d)))
        .map(|(u, d)| (u, d, rhs_magnitude(spec, u, d)))
        .collect();
    let shift = match l_shift {
        Some((l, m)) => BigRational::new(BigInt::from(-l), BigInt::from(m as i64 - 1)),
        None => BigRational::zero(),
    };
    let mut out: Vec<ResonanceSolution> = compositions(n, order)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut found = Vec::new();
            for (u, d, mag) in &pairs {
                let c = net_coefficients(&k, u, d);
                if let Some(residual) = check(spec, &c, &k, &shift, *mag, tol) {
                    let l = l_shift.map(|(l, _)| l);
                    found.push(ResonanceSolution {
                        k: k.clone(),
                        upper: (*u).clone(),
                        lower: (*d).clone(),
                        l,
                        residual,
                        tautological: c.iter().all(|&v| v == 0) && l.unwrap_or(0) == 0,
                    });
                }
            }
            found
        })
        .collect();
    out.sort();
    out
}

/// Solutions of `sum k_j lambda_j = sum lambda_I - sum lambda_J` with
/// `sum k_j = k`. Tautological solutions are included and flagged.
pub fn enumerate_fixed_point(
    spec: &[Exponent],
    ttype: TensorType,
    k: u32,
    opts: &ResonanceOptions,
) -> Vec<ResonanceSolution> {
    enumerate(spec, ttype, k, None, opts.tol)
}

/// Solutions of `-l/(m-1) + sum k_j lambda_j = sum lambda_I - sum lambda_J`
/// with `sum k_j <= k_max`. For `l >= 0` and an exact exponent `-1` the
/// rewritten form is enumerated independently and the two must agree.
pub fn enumerate_semi_qh(
    spec: &[Exponent],
    m: u32,
    ttype: TensorType,
    l: i64,
    opts: &ResonanceOptions,
) -> Result<Vec<ResonanceSolution>> {
    if m < 2 {
        return Err(Error::InvalidGrading(format!(
            "degree must exceed 1, got {m}"
        )));
    }
    let mut out = Vec::new();
    for order in 0..=opts.k_max {
        out.extend(enumerate(spec, ttype, order, Some((l, m)), opts.tol));
    }
    if l >= 0 {
        cross_validate_rewritten(spec, m, ttype, l, &out, opts)?;
    }
    Ok(out)
}

/// The rewritten condition `sum k'_j lambda_j = (m-1)(sum lambda_I - sum lambda_J)`
/// under `k'_1 = l + (m-1) k_1`, `k'_j = (m-1) k_j`, where index 1 carries an
/// exponent `-1`.
fn cross_validate_rewritten(
    spec: &[Exponent],
    m: u32,
    ttype: TensorType,
    l: i64,
    sols: &[ResonanceSolution],
    opts: &ResonanceOptions,
) -> Result<()> {
    let minus_one = BigRational::from_integer(BigInt::from(-1));
    let Some(j1) = spec.iter().position(|e| e.as_exact() == Some(&minus_one)) else {
        return Ok(());
    };
    let mm = m as i64 - 1;
    let n = spec.len();
    let scaled_rhs = |u: &[usize], d: &[usize]| -> (Vec<usize>, Vec<usize>) {
        // (m-1) copies of each index turn the right side into (m-1)(...)
        let rep = |v: &[usize]| -> Vec<usize> {
            let mut r: Vec<usize> = v
                .iter()
                .flat_map(|&i| std::iter::repeat_n(i, mm as usize))
                .collect();
            r.sort();
            r
        };
        (rep(u), rep(d))
    };
    let rewritten_holds = |kp: &[u32], u: &[usize], d: &[usize]| -> bool {
        let (uu, dd) = scaled_rhs(u, d);
        let c = net_coefficients(kp, &uu, &dd);
        check(
            spec,
            &c,
            kp,
            &BigRational::zero(),
            rhs_magnitude(spec, &uu, &dd),
            opts.tol,
        )
        .is_some()
    };
    for s in sols {
        let mut kp: Vec<u32> = s.k.iter().map(|&v| v * mm as u32).collect();
        kp[j1] += l as u32;
        if !rewritten_holds(&kp, &s.upper, &s.lower) {
            return Err(Error::Verification(format!(
                "resonance {:?} fails the rewritten form",
                s.k
            )));
        }
    }
    // every lattice solution of the rewritten form maps back to a listed one
    let bound = l as u32 + mm as u32 * opts.k_max;
    let uppers = multisets(n, ttype.p);
    let lowers = multisets(n, ttype.q);
    for total in 0..=bound {
        for kp in compositions(n, total) {
            if (kp[j1] as i64) < l {
                continue;
            }
            let ok_lattice = kp.iter().enumerate().all(|(j, &v)| {
                let v = if j == j1 { v as i64 - l } else { v as i64 };
                v.is_multiple_of(&mm)
            });
            if !ok_lattice {
                continue;
            }
            let k: Vec<u32> = kp
                .iter()
                .enumerate()
                .map(|(j, &v)| ((if j == j1 { v as i64 - l } else { v as i64 }) / mm) as u32)
                .collect();
            if k.iter().sum::<u32>() > opts.k_max {
                continue;
            }
            for u in &uppers {
                for d in &lowers {
                    if rewritten_holds(&kp, u, d)
                        && !sols
                            .iter()
                            .any(|s| s.k == k && &s.upper == u && &s.lower == d)
                    {
                        return Err(Error::Verification(format!(
                            "rewritten resonance {kp:?} has no preimage"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// How a window bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowStatus {
    /// From a closed-form bound valid for all orders.
    Proved,
    /// From enumeration up to `k_max`.
    Bounded,
}

/// Candidate tensor degrees `l` (graded case) or orders `k` (fixed point).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeWindow {
    pub lower: i64,
    pub upper: i64,
    pub degrees: Vec<i64>,
    pub status: WindowStatus,
}

impl DegreeWindow {
    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn describe(&self) -> String {
        match (self.is_empty(), self.status) {
            (true, WindowStatus::Proved) => "window empty (proved)".into(),
            (true, WindowStatus::Bounded) => "searched and empty (bounded)".into(),
            (false, _) => format!("{}..={}", self.lower, self.upper),
        }
    }
}

fn floor_rational(r: &BigRational) -> i64 {
    r.floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

/// Window of tensor degrees `l` not excluded by the semi-quasihomogeneous
/// resonance condition.
///
/// The lower end comes from the ansatz: a monomial has weight `>= 0`, so
/// `l >= q*min(s) - p*max(s)`. When every exponent has `Re <= 0` the
/// condition gives `l <= (m-1) * (q*max Re - p*min Re)`, and the window is
/// proved. Otherwise the degrees are those realized with `sum k <= k_max`.
pub fn admissible_degree_window(
    spec: &[Exponent],
    m: u32,
    ttype: TensorType,
    weights: &[u32],
    opts: &ResonanceOptions,
) -> DegreeWindow {
    let (p, q) = (ttype.p as i64, ttype.q as i64);
    let s_min = weights.iter().copied().min().unwrap_or(0) as i64;
    let s_max = weights.iter().copied().max().unwrap_or(0) as i64;
    let lower = q * s_min - p * s_max;
    let mm = m as i64 - 1;
    let all_exact = spec.iter().all(Exponent::is_exact);
    let nonpositive = spec.iter().all(|e| match e.as_exact() {
        Some(r) => *r <= BigRational::zero(),
        None => e.re() <= opts.tol,
    });
    if nonpositive && !spec.is_empty() {
        let upper = if all_exact {
            let max = spec
                .iter()
                .filter_map(Exponent::as_exact)
                .max()
                .expect("nonempty");
            let min = spec
                .iter()
                .filter_map(Exponent::as_exact)
                .min()
                .expect("nonempty");
            let b = (BigRational::from_integer(BigInt::from(q)) * max
                - BigRational::from_integer(BigInt::from(p)) * min)
                * BigRational::from_integer(BigInt::from(mm));
            floor_rational(&b)
        } else {
            let max = spec
                .iter()
                .map(Exponent::re)
                .fold(f64::NEG_INFINITY, f64::max);
            let min = spec.iter().map(Exponent::re).fold(f64::INFINITY, f64::min);
            ((q as f64 * max - p as f64 * min) * mm as f64 + opts.tol).floor() as i64
        };
        return DegreeWindow {
            lower,
            upper,
            degrees: (lower..=upper).collect(),
            status: WindowStatus::Proved,
        };
    }
    // l = (m-1)(sum k lambda + sum lambda_J - sum lambda_I) must be an integer
    let mut degrees = std::collections::BTreeSet::new();
    let uppers = multisets(spec.len(), ttype.p);
    let lowers = multisets(spec.len(), ttype.q);
    for order in 0..=opts.k_max {
        for k in compositions(spec.len(), order) {
            for u in &uppers {
                for d in &lowers {
                    let c = net_coefficients(&k, u, d);
                    let z: Complex64 = c
                        .iter()
                        .zip(spec)
                        .map(|(&cj, e)| e.to_complex() * cj as f64)
                        .sum::<Complex64>()
                        * mm as f64;
                    let r = z.re.round();
                    let scale = opts.tol * (1.0 + z.norm());
                    if (z.re - r).abs() <= scale && z.im.abs() <= scale && r as i64 >= lower {
                        degrees.insert(r as i64);
                    }
                }
            }
        }
    }
    let degrees: Vec<i64> = degrees.into_iter().collect();
    DegreeWindow {
        lower,
        upper: degrees.last().copied().unwrap_or(lower - 1),
        degrees,
        status: WindowStatus::Bounded,
    }
}

/// Orders `k` at which the fixed-point resonance has a solution. If every
/// eigenvalue has real part of one strict sign the order is bounded in closed
/// form; otherwise `k <= k_max`.
pub fn fixed_point_window(
    spec: &[Exponent],
    ttype: TensorType,
    k_max: u32,
    opts: &ResonanceOptions,
) -> DegreeWindow {
    let (p, q) = (ttype.p as f64, ttype.q as f64);
    let re: Vec<f64> = spec.iter().map(Exponent::re).collect();
    let min = re.iter().copied().fold(f64::INFINITY, f64::min);
    let max = re.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let analytic = if !spec.is_empty() && min > 0.0 {
        Some((p * max - q * min) / min)
    } else if !spec.is_empty() && max < 0.0 {
        Some((p * -min - q * -max) / -max)
    } else {
        None
    };
    let (bound, status) = match analytic {
        Some(b) if (b + 1e-9).floor() as i64 <= k_max as i64 => {
            ((b + 1e-9).floor() as i64, WindowStatus::Proved)
        }
        _ => (k_max as i64, WindowStatus::Bounded),
    };
    let degrees: Vec<i64> = (0..=bound)
        .filter(|&k| !enumerate_fixed_point(spec, ttype, k as u32, opts).is_empty())
        .collect();
    DegreeWindow {
        lower: 0,
        upper: bound,
        degrees,
        status,
    }
}
