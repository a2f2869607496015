//! Balances `Hc + g_m(c) = 0`, the Kovalevskaya matrix `K = H + Dg_m(c)`
//! and its exponents.

use std::collections::BTreeMap;

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::poly::{Mode, Polynomial, Scalar, VectorField};
use crate::spectrum::{self, Exponent};

/// Float balances must have residual below this.
pub const BALANCE_TOL: f64 = 1e-10;
/// Newton solutions closer than this (max-norm) are merged.
pub const DEDUP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BalanceOrigin {
    User,
    Rationalized,
    Newton,
}

/// A nonzero solution of `Hc + g_m(c) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Balance {
    pub c: Vec<Scalar>,
    pub residual: f64,
    pub origin: BalanceOrigin,
}

impl Balance {
    pub fn is_exact(&self) -> bool {
        self.c.iter().all(|s| s.mode() == Mode::Exact)
    }

    pub fn exact(c: Vec<BigRational>, origin: BalanceOrigin) -> Self {
        Balance {
            c: c.into_iter().map(Scalar::Exact).collect(),
            residual: 0.0,
            origin,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.c.iter().map(Scalar::to_f64).collect()
    }
}

#[derive(Debug, Clone)]
pub struct BalanceOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub max_denominator: u64,
    pub candidates: Vec<Vec<Scalar>>,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        BalanceOptions {
            n_starts: 200,
            seed: 0,
            max_denominator: 1_000_000,
            candidates: Vec::new(),
        }
    }
}

/// `K`, its spectrum and the eigenvector `Sc` of eigenvalue `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KovalevskayaData {
    pub k: Vec<Vec<Scalar>>,
    pub exponents: Vec<Exponent>,
    pub minus_one_witness: Option<Vec<Scalar>>,
}

impl KovalevskayaData {
    pub fn spectrum_is_exact(&self) -> bool {
        self.exponents.iter().all(Exponent::is_exact)
    }
}

fn h_scalars(g: &Grading, mode: Mode) -> Vec<Scalar> {
    g.h()
        .into_iter()
        .map(|h| Scalar::Exact(h).to_mode(mode))
        .collect()
}

/// `Hc + g_m(c)`.
pub fn balance_residual(g_m: &VectorField, g: &Grading, c: &[Scalar]) -> Result<Vec<Scalar>> {
    if c.len() != g_m.dim() || g.dim() != g_m.dim() {
        return Err(Error::DimensionMismatch {
            expected: g_m.dim(),
            found: c.len(),
        });
    }
    let mode = c.first().map(Scalar::mode).unwrap_or(Mode::Exact);
    let f = if mode == Mode::Float {
        g_m.to_float()
    } else {
        g_m.clone()
    };
    let h = h_scalars(g, mode);
    let vals = f.evaluate(c)?;
    Ok(vals
        .iter()
        .zip(h.iter().zip(c))
        .map(|(v, (hi, ci))| v + &(hi * ci))
        .collect())
}

fn max_norm(v: &[Scalar]) -> f64 {
    v.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
}

/// Verifies `c` exactly (exact mode) or within [`BALANCE_TOL`].
pub fn verify_balance(g_m: &VectorField, g: &Grading, c: &[Scalar]) -> Result<Balance> {
    if c.iter().all(Scalar::is_zero) {
        return Err(Error::UnverifiedBalance("zero vector".into()));
    }
    let r = balance_residual(g_m, g, c)?;
    let exact = c.iter().all(|s| s.mode() == Mode::Exact) && g_m.mode() == Mode::Exact;
    let ok = if exact {
        r.iter().all(Scalar::is_zero)
    } else {
        max_norm(&r) < BALANCE_TOL
    };
    if !ok {
        return Err(Error::UnverifiedBalance(format!(
            "residual {:e}",
            max_norm(&r)
        )));
    }
    Ok(Balance {
        c: c.to_vec(),
        residual: if exact { 0.0 } else { max_norm(&r) },
        origin: BalanceOrigin::User,
    })
}

struct NewtonSystem {
    n: usize,
    h: Vec<f64>,
    comps: Vec<Polynomial>,
    jac: Vec<Vec<Polynomial>>,
}

impl NewtonSystem {
    fn new(g_m: &VectorField, g: &Grading) -> Self {
        let f = g_m.to_float();
        NewtonSystem {
            n: f.dim(),
            h: g.h().iter().map(crate::poly::rational_to_f64).collect(),
            comps: f.components().to_vec(),
            jac: f.jacobian(),
        }
    }

    fn value(&self, z: &[Complex64]) -> DVector<Complex64> {
        DVector::from_fn(self.n, |i, _| {
            self.comps[i].eval_complex(z) + z[i] * self.h[i]
        })
    }

    fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            let d = self.jac[i][j].eval_complex(z);
            if i == j {
                d + self.h[i]
            } else {
                d
            }
        })
    }

    /// Damped Newton from `z0`; `None` on divergence or a singular limit.
    fn solve(&self, z0: Vec<Complex64>) -> Option<Vec<Complex64>> {
        let mut z = DVector::from_vec(z0);
        for _ in 0..100 {
            let fz = self.value(z.as_slice());
            let norm = fz.camax();
            if !norm.is_finite() || z.camax() > 1e8 {
                return None;
            }
            if norm < 1e-13 {
                break;
            }
            let jz = self.jacobian(z.as_slice());
            let step = jz.lu().solve(&fz)?;
            let mut t = 1.0;
            loop {
                let cand = &z - &step * Complex64::new(t, 0.0);
                if self.value(cand.as_slice()).camax() < norm || t < 1e-4 {
                    z = cand;
                    break;
                }
                t *= 0.5;
            }
        }
        if self.value(z.as_slice()).camax() > 1e-10 {
            return None;
        }
        let sv = self.jacobian(z.as_slice()).singular_values();
        let (mx, mn) = (sv.max(), sv.min());
        if mx == 0.0 || mn / mx < 1e-10 {
            return None;
        }
        Some(z.as_slice().to_vec())
    }
}

/// User candidates (verified), then multi-start Newton solutions with a
/// rationalization attempt. The zero vector is never returned.
pub fn find_balances(g_m: &VectorField, g: &Grading, opts: &BalanceOptions) -> Vec<Balance> {
    let n = g_m.dim();
    let mut out: Vec<Balance> = Vec::new();
    for cand in &opts.candidates {
        match verify_balance(g_m, g, cand) {
            Ok(b) => out.push(b),
            Err(e) => warn!("discarding supplied balance candidate: {e}"),
        }
    }
    if n == 0 {
        return out;
    }
    let sys = NewtonSystem::new(g_m, g);
    let coeff_max = g_m
        .components()
        .iter()
        .map(Polynomial::max_abs_coeff)
        .fold(0.0, f64::max);
    let coeff_min = g_m
        .components()
        .iter()
        .flat_map(|p| p.terms().map(|(_, c)| c.abs_f64()))
        .fold(f64::INFINITY, f64::min);
    let h_max = sys.h.iter().copied().fold(0.0, f64::max);
    let radius = if coeff_min.is_finite() && coeff_min > 0.0 {
        2.0 * (h_max.max(coeff_max) / coeff_min).max(1.0)
    } else {
        2.0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<Complex64>> = (0..opts.n_starts)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let r = radius * rng.random::<f64>().sqrt();
                    let th = rng.random::<f64>() * std::f64::consts::TAU;
                    Complex64::from_polar(r, th)
                })
                .collect()
        })
        .collect();
    let roots: Vec<Option<Vec<Complex64>>> =
        starts.into_par_iter().map(|z0| sys.solve(z0)).collect();
    let mut distinct: Vec<Vec<Complex64>> = Vec::new();
    for z in roots.into_iter().flatten() {
        if z.iter().map(|v| v.norm()).fold(0.0, f64::max) < DEDUP_TOL {
            continue;
        }
        if z.iter().any(|v| v.im.abs() > DEDUP_TOL) {
            debug!("skipping complex balance {z:?}");
            continue;
        }
        let dup = distinct.iter().any(|d| {
            d.iter()
                .zip(&z)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
                < DEDUP_TOL
        });
        if !dup {
            distinct.push(z);
        }
    }
    for z in distinct {
        let re: Vec<f64> = z.iter().map(|v| v.re).collect();
        // Newton converges slowly at multiple roots, so coarser denominators
        // are tried too; exact verification decides.
        let bal = rationalize_balance(g_m, g, &re, opts.max_denominator)
            .map(|mut b| {
                b.origin = BalanceOrigin::Rationalized;
                b
            })
            .or_else(|| {
                let c: Vec<Scalar> = re.iter().map(|&x| Scalar::Float(x)).collect();
                verify_balance(g_m, g, &c).ok().map(|mut b| {
                    b.origin = BalanceOrigin::Newton;
                    b
                })
            });
        match bal {
            Some(b) if !out.iter().any(|o| same_point(o, &b)) => out.push(b),
            Some(_) => {}
            None => debug!("Newton root {re:?} failed verification"),
        }
    }
    out.sort_by(|a, b| {
        a.origin.cmp(&b.origin).then_with(|| {
            a.c.iter()
                .zip(&b.c)
                .map(|(x, y)| x.cmp_value(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    out
}

fn rationalize_balance(
    g_m: &VectorField,
    g: &Grading,
    re: &[f64],
    max_den: u64,
) -> Option<Balance> {
    if g_m.mode() != Mode::Exact {
        return None;
    }
    let levels = [
        (max_den, 1e-9),
        (max_den.min(10_000), 1e-6),
        (max_den.min(1_000), 1e-5),
    ];
    for (den, tol) in levels {
        let q: Option<Vec<Scalar>> = re
            .iter()
            .map(|&x| spectrum::rationalize_within(x, den, tol).map(Scalar::Exact))
            .collect();
        if let Some(b) = q.and_then(|c| verify_balance(g_m, g, &c).ok()) {
            return Some(b);
        }
    }
    None
}

fn same_point(a: &Balance, b: &Balance) -> bool {
    if a.is_exact() && b.is_exact() {
        return a.c == b.c;
    }
    a.c.iter()
        .zip(&b.c)
        .all(|(x, y)| (x.to_f64() - y.to_f64()).abs() < DEDUP_TOL)
}

/// `K = H + Dg_m(c)`, its exponents and the witness `Sc` when nonzero.
pub fn kovalevskaya_matrix(
    g_m: &VectorField,
    g: &Grading,
    c: &Balance,
) -> Result<KovalevskayaData> {
    let n = g_m.dim();
    let mode = if c.is_exact() && g_m.mode() == Mode::Exact {
        Mode::Exact
    } else {
        Mode::Float
    };
    let field = if mode == Mode::Float {
        g_m.to_float()
    } else {
        g_m.clone()
    };
    let point: Vec<Scalar> = c.c.iter().map(|s| s.to_mode(mode)).collect();
    let h = h_scalars(g, mode);
    let jac = field.jacobian();
    let mut k = vec![vec![Scalar::zero(mode); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut v = jac[i][j].evaluate(&point)?;
            if i == j {
                v = &v + &h[i];
            }
            k[i][j] = v;
        }
    }
    let exponents = spectrum::eigenvalues(&k);
    let sc: Vec<Scalar> = point
        .iter()
        .zip(&g.weights)
        .map(|(ci, &s)| ci * &Scalar::from_int(s as i64, mode))
        .collect();
    let minus_one_witness = if sc.iter().all(Scalar::is_zero) {
        None
    } else {
        let ksc: Vec<Scalar> = (0..n)
            .map(|i| (0..n).fold(Scalar::zero(mode), |acc, j| &acc + &(&k[i][j] * &sc[j])))
            .collect();
        let defect: Vec<Scalar> = ksc.iter().zip(&sc).map(|(a, b)| a + b).collect();
        let ok = match mode {
            Mode::Exact => defect.iter().all(Scalar::is_zero),
            Mode::Float => max_norm(&defect) < 1e-8 * (1.0 + max_norm(&sc)),
        };
        if !ok {
            return Err(Error::Verification(format!(
                "K(Sc) != -Sc at balance, defect {:e}",
                max_norm(&defect)
            )));
        }
        Some(sc)
    };
    Ok(KovalevskayaData {
        k,
        exponents,
        minus_one_witness,
    })
}

/// The substitution `x = c + u` in `Hx + g_m(x)`: returns `(K, f)` with
/// `Hx + g_m(x) = Ku + f(u)` and `f` free of constant and linear terms.
pub fn variational_cut(
    g_m: &VectorField,
    g: &Grading,
    c: &Balance,
) -> Result<(Vec<Vec<Scalar>>, VectorField)> {
    if !c.is_exact() || g_m.mode() != Mode::Exact {
        return Err(Error::UnverifiedBalance(
            "variational cut needs an exact balance".into(),
        ));
    }
    let n = g_m.dim();
    let data = kovalevskaya_matrix(g_m, g, c)?;
    let h = h_scalars(g, Mode::Exact);
    let shift: BTreeMap<usize, Polynomial> = (0..n)
        .map(|i| {
            let p = &Polynomial::constant(n, c.c[i].clone()) + &Polynomial::var(n, i, Mode::Exact);
            (i, p)
        })
        .collect();
    let mut comps = Vec::with_capacity(n);
    for i in 0..n {
        let mut f = g_m.component(i).substitute(&shift)?;
        f = &f + &shift[&i].scale(&h[i])?;
        for j in 0..n {
            f = &f - &Polynomial::var(n, j, Mode::Exact).scale(&data.k[i][j])?;
        }
        if f.terms().any(|(m, _)| m.degree() <= 1) {
            return Err(Error::UnverifiedBalance(format!(
                "component {} keeps constant or linear terms after the shift",
                i + 1
            )));
        }
        comps.push(f);
    }
    Ok((data.k, VectorField::new(comps)?))
}
