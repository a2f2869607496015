//! Numeric cross-check of invariance: integrate the flow with its Jacobian,
//! pull the tensor back and differentiate in time.

use log::debug;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::kovalevskaya::Balance;
use crate::poly::{rational_to_f64, Polynomial, VectorField};
use crate::tensor::TensorField;

/// Residuals below this count as invariant.
pub const INVARIANT_TOL: f64 = 1e-6;
/// Residuals above this count as not invariant.
pub const NON_INVARIANT_TOL: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub samples: usize,
    /// RK4 step; the time stencil uses `±h` and `±2h`.
    pub h: f64,
    pub seed: u64,
    /// Half-width of the sample box `[-r, r]^n`.
    pub box_radius: f64,
    /// Coordinates closer than this to zero are resampled.
    pub axis_exclusion: f64,
    pub escape_norm: f64,
    pub max_retries: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            samples: 20,
            h: 1e-3,
            seed: 0,
            box_radius: 1.0,
            axis_exclusion: 1e-3,
            escape_norm: 1e6,
            max_retries: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Invariant,
    NotInvariant,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Max over samples and components of the pullback time derivative.
    pub invariance_residual: f64,
    /// Max deviation of that derivative from the symbolic `L_F T`.
    pub agreement_residual: f64,
    pub samples: usize,
    pub resampled: usize,
    pub max_condition: f64,
    pub verdict: Verdict,
}

/// RK4 integration of `x' = F(x)`, `Phi' = DF(x) Phi` from `(x0, I)`.
pub struct FlowIntegrator<'a> {
    field: &'a VectorField,
    jac: Vec<Vec<Polynomial>>,
}

impl<'a> FlowIntegrator<'a> {
    pub fn new(field: &'a VectorField) -> Self {
        FlowIntegrator {
            field,
            jac: field.jacobian(),
        }
    }

    fn rhs(&self, x: &[f64], phi: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
        let n = x.len();
        let fx = self.field.eval_f64(x);
        let j = DMatrix::from_fn(n, n, |a, b| self.jac[a][b].eval_f64(x));
        (fx, j * phi)
    }

    /// Flow point and Jacobian after `steps` RK4 steps of size `dt`.
    pub fn integrate(&self, x0: &[f64], dt: f64, steps: usize) -> (Vec<f64>, DMatrix<f64>) {
        let n = x0.len();
        let mut x = x0.to_vec();
        let mut phi = DMatrix::<f64>::identity(n, n);
        let axpy = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> {
            x.iter().zip(k).map(|(a, b)| a + s * b).collect()
        };
        for _ in 0..steps {
            let (k1, m1) = self.rhs(&x, &phi);
            let (k2, m2) = self.rhs(&axpy(&x, &k1, dt / 2.0), &(&phi + &m1 * (dt / 2.0)));
            let (k3, m3) = self.rhs(&axpy(&x, &k2, dt / 2.0), &(&phi + &m2 * (dt / 2.0)));
            let (k4, m4) = self.rhs(&axpy(&x, &k3, dt), &(&phi + &m3 * dt));
            for i in 0..n {
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            phi += (m1 + m2 * 2.0 + m3 * 2.0 + m4) * (dt / 6.0);
        }
        (x, phi)
    }
}

/// `(phi^* T)(x0)` from the dense value of `T` at `phi(x0)`: contravariant
/// slots take `Phi^{-1}`, covariant slots take `Phi`.
fn pull_back(
    dense: &[f64],
    n: usize,
    p: usize,
    q: usize,
    inv: &DMatrix<f64>,
    fwd: &DMatrix<f64>,
) -> Vec<f64> {
    let rank = p + q;
    let mut cur = dense.to_vec();
    let strides: Vec<usize> = (0..rank).map(|r| n.pow((rank - 1 - r) as u32)).collect();
    for r in 0..rank {
        let mut next = vec![0.0; cur.len()];
        for (flat, out) in next.iter_mut().enumerate() {
            let ir = (flat / strides[r]) % n;
            let base = flat - ir * strides[r];
            let mut s = 0.0;
            for a in 0..n {
                let w = if r < p { inv[(ir, a)] } else { fwd[(a, ir)] };
                if w != 0.0 {
                    s += w * cur[base + a * strides[r]];
                }
            }
            *out = s;
        }
        cur = next;
    }
    cur
}

/// Time derivative at 0 of the pulled-back tensor, by the fourth-order
/// central stencil over `±h, ±2h`. Also returns the worst Jacobian
/// condition number met.
pub fn pullback_derivative(
    f: &VectorField,
    t: &TensorField,
    x0: &[f64],
    h: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = f.dim();
    let (p, q) = (t.ttype().p, t.ttype().q);
    let flow = FlowIntegrator::new(f);
    let mut vals = Vec::with_capacity(4);
    let mut cond: f64 = 1.0;
    for (dt, steps) in [(h, 2usize), (h, 1), (-h, 1), (-h, 2)] {
        let (x, phi) = flow.integrate(x0, dt, steps);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Oracle("trajectory left the finite range".into()));
        }
        let sv = phi.clone().singular_values();
        cond = cond.max(sv.max() / sv.min());
        let inv = phi
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Oracle("singular flow Jacobian".into()))?;
        vals.push(pull_back(&t.eval_dense(&x), n, p, q, &inv, &phi));
    }
    let d = (0..vals[0].len())
        .map(|i| (-vals[0][i] + 8.0 * vals[1][i] - 8.0 * vals[2][i] + vals[3][i]) / (12.0 * h))
        .collect();
    Ok((d, cond))
}

fn sample_point(rng: &mut ChaCha8Rng, n: usize, opts: &OracleOptions) -> Vec<f64> {
    (0..n)
        .map(|_| loop {
            let v = rng.random_range(-opts.box_radius..=opts.box_radius);
            if v.abs() >= opts.axis_exclusion {
                break v;
            }
        })
        .collect()
}

fn escapes(f: &VectorField, x0: &[f64], opts: &OracleOptions) -> bool {
    let flow = FlowIntegrator::new(f);
    [2.0 * opts.h, -2.0 * opts.h].iter().any(|&tau| {
        let (x, _) = flow.integrate(x0, tau / 2.0, 2);
        x.iter()
            .any(|v| !v.is_finite() || v.abs() > opts.escape_norm)
    })
}

/// Compares the pullback derivative with zero and with the symbolic Lie
/// derivative at random points of the sample box.
pub fn flow_pullback_residual(
    f: &VectorField,
    t: &TensorField,
    opts: &OracleOptions,
) -> Result<OracleReport> {
    if f.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: t.dim(),
        });
    }
    let ff = f.to_float();
    let tf = t.to_float();
    let lie = tf.lie_derivative(&ff)?;
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut points = Vec::with_capacity(opts.samples);
    let mut resampled = 0;
    while points.len() < opts.samples {
        let x0 = sample_point(&mut rng, n, opts);
        if escapes(&ff, &x0, opts) {
            resampled += 1;
            if resampled > opts.max_retries {
                return Err(Error::Oracle(format!(
                    "{resampled} sample points escaped beyond norm {:e}",
                    opts.escape_norm
                )));
            }
            continue;
        }
        points.push(x0);
    }
    let per_point: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|x0| -> Result<(f64, f64, f64)> {
            let (d, cond) = pullback_derivative(&ff, &tf, x0, opts.h)?;
            let sym = lie.eval_dense(x0);
            let inv = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let agree = d
                .iter()
                .zip(&sym)
                .fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
            Ok((inv, agree, cond))
        })
        .collect::<Result<_>>()?;
    let invariance_residual = per_point.iter().map(|r| r.0).fold(0.0, f64::max);
    let agreement_residual = per_point.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_condition = per_point.iter().map(|r| r.2).fold(1.0, f64::max);
    debug!("oracle: max flow Jacobian condition number {max_condition:.3e}");
    let verdict = if invariance_residual < INVARIANT_TOL {
        Verdict::Invariant
    } else if invariance_residual > NON_INVARIANT_TOL {
        Verdict::NotInvariant
    } else {
        Verdict::Inconclusive
    };
    Ok(OracleReport {
        invariance_residual,
        agreement_residual,
        samples: points.len(),
        resampled,
        max_condition,
        verdict,
    })
}

/// Max defect of `x0(t) = t^{-H} c` as a solution of `x' = g_m(x)` on 100
/// points of `t in [1, 2]`.
pub fn scale_invariant_solution_check(g_m: &VectorField, g: &Grading, c: &Balance) -> f64 {
    let h: Vec<f64> = g.h().iter().map(rational_to_f64).collect();
    let cf = c.to_f64();
    let gf = g_m.to_float();
    let mut worst: f64 = 0.0;
    for s in 0..100 {
        let t = 1.0 + s as f64 / 99.0;
        let x: Vec<f64> = cf.iter().zip(&h).map(|(ci, hi)| ci * t.powf(-hi)).collect();
        let dx: Vec<f64> = cf
            .iter()
            .zip(&h)
            .map(|(ci, hi)| -hi * ci * t.powf(-hi - 1.0))
            .collect();
        let gx = gf.eval_f64(&x);
        for (a, b) in dx.iter().zip(&gx) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}
