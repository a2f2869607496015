//! Dense linear algebra for constraint systems: exact fraction-free
//! elimination over the rationals and a partially pivoted float fallback.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Pivot threshold for float elimination and the float zero test on tensors.
pub const PIVOT_TOL: f64 = 1e-9;

/// Same threshold, named for its use as a coefficient zero test.
pub const ZERO_TOL: f64 = PIVOT_TOL;

/// Row echelon form produced by Bareiss elimination.
#[derive(Debug, Clone)]
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    ncols: usize,
}

/// Scales a rational row to a primitive integer row with the same direction.
pub fn integerize(row: &[BigRational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
    make_primitive(ints)
}

fn make_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

fn bareiss(rows: &[Vec<BigRational>], ncols: usize) -> Echelon {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| integerize(r))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(sel) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let (head, tail) = m.split_at_mut(r + 1);
        let prow = &head[r];
        let piv = prow[c].clone();
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in (c + 1)..ncols {
                let v = &piv * &row[j] - &factor * &prow[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon {
        rows: m,
        pivots,
        ncols,
    }
}

impl Echelon {
    fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Solution with `x[free] = 1` and every other free variable zero.
    fn back_substitute(&self, free: usize) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); self.ncols];
        x[free] = BigRational::one();
        for (row, &pc) in self.rows.iter().zip(&self.pivots).rev() {
            let mut s = BigRational::zero();
            for j in (pc + 1)..self.ncols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s += BigRational::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -s / BigRational::from_integer(row[pc].clone());
        }
        x
    }
}

/// Basis of `{x : A x = 0}`, one vector per free column with that entry 1
/// and the other free entries 0. Columns are processed left to right.
pub fn nullspace_exact(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let e = bareiss(rows, ncols);
    e.free_columns()
        .into_iter()
        .map(|f| e.back_substitute(f))
        .collect()
}

pub fn rank_exact(rows: &[Vec<BigRational>], ncols: usize) -> usize {
    bareiss(rows, ncols).pivots.len()
}

/// Some `x` with `A x = b`, or `None` if inconsistent.
pub fn solve_exact(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let ncols = a.first().map(Vec::len).unwrap_or(0);
    let aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(-bi.clone());
            r
        })
        .collect();
    let e = bareiss(&aug, ncols + 1);
    if e.pivots.contains(&ncols) {
        return None;
    }
    let mut x = e.back_substitute(ncols);
    x.pop();
    Some(x)
}

/// Reduced row echelon form in floats. Rows are first scaled to unit
/// max-norm; pivots below [`PIVOT_TOL`] count as zero.
fn rref_float(rows: &[Vec<f64>], ncols: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    // cancellation residue such as (a + b) - a - b must not survive the
    // row scaling below, so entries tiny against the whole matrix go first
    let scale = rows.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .filter_map(|r| {
            let r: Vec<f64> = r
                .iter()
                .map(|&v| if v.abs() < PIVOT_TOL * scale { 0.0 } else { v })
                .collect();
            let mx = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            (mx > 0.0).then(|| r.iter().map(|v| v / mx).collect())
        })
        .collect();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let (sel, best) = (r..nrows)
            .map(|i| (i, m[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best < PIVOT_TOL {
            for row in m.iter_mut().skip(r) {
                row[c] = 0.0;
            }
            continue;
        }
        m.swap(r, sel);
        let piv = m[r][c];
        for v in m[r].iter_mut() {
            *v /= piv;
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c] == 0.0 {
                continue;
            }
            let f = row[c];
            for j in c..ncols {
                row[j] -= f * prow[j];
            }
            row[c] = 0.0;
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn nullspace_float(rows: &[Vec<f64>], ncols: usize) -> Vec<Vec<f64>> {
    let (m, pivots) = rref_float(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![0.0; ncols];
            x[f] = 1.0;
            for (row, &pc) in m.iter().zip(&pivots) {
                x[pc] = -row[f];
            }
            x
        })
        .collect()
}

pub fn rank_float(rows: &[Vec<f64>], ncols: usize) -> usize {
    rref_float(rows, ncols).1.len()
}

pub fn solve_float(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let ncols = a.first().map(Vec::len).unwrap_or(0);
    let aug: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(*bi);
            r
        })
        .collect();
    let (m, pivots) = rref_float(&aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![0.0; ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        x[pc] = row[ncols];
    }
    Some(x)
}

/// Returns `v` scaled to a primitive integer vector whose first nonzero entry
/// is positive.
pub fn primitive_direction(v: &[BigRational]) -> Vec<BigInt> {
    let mut ints = integerize(v);
    if ints
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        for x in &mut ints {
            *x = -&*x;
        }
    }
    ints
}
