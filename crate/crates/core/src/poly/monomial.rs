use std::cmp::Ordering;

/// Exponent vector `(k_1, ..., k_n)` of a monomial `x_1^k_1 ... x_n^k_n`.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// of `x_1`, then `x_2`, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `sum_j s_j k_j`.
    pub fn weighted_degree(&self, weights: &[u32]) -> i64 {
        self.0
            .iter()
            .zip(weights)
            .map(|(&k, &s)| k as i64 * s as i64)
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Exponent of `x_i` lowered by one, or `None` if `x_i` is absent.
    pub fn lower(&self, i: usize) -> Option<(u32, Monomial)> {
        let k = self.0[i];
        if k == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some((k, Monomial(e)))
    }

    /// Appends `extra` zero exponents.
    pub fn extend(&self, extra: usize) -> Monomial {
        let mut e = self.0.clone();
        e.extend(std::iter::repeat_n(0, extra));
        Monomial(e)
    }

    pub fn format_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &k) in self.0.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], k)),
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors in `n` variables of total degree exactly `d`,
/// in ascending graded-lex order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill_degree(&mut cur, 0, d, &mut out);
    out.sort();
    out
}

fn fill_degree(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Monomial>) {
    let n = cur.len();
    if n == 0 {
        if left == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = left;
        out.push(Monomial(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for k in 0..=left {
        cur[pos] = k;
        fill_degree(cur, pos + 1, left - k, out);
    }
    cur[pos] = 0;
}

/// All exponent vectors with `sum_j s_j k_j == w`. Variables of weight zero
/// would make the set infinite, so their exponents are capped at `zero_cap`.
pub fn monomials_of_weight(weights: &[u32], w: i64, zero_cap: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    if w < 0 {
        return out;
    }
    let mut cur = vec![0u32; weights.len()];
    fill_weight(weights, &mut cur, 0, w, zero_cap, &mut out);
    out.sort();
    out
}

fn fill_weight(
    weights: &[u32],
    cur: &mut Vec<u32>,
    pos: usize,
    left: i64,
    zero_cap: u32,
    out: &mut Vec<Monomial>,
) {
    if pos == weights.len() {
        if left == 0 {
            out.push(Monomial(cur.clone()));
        }
        return;
    }
    let s = weights[pos] as i64;
    let max_k = if s == 0 { zero_cap as i64 } else { left / s };
    for k in 0..=max_k {
        cur[pos] = k as u32;
        fill_weight(weights, cur, pos + 1, left - k * s, zero_cap, out);
    }
    cur[pos] = 0;
}
