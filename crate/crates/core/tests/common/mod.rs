#![allow(dead_code)]

use std::path::PathBuf;

use kova_core::dsl::{parse_system_with, SystemSpec};
use kova_core::invsearch::{build_ansatz, AnsatzMode};
use kova_core::poly::{Mode, Monomial, Polynomial, Scalar, VectorField};
use kova_core::tensor::{TensorField, TensorType};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn systems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems")
}

pub fn load(name: &str, mode: Mode) -> SystemSpec {
    let text = std::fs::read_to_string(systems_dir().join(name)).expect("bundled system");
    parse_system_with(&text, mode).expect("bundled system parses")
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rand_ratio(rng: &mut ChaCha8Rng, num: i64, den: i64) -> BigRational {
    loop {
        let a = rng.random_range(-num..=num);
        if a != 0 {
            return q(a, rng.random_range(1..=den));
        }
    }
}

/// Random polynomial with roughly `density` of the monomials of degree
/// `lo..=hi` present, integer coefficients in `[-c, c]`.
pub fn rand_poly(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: u32,
    hi: u32,
    density: f64,
    c: i64,
) -> Polynomial {
    let mut terms = Vec::new();
    for d in lo..=hi {
        for m in kova_core::poly::monomials_of_degree(n, d) {
            if rng.random::<f64>() < density {
                let v = rng.random_range(-c..=c);
                terms.push((m, Scalar::from_int(v, Mode::Exact)));
            }
        }
    }
    Polynomial::from_terms(n, Mode::Exact, terms).unwrap()
}

pub fn rand_field(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: u32,
    hi: u32,
    density: f64,
    c: i64,
) -> VectorField {
    VectorField::new(
        (0..n)
            .map(|_| rand_poly(rng, n, lo, hi, density, c))
            .collect(),
    )
    .unwrap()
}

/// Random element of an ansatz space with small rational coefficients.
pub fn rand_in_space(
    rng: &mut ChaCha8Rng,
    ttype: TensorType,
    mode: AnsatzMode,
    n: usize,
    density: f64,
) -> TensorField {
    let space = build_ansatz(ttype, mode, n, 8).unwrap();
    let mut comps = Vec::new();
    for (idx, m) in &space.slots {
        if rng.random::<f64>() < density {
            let c = Scalar::Exact(rand_ratio(rng, 5, 3));
            comps.push((idx.clone(), Polynomial::term(m.clone(), c)));
        }
    }
    TensorField::from_components(n, ttype, Mode::Exact, comps).unwrap()
}

/// Random quasi-homogeneous field of weights `s` and degree `m`.
pub fn rand_qh_field(rng: &mut ChaCha8Rng, s: &[u32], m: u32, density: f64) -> VectorField {
    let n = s.len();
    let mode = AnsatzMode::Graded {
        weights: s.to_vec(),
        degree: m as i64 - 1,
        zero_weight_cap: 2,
    };
    let t = rand_in_space(rng, TensorType::new(1, 0), mode, n, density);
    VectorField::new((0..n).map(|i| t.component(&[i])).collect()).unwrap()
}

pub fn mono(e: &[u32]) -> Monomial {
    Monomial::new(e.to_vec())
}

pub fn ex(n: i64) -> Scalar {
    Scalar::from_int(n, Mode::Exact)
}
