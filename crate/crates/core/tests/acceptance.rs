//! Acceptance criteria, one line per criterion. Runs as a plain binary so
//! the verdicts are always printed.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use kova_core::grading::{decompose, find_weights, Grading, Sign};
use kova_core::invsearch::{
    build_ansatz, diagonal_linear_field, full_scan, proportional, solve_invariants, AnsatzMode,
    ScanOptions, ScanReport, ScanTarget,
};
use kova_core::kovalevskaya::{
    find_balances, kovalevskaya_matrix, Balance, BalanceOptions, BalanceOrigin,
};
use kova_core::oracle::{flow_pullback_residual, pullback_derivative, OracleOptions};
use kova_core::poly::{monomials_of_weight, Mode, Monomial, Polynomial, Scalar, VectorField};
use kova_core::resonance::{
    admissible_degree_window, enumerate_fixed_point, fixed_point_window, ResonanceOptions,
    WindowStatus,
};
use kova_core::spectrum::{eigenvalues, Exponent};
use kova_core::tensor::{trivial_family_basis_capped, TensorField, TensorType};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(start: Instant, limit: f64) -> Result<f64, String> {
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < limit, "took {secs:.2}s, limit {limit}s");
    Ok(secs)
}

fn rats(v: &[(i64, i64)]) -> Vec<BigRational> {
    v.iter().map(|&(n, d)| q(n, d)).collect()
}

fn exact_spectrum(e: &[Exponent]) -> Option<Vec<BigRational>> {
    let mut v: Vec<BigRational> = e
        .iter()
        .map(|x| x.as_exact().cloned())
        .collect::<Option<_>>()?;
    v.sort();
    Some(v)
}

fn same_point(b: &Balance, c: &[BigRational]) -> bool {
    b.is_exact() && b.c.iter().zip(c).all(|(x, y)| x.as_exact() == Some(y))
}

fn identity(n: usize) -> TensorField {
    let comps = (0..n).map(|i| (vec![i, i], Polynomial::one(n, Mode::Exact)));
    TensorField::from_components(n, TensorType::new(1, 1), Mode::Exact, comps).unwrap()
}

fn no_quotient() -> ScanOptions {
    ScanOptions {
        quotient_trivial: false,
        extra_degrees: vec![-1, 0, 1, 2],
        ..ScanOptions::default()
    }
}

struct Graded {
    field: VectorField,
    decomposition: kova_core::grading::SemiQhDecomposition,
    balances: Vec<Balance>,
}

fn graded(name: &str, grading: &Grading) -> Result<Graded, String> {
    let field = load(name, Mode::Exact).to_vector_field().map_err(err)?;
    let decomposition = decompose(&field, grading).map_err(err)?;
    let balances = find_balances(&decomposition.cut, grading, &BalanceOptions::default());
    Ok(Graded {
        field,
        decomposition,
        balances,
    })
}

// 1. Lotka-Volterra golden values.
fn lotka_golden() -> Check {
    let start = Instant::now();
    let field = load("lotka.kova", Mode::Exact)
        .to_vector_field()
        .map_err(err)?;
    let found = find_weights(&field, 3, 4);
    let first = found.first().ok_or("no grading found")?;
    ensure!(
        first.grading.weights == [1, 1, 1] && first.grading.degree == 2 && first.sign == Sign::Pure,
        "first grading is {:?}",
        first.grading
    );
    let g = graded("lotka.kova", &first.grading)?;
    let target = rats(&[(0, 1), (-1, 1), (0, 1)]);
    let b = g
        .balances
        .iter()
        .find(|b| same_point(b, &target))
        .ok_or("exact balance (0,-1,0) not found")?;
    let k = kovalevskaya_matrix(&g.decomposition.cut, &first.grading, b).map_err(err)?;
    let expected = [[-1, 0, 0], [1, -1, -3], [0, 0, -2]];
    for (row, want) in k.k.iter().zip(expected) {
        for (x, w) in row.iter().zip(want) {
            ensure!(x.as_exact() == Some(&q(w, 1)), "K = {:?}", k.k);
        }
    }
    let spec = exact_spectrum(&k.exponents).ok_or("inexact spectrum")?;
    ensure!(
        spec == rats(&[(-2, 1), (-1, 1), (-1, 1)]),
        "spectrum {spec:?}"
    );
    ensure!(k.minus_one_witness.is_some(), "no -1 witness");
    let secs = within(start, 1.0)?;
    Ok(format!(
        "weights (1,1,1), m=2, c=(0,-1,0), exponents -1,-1,-2 in {secs:.2}s"
    ))
}

fn lotka_scan(ttype: TensorType) -> Result<(ScanReport, Graded), String> {
    let grading = Grading::new(vec![1, 1, 1], 2).map_err(err)?;
    let g = graded("lotka.kova", &grading)?;
    let target = rats(&[(0, 1), (-1, 1), (0, 1)]);
    let b = g
        .balances
        .iter()
        .find(|b| same_point(b, &target))
        .ok_or("balance missing")?;
    let k = kovalevskaya_matrix(&g.decomposition.cut, &grading, b).map_err(err)?;
    let t = ScanTarget::Graded {
        decomposition: &g.decomposition,
        exponents: &k.exponents,
    };
    let report = full_scan(&g.field, t, ttype, &no_quotient()).map_err(err)?;
    Ok((report, g))
}

fn dims(r: &ScanReport, degrees: &[i64]) -> Vec<usize> {
    degrees
        .iter()
        .map(|&l| r.dimension_at(l).unwrap_or(0))
        .collect()
}

// 2. Lotka-Volterra invariant scans.
fn lotka_scans() -> Check {
    let start = Instant::now();
    let ls = [-1, 0, 1, 2];

    let (s00, _) = lotka_scan(TensorType::new(0, 0))?;
    ensure!(
        dims(&s00, &ls) == [0, 1, 0, 0],
        "(0,0) dims {:?}",
        dims(&s00, &ls)
    );

    let (s11, _) = lotka_scan(TensorType::new(1, 1))?;
    ensure!(
        dims(&s11, &ls) == [0, 1, 0, 0],
        "(1,1) dims {:?}",
        dims(&s11, &ls)
    );
    let at0 = s11.results.iter().find(|r| r.degree == 0).unwrap();
    ensure!(
        proportional(&at0.basis.basis[0], &identity(3)),
        "(1,1) l=0 is not the identity"
    );

    let (s10, g) = lotka_scan(TensorType::new(1, 0))?;
    ensure!(
        dims(&s10, &ls) == [0, 0, 1, 0],
        "(1,0) dims {:?}",
        dims(&s10, &ls)
    );
    let at1 = s10.results.iter().find(|r| r.degree == 1).unwrap();
    let f = TensorField::from_vector_field(&g.field);
    ensure!(
        proportional(&at1.basis.basis[0], &f),
        "(1,0) l=1 is not the field"
    );

    let grading = Grading::new(vec![1, 1, 1], 2).unwrap();
    let mut empty = 0;
    for p in 0..=2usize {
        for qq in (3 * p / 2 + 1)..=4 {
            let ttype = TensorType::new(p, qq);
            let w = admissible_degree_window(
                &s10.spectrum,
                2,
                ttype,
                &grading.weights,
                &ResonanceOptions::default(),
            );
            ensure!(
                w.is_empty() && w.status == WindowStatus::Proved,
                "({p},{qq}) window {}",
                w.describe()
            );
            ensure!(w.describe() == "window empty (proved)", "{}", w.describe());
            empty += 1;
        }
    }
    let secs = within(start, 30.0)?;
    Ok(format!(
        "dims (0,0) 0,1,0,0 (1,1) 0,1,0,0 (1,0) 0,0,1,0; {empty} types with q > 3p/2 proved empty in {secs:.2}s"
    ))
}

// 3. Perturbed oregonator.
fn oregonator() -> Check {
    let start = Instant::now();
    let spec = load("oregonator_full.kova", Mode::Exact);
    let p = spec.param_values().map_err(err)?;
    let val = |k: &str| p[k].as_exact().cloned().unwrap();
    let (alpha, g, beta, e) = (val("alpha"), val("g"), val("beta"), val("e"));
    let ga2 = &g * &alpha * &alpha;
    ensure!(ga2 > q(1, 1) && ga2 < q(3, 1), "g*alpha^2 = {ga2}");
    let abe = &alpha * &beta * &e;
    ensure!(abe < q(2, 1), "alpha*beta*e = {abe}");
    let inv = alpha.recip();
    let r1 = (&alpha * &g + &inv) / (&beta * &e);
    let r2 = (q(2, 1) * &alpha * &g + &inv) / (&beta * &e);
    ensure!(
        !r1.is_integer() && !r2.is_integer(),
        "integer ratio {r1} or {r2}"
    );

    let field = spec.to_vector_field().map_err(err)?;
    let found = find_weights(&field, 3, 4);
    ensure!(
        found.iter().any(|m| m.grading.weights == [1, 1, 0]
            && m.grading.degree == 2
            && m.sign == Sign::Negative),
        "(1,1,0) m=2 negative not among {} gradings",
        found.len()
    );
    let grading = Grading::new(vec![1, 1, 0], 2).unwrap();
    let gr = graded("oregonator_full.kova", &grading)?;
    let cut = load("oregonator.kova", Mode::Exact)
        .to_vector_field()
        .map_err(err)?;
    ensure!(gr.decomposition.cut == cut, "cut differs");
    ensure!(
        gr.decomposition.sign == Sign::Negative,
        "sign {:?}",
        gr.decomposition.sign
    );

    let target = rats(&[(1, 1), (-1, 1), (10, 7)]);
    let b = gr
        .balances
        .iter()
        .find(|b| same_point(b, &target))
        .ok_or("balance (1,-1,10/7) not found")?;
    let k = kovalevskaya_matrix(&cut, &grading, b).map_err(err)?;
    let spectrum = exact_spectrum(&k.exponents).ok_or("inexact spectrum")?;
    ensure!(
        spectrum == rats(&[(-1, 1), (-1, 1), (-7, 10)]),
        "spectrum {spectrum:?}"
    );

    let scan = |ttype| {
        let t = ScanTarget::Graded {
            decomposition: &gr.decomposition,
            exponents: &k.exponents,
        };
        full_scan(&gr.field, t, ttype, &no_quotient()).map_err(err)
    };
    let ls = [-1, 0, 1, 2];
    let s10 = scan(TensorType::new(1, 0))?;
    let total: usize = dims(&s10, &ls).iter().sum();
    ensure!(total == 2, "(1,0) dims {:?}", dims(&s10, &ls));
    let tz = TensorField::from_components(
        3,
        TensorType::new(1, 0),
        Mode::Exact,
        [(
            vec![2],
            Polynomial::from_terms(
                3,
                Mode::Exact,
                [
                    (mono(&[0, 0, 1]), Scalar::Exact(q(7, 10))),
                    (mono(&[0, 0, 0]), ex(-1)),
                ],
            )
            .unwrap(),
        )],
    )
    .unwrap();
    let found_t = s10
        .results
        .iter()
        .flat_map(|r| &r.basis.basis)
        .any(|t| proportional(t, &tz));
    ensure!(found_t, "(7/10 z - 1) d/dz not found");

    let s11 = scan(TensorType::new(1, 1))?;
    let all: Vec<&TensorField> = s11.results.iter().flat_map(|r| &r.basis.basis).collect();
    ensure!(
        all.len() == 1 && proportional(all[0], &identity(3)),
        "(1,1) has {} invariants",
        all.len()
    );
    let secs = within(start, 30.0)?;
    Ok(format!(
        "parameter conditions hold, c=(1,-1,10/7), exponents -1,-1,-7/10, (1,0) dimension 2, (1,1) identity only in {secs:.2}s"
    ))
}

// 4. Linear system with an irrational eigenvalue ratio.
fn artificial() -> Check {
    let start = Instant::now();
    let field = load("artificial.kova", Mode::Float)
        .to_vector_field()
        .map_err(err)?;
    let spec = eigenvalues(&field.linear_part());
    let opts = ResonanceOptions::default();
    for k in 1..=6 {
        let sols = enumerate_fixed_point(&spec, TensorType::new(0, 0), k, &opts);
        ensure!(sols.is_empty(), "order {k} has {} resonances", sols.len());
    }
    let dim = |ttype, mode| -> Result<usize, String> {
        let space = build_ansatz(ttype, mode, 2, 8).map_err(err)?;
        Ok(solve_invariants(&field, &space, false)
            .map_err(err)?
            .dimension)
    };
    let d10 = dim(TensorType::new(1, 0), AnsatzMode::TotalDegree(1))?;
    let d11 = dim(TensorType::new(1, 1), AnsatzMode::TotalDegree(0))?;
    let d20 = dim(TensorType::new(2, 0), AnsatzMode::TotalDegree(2))?;
    ensure!(
        d10 == 2 && d11 == 2 && d20 == 4,
        "dims (1,0) {d10} (1,1) {d11} (2,0) {d20}"
    );
    let mut empty = 0;
    for p in 0..=3usize {
        for qq in (p + 1)..=4 {
            let w = fixed_point_window(&spec, TensorType::new(p, qq), 6, &opts);
            ensure!(w.is_empty(), "({p},{qq}) window {}", w.describe());
            empty += 1;
        }
    }
    let secs = within(start, 5.0)?;
    Ok(format!(
        "no scalar resonance for k=1..6, dims 2/2/4, {empty} windows with q > p empty in {secs:.2}s"
    ))
}

fn eval_exact(p: &Polynomial, x: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        let mut t = c.as_exact().unwrap().clone();
        for (xi, &e) in x.iter().zip(m.exponents()) {
            for _ in 0..e {
                t *= xi;
            }
        }
        acc += t;
    }
    acc
}

// Derivative by hand from the exponent vectors.
fn d_exact(p: &Polynomial, j: usize, x: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        let e = m.exponents();
        if e[j] == 0 {
            continue;
        }
        let mut t = c.as_exact().unwrap() * BigRational::from_integer(BigInt::from(e[j]));
        for (i, xi) in x.iter().enumerate() {
            let k = if i == j { e[i] - 1 } else { e[i] };
            for _ in 0..k {
                t *= xi;
            }
        }
        acc += t;
    }
    acc
}

// 5. Kovalevskaya matrix has Sc as eigenvector of -1.
fn kovalevskaya_witness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 25 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(2..=3u32);
        let mut s: Vec<u32> = (0..n).map(|_| rng.random_range(1..=3)).collect();
        s[0] = 1;
        let grading = Grading::new(s.clone(), m).map_err(err)?;
        let h = grading.h();
        let c: Vec<BigRational> = (0..n).map(|_| rand_ratio(&mut rng, 4, 3)).collect();
        let g0 = rand_qh_field(&mut rng, &s, m, 0.5);
        let mut comps = Vec::new();
        for j in 0..n {
            let w = (m + s[j] - 1) as i64;
            let pool = monomials_of_weight(&s, w, 2);
            let mu = pool[rng.random_range(0..pool.len())].clone();
            let gj = g0.component(j).clone();
            let r = &h[j] * &c[j] + eval_exact(&gj, &c);
            let mu_poly = Polynomial::term(mu.clone(), ex(1));
            let coef = -(r / eval_exact(&mu_poly, &c));
            comps.push(
                gj.add(&mu_poly.scale(&Scalar::Exact(coef)).unwrap())
                    .unwrap(),
            );
        }
        let gm = VectorField::new(comps).unwrap();
        for j in 0..n {
            let r = &h[j] * &c[j] + eval_exact(gm.component(j), &c);
            ensure!(r.is_zero(), "constructed balance has residual {r}");
        }
        let b = Balance::exact(c.clone(), BalanceOrigin::User);
        let data = kovalevskaya_matrix(&gm, &grading, &b).map_err(err)?;
        let sc: Vec<BigRational> = (0..n).map(|i| q(s[i] as i64, 1) * &c[i]).collect();
        for i in 0..n {
            let mut row = BigRational::zero();
            for j in 0..n {
                let mut want = d_exact(gm.component(i), j, &c);
                if i == j {
                    want += &h[i];
                }
                let got = data.k[i][j].as_exact().ok_or("inexact K")?;
                ensure!(*got == want, "K[{i}][{j}] = {got}, expected {want}");
                row += got * &sc[j];
            }
            ensure!(row == -&sc[i], "(K Sc)_{i} = {row}, expected {}", -&sc[i]);
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} random quasi-homogeneous systems with K Sc = -Sc exactly"
    ))
}

fn rho_power(n: usize, e: i64) -> Polynomial {
    let mut exps = vec![0u32; n + 1];
    exps[n] = e as u32;
    Polynomial::term(Monomial::new(exps), ex(1))
}

// 6. Weighted scaling identity for the Lie derivative.
fn scaling_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let types = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)];
    let (mut pairs, mut compared) = (0, 0);
    while pairs < 25 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(2..=3u32);
        let s: Vec<u32> = (0..n).map(|_| rng.random_range(0..=2)).collect();
        if s.iter().all(|&w| w == 0) {
            continue;
        }
        let gm = rand_qh_field(&mut rng, &s, m, 0.6);
        let (p, qq) = types[rng.random_range(0..types.len())];
        let ttype = TensorType::new(p, qq);
        let smax = *s.iter().max().unwrap() as i64;
        let smin = *s.iter().min().unwrap() as i64;
        let lo = qq as i64 * smin - p as i64 * smax;
        let r = rng.random_range(lo..=lo + 3);
        let mode = AnsatzMode::Graded {
            weights: s.clone(),
            degree: r,
            zero_weight_cap: 2,
        };
        let t = rand_in_space(&mut rng, ttype, mode, n, 0.5);
        if t.is_zero() || gm.is_zero() {
            continue;
        }
        let lt = t.lie_derivative(&gm).map_err(err)?;
        let images: Vec<Polynomial> = (0..n)
            .map(|i| {
                Polynomial::var(n + 1, i, Mode::Exact)
                    .mul(&rho_power(n, s[i] as i64))
                    .unwrap()
            })
            .collect();
        for (idx, comp) in lt.components() {
            let up: i64 = idx[..p].iter().map(|&i| s[i] as i64).sum();
            let down: i64 = idx[p..].iter().map(|&i| s[i] as i64).sum();
            let e = r + m as i64 - 1 + up;
            ensure!(e >= 0, "component {idx:?} has negative weight");
            let lhs = comp
                .compose(&images)
                .unwrap()
                .mul(&rho_power(n, down))
                .unwrap();
            let rhs = comp.extend_vars(1).mul(&rho_power(n, e)).unwrap();
            ensure!(
                lhs == rhs,
                "scaling fails at {idx:?} for type ({p},{qq}), r={r}"
            );
            compared += 1;
        }
        pairs += 1;
    }
    Ok(format!(
        "{pairs} random pairs, {compared} components scale with rho^(r+m-1)"
    ))
}

// 7. Trivial family invariance.
fn trivial_family() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in 0..=3usize {
        for trial in 0..50 {
            let n = if p == 3 { 2 } else { rng.random_range(2..=3) };
            let f = rand_field(&mut rng, n, 0, 3, 0.4, 4);
            for t in trivial_family_basis_capped(p, n, 8).map_err(err)? {
                let (ok, _) = t.is_invariant(&f).map_err(err)?;
                ensure!(ok, "p={p}, field {trial} breaks a trivial tensor");
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut p4 = 0;
    for _ in 0..50 {
        let f = rand_field(&mut rng, 2, 0, 2, 0.4, 4);
        let all = trivial_family_basis_capped(4, 2, 8)
            .map_err(err)?
            .iter()
            .all(|t| t.is_invariant(&f).map(|r| r.0).unwrap_or(false));
        p4 += all as usize;
    }
    Ok(format!(
        "p=0..3 invariant for 50 fields each; p=4 (reported only) {p4}/50"
    ))
}

// 8. Flow oracle agrees with the symbolic Lie derivative.
fn oracle_agreement() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let types = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)];
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let f = rand_field(&mut rng, 2, 0, 2, 0.6, 2);
        let (p, qq) = types[i % types.len()];
        let t = rand_in_space(
            &mut rng,
            TensorType::new(p, qq),
            AnsatzMode::TotalDegreeWindow(0, 2),
            2,
            0.4,
        );
        let opts = OracleOptions {
            seed: i as u64,
            ..OracleOptions::default()
        };
        let r = flow_pullback_residual(&f, &t, &opts).map_err(err)?;
        worst = worst.max(r.agreement_residual);
    }
    ensure!(worst < 1e-6, "worst agreement residual {worst:e}");

    // fourth-order convergence on a non-invariant pair
    let f = VectorField::new(vec![
        Polynomial::from_terms(
            2,
            Mode::Exact,
            [(mono(&[1, 1]), ex(1)), (mono(&[0, 0]), ex(1))],
        )
        .unwrap(),
        Polynomial::from_terms(
            2,
            Mode::Exact,
            [(mono(&[2, 0]), ex(1)), (mono(&[0, 1]), ex(-1))],
        )
        .unwrap(),
    ])
    .unwrap();
    let t = TensorField::from_components(
        2,
        TensorType::new(0, 1),
        Mode::Exact,
        [(vec![0], Polynomial::term(mono(&[2, 0]), ex(1)))],
    )
    .unwrap();
    let x0 = [0.3, -0.2];
    let exact = t.lie_derivative(&f).map_err(err)?.eval_dense(&x0);
    let error = |h: f64| -> Result<f64, String> {
        let (d, _) = pullback_derivative(&f, &t, &x0, h).map_err(err)?;
        Ok(d.iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    };
    let ratio = error(0.2)? / error(0.1)?;
    ensure!(
        (12.0..=20.0).contains(&ratio),
        "halving h reduced the error by {ratio:.2}"
    );
    let secs = start.elapsed().as_secs_f64();
    Ok(format!(
        "50 pairs, worst agreement {worst:.1e}; halving h cuts error {ratio:.1}x ({secs:.2}s)"
    ))
}

// 9. Nonzero invariant spaces only at resonant degrees.
fn necessity() -> Check {
    let mut reports: Vec<(String, ScanReport)> = Vec::new();
    let types = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)];
    let opts = no_quotient();
    let mut add = |name: &str, r: Result<ScanReport, String>| -> Result<(), String> {
        reports.push((name.to_string(), r?));
        Ok(())
    };
    for (p, qq) in types {
        let (r, _) = lotka_scan(TensorType::new(p, qq))?;
        add("lotka", Ok(r))?;
    }
    let grading = Grading::new(vec![1, 1, 0], 2).unwrap();
    let gr = graded("oregonator_full.kova", &grading)?;
    let target = rats(&[(1, 1), (-1, 1), (10, 7)]);
    let b = gr
        .balances
        .iter()
        .find(|b| same_point(b, &target))
        .ok_or("balance missing")?;
    let k = kovalevskaya_matrix(&gr.decomposition.cut, &grading, b).map_err(err)?;
    for (p, qq) in [(0, 0), (1, 0), (1, 1)] {
        let t = ScanTarget::Graded {
            decomposition: &gr.decomposition,
            exponents: &k.exponents,
        };
        add(
            "oregonator",
            full_scan(&gr.field, t, TensorType::new(p, qq), &opts).map_err(err),
        )?;
    }
    let art = load("artificial.kova", Mode::Float)
        .to_vector_field()
        .map_err(err)?;
    for (p, qq) in [(0, 0), (1, 0), (1, 1), (2, 0)] {
        add(
            "artificial",
            full_scan(&art, ScanTarget::FixedPoint, TensorType::new(p, qq), &opts).map_err(err),
        )?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10 {
        let d: Vec<Scalar> = (0..2)
            .map(|_| loop {
                let v = rng.random_range(-3..=3);
                if v != 0 {
                    break ex(v);
                }
            })
            .collect();
        let f = diagonal_linear_field(&d);
        for (p, qq) in [(0, 0), (1, 0), (1, 1)] {
            add(
                "diagonal",
                full_scan(&f, ScanTarget::FixedPoint, TensorType::new(p, qq), &opts).map_err(err),
            )?;
        }
    }
    let mut nonzero = 0;
    for (name, r) in &reports {
        for d in &r.results {
            if d.basis.raw_dimension > 0 {
                nonzero += 1;
                ensure!(
                    !d.resonances.is_empty(),
                    "{name} type {} degree {} has invariants but no resonance",
                    r.ttype,
                    d.degree
                );
            }
        }
    }
    ensure!(nonzero > 0, "no fixture produced an invariant");
    Ok(format!(
        "{} scans, {nonzero} nonzero spaces, each with a resonance",
        reports.len()
    ))
}

const P: u64 = 2_147_483_647;

fn modp(r: &BigRational) -> u64 {
    let red = |b: &BigInt| {
        let v = (b % BigInt::from(P)).to_i64().unwrap();
        v.rem_euclid(P as i64) as u64
    };
    let (num, den) = (red(r.numer()), red(r.denom()));
    num * pow_mod(den, P - 2) % P
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    acc
}

type ModPoly = Vec<(Vec<u32>, u64)>;

fn to_modp(p: &Polynomial) -> ModPoly {
    p.terms()
        .map(|(m, c)| (m.exponents().to_vec(), modp(c.as_exact().unwrap())))
        .collect()
}

fn eval_mod(p: &ModPoly, x: &[u64]) -> u64 {
    p.iter().fold(0, |acc, (e, c)| {
        let t = e
            .iter()
            .zip(x)
            .fold(*c, |t, (&k, &xi)| t * pow_mod(xi, k as u64) % P);
        (acc + t) % P
    })
}

fn d_mod(p: &ModPoly, j: usize) -> ModPoly {
    p.iter()
        .filter(|(e, _)| e[j] > 0)
        .map(|(e, c)| {
            let mut e2 = e.clone();
            e2[j] -= 1;
            (e2, c * e[j] as u64 % P)
        })
        .collect()
}

fn rank_mod(mut rows: Vec<Vec<u64>>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][col], P - 2);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col] * inv % P;
                for c in col..ncols {
                    let sub = f * rows[rank][c] % P;
                    rows[r][c] = (rows[r][c] + P - sub) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Nullspace dimension of `L_F` on the ansatz, by evaluating the component
/// formula at random points modulo a prime.
fn sampled_dimension(
    f: &VectorField,
    ttype: TensorType,
    lo: u32,
    hi: u32,
    rng: &mut ChaCha8Rng,
) -> usize {
    let n = f.dim();
    let (p, qq) = (ttype.p, ttype.q);
    let space = build_ansatz(ttype, AnsatzMode::TotalDegreeWindow(lo, hi), n, 8).unwrap();
    let fm: Vec<ModPoly> = f.components().iter().map(to_modp).collect();
    let jac: Vec<Vec<ModPoly>> = fm
        .iter()
        .map(|c| (0..n).map(|j| d_mod(c, j)).collect())
        .collect();
    let outputs: Vec<Vec<usize>> = ttype.index_tuples(n).collect();
    let ncols = space.len();
    let mut rows = Vec::new();
    for _ in 0..ncols + 25 {
        let x: Vec<u64> = (0..n).map(|_| rng.random_range(1..P)).collect();
        let fx: Vec<u64> = fm.iter().map(|c| eval_mod(c, &x)).collect();
        let jx: Vec<Vec<u64>> = jac
            .iter()
            .map(|r| r.iter().map(|d| eval_mod(d, &x)).collect())
            .collect();
        let mut block: BTreeMap<&Vec<usize>, Vec<u64>> =
            outputs.iter().map(|k| (k, vec![0u64; ncols])).collect();
        for (col, (idx, m)) in space.slots.iter().enumerate() {
            let mu: ModPoly = vec![(m.exponents().to_vec(), 1)];
            let mu_x = eval_mod(&mu, &x);
            // transport term
            let transport =
                (0..n).fold(0, |acc, s| (acc + fx[s] * eval_mod(&d_mod(&mu, s), &x)) % P);
            let row = block.get_mut(idx).unwrap();
            row[col] = (row[col] + transport) % P;
            for r in 0..p + qq {
                for a in 0..n {
                    let mut out = idx.clone();
                    out[r] = a;
                    let src = idx[r];
                    let term = if r < p {
                        (P - jx[a][src]) % P
                    } else {
                        jx[src][a]
                    };
                    let row = block.get_mut(&out).unwrap();
                    row[col] = (row[col] + mu_x * term) % P;
                }
            }
        }
        rows.extend(block.into_values());
    }
    ncols - rank_mod(rows, ncols)
}

// 10. Exact invariant search against a sampled modular oracle.
fn modular_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut oracle_rng = ChaCha8Rng::seed_from_u64(12);
    let mut nonzero = 0;
    for i in 0..30 {
        let f = match i % 3 {
            0 => rand_field(&mut rng, 2, 0, 2, 0.6, 3),
            1 => {
                let h = rand_poly(&mut rng, 2, 2, 3, 0.6, 3);
                let fx = h.partial(1).unwrap();
                let fy = h.partial(0).unwrap().scale(&ex(-1)).unwrap();
                VectorField::new(vec![fx, fy]).unwrap()
            }
            _ => rand_field(&mut rng, 2, 2, 2, 0.7, 3),
        };
        for (p, qq) in [(0, 0), (1, 0), (1, 1)] {
            let ttype = TensorType::new(p, qq);
            let space = build_ansatz(ttype, AnsatzMode::TotalDegreeWindow(0, 3), 2, 8).unwrap();
            let exact = solve_invariants(&f, &space, false)
                .map_err(err)?
                .raw_dimension;
            let sampled = sampled_dimension(&f, ttype, 0, 3, &mut oracle_rng);
            ensure!(
                exact == sampled,
                "system {i} type ({p},{qq}): exact {exact}, sampled {sampled}"
            );
            nonzero += (exact > 0) as usize;
        }
    }
    Ok(format!(
        "30 planar quadratic systems x 3 types match, {nonzero} nonzero spaces"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("lotka-volterra golden values", lotka_golden),
        ("lotka-volterra invariant scans", lotka_scans),
        ("oregonator invariants", oregonator),
        ("irrational linear system", artificial),
        ("kovalevskaya witness", kovalevskaya_witness),
        ("weighted scaling identity", scaling_identity),
        ("trivial family invariance", trivial_family),
        ("flow oracle agreement", oracle_agreement),
        ("resonance necessity", necessity),
        ("modular rank oracle", modular_oracle),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.2}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
