mod common;

use common::*;
use kova_core::dsl::parse_system;
use kova_core::invsearch::{
    build_ansatz, diagonal_linear_field, full_scan, solve_invariants, AnsatzMode, QuotientStatus,
    ScanOptions, ScanTarget,
};
use kova_core::tensor::{TensorType, DEFAULT_RANK_CAP};
use kova_core::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // every basis tensor is invariant and the exact and float paths agree on
    // the dimension for integer fields
    #[test]
    fn basis_is_invariant_and_modes_agree(seed in any::<u64>(), ty in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rand_field(&mut rng, 2, 1, 2, 0.5, 2);
        let ttype = [TensorType::new(0, 0), TensorType::new(1, 0), TensorType::new(1, 1)][ty];
        let space = build_ansatz(ttype, AnsatzMode::TotalDegreeWindow(0, 2), 2, 8).unwrap();
        let exact = solve_invariants(&f, &space, false).unwrap();
        for t in &exact.basis {
            prop_assert!(t.is_invariant(&f).unwrap().0);
        }
        let float = solve_invariants(&f.to_float(), &space, false).unwrap();
        prop_assert_eq!(exact.dimension, float.dimension);
    }
}

#[test]
fn quotient_removes_identity() {
    let f = diagonal_linear_field(&[ex(1), ex(2)]);
    let space = build_ansatz(TensorType::new(1, 1), AnsatzMode::TotalDegree(0), 2, 8).unwrap();
    let raw = solve_invariants(&f, &space, false).unwrap();
    let quo = solve_invariants(&f, &space, true).unwrap();
    assert_eq!(raw.dimension, 2);
    assert_eq!(quo.raw_dimension, 2);
    assert_eq!(quo.trivial_dimension, 1);
    assert_eq!(quo.dimension, 1);
    assert_eq!(quo.quotient, QuotientStatus::Applied);
    assert_eq!(raw.quotient, QuotientStatus::NotRequested);
}

#[test]
fn quotient_is_inapplicable_off_diagonal_types() {
    let f = diagonal_linear_field(&[ex(1), ex(-1)]);
    let space = build_ansatz(TensorType::new(1, 0), AnsatzMode::TotalDegree(1), 2, 8).unwrap();
    let b = solve_invariants(&f, &space, true).unwrap();
    assert_eq!(b.quotient, QuotientStatus::Inapplicable);
}

#[test]
fn rank_cap_is_enforced() {
    let r = build_ansatz(
        TensorType::new(5, 5),
        AnsatzMode::TotalDegree(0),
        2,
        DEFAULT_RANK_CAP,
    );
    assert!(matches!(r, Err(Error::RankCapExceeded { .. })), "{r:?}");
}

#[test]
fn fixed_point_scan_of_saddle() {
    // x' = x, y' = -y: xy is a first integral, order 2
    let f = diagonal_linear_field(&[ex(1), ex(-1)]);
    let opts = ScanOptions {
        quotient_trivial: false,
        fixed_point_k_max: 4,
        ..ScanOptions::default()
    };
    let r = full_scan(&f, ScanTarget::FixedPoint, TensorType::new(0, 0), &opts).unwrap();
    let dims: Vec<usize> = (0..=4).map(|k| r.dimension_at(k).unwrap_or(0)).collect();
    assert_eq!(dims, [1, 0, 1, 0, 1]);
}

#[test]
fn scan_needs_fixed_point() {
    let f = parse_system("x' = 1 + y\ny' = x\n")
        .unwrap()
        .to_vector_field()
        .unwrap();
    let r = full_scan(
        &f,
        ScanTarget::FixedPoint,
        TensorType::new(0, 0),
        &ScanOptions::default(),
    );
    assert!(matches!(r, Err(Error::NoFixedPointAtOrigin)));
}
