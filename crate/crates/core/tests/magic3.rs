mod common;

use num_traits::Zero;

use magic_iop::exact::Integer;
use magic_iop::magic::{brute_force_count, count_magic, magic_gf, MagicSpec, Variant};

#[test]
fn affine_three_matches_printed_quasipolynomial() {
    let q = count_magic(&MagicSpec::new(3, Variant::Affine), 0, 1).unwrap();
    assert_eq!(q.period(), 18);
    assert_eq!(q, common::a3());
    assert_eq!(magic_gf(&q), common::a3_gf());
}

#[test]
fn cubical_three_matches_printed_quasipolynomial() {
    let q = count_magic(&MagicSpec::new(3, Variant::Cubical), 0, 1).unwrap();
    assert_eq!(q.period(), 12);
    assert_eq!(q, common::c3());
    assert_eq!(magic_gf(&q), common::c3_gf());
}

#[test]
fn affine_three_agrees_with_brute_force() {
    let q = count_magic(&MagicSpec::new(3, Variant::Affine), 2, 2).unwrap();
    for t in [15u64, 18, 21, 24, 27, 30, 33] {
        let brute = brute_force_count(&MagicSpec::new(3, Variant::Affine), t).unwrap();
        assert_eq!(q.evaluate(&Integer::from(t)), Integer::from(brute).into(), "t = {t}");
    }
}

#[test]
fn affine_three_vanishes_off_multiples_of_three() {
    let q = count_magic(&MagicSpec::new(3, Variant::Affine), 0, 1).unwrap();
    for t in (1..60i64).filter(|t| t % 3 != 0) {
        assert!(q.evaluate_i64(t).is_zero(), "t = {t}");
    }
}

#[test]
fn cubical_three_vanishes_up_to_n_squared() {
    let q = count_magic(&MagicSpec::new(3, Variant::Cubical), 0, 1).unwrap();
    for t in 1..=9 {
        assert!(q.evaluate_i64(t).is_zero(), "t = {t}");
    }
    assert_eq!(brute_force_count(&MagicSpec::new(3, Variant::Cubical), 9).unwrap(), 0);
}
