#![allow(dead_code)]

use magic_iop::exact::{rat, Polynomial};
use magic_iop::gfun::{Quasipolynomial, RationalGF};

/// `(c₂t² + c₁t + c₀) / den` as ascending coefficients.
fn poly(coeffs_desc: &[i64], den: i64) -> Polynomial {
    Polynomial::new(coeffs_desc.iter().rev().map(|&c| rat(c, den)).collect())
}

/// a₃(t), written over period 18.
pub fn a3() -> Quasipolynomial {
    let by_residue = |r: usize| match r {
        0 => poly(&[2, -32, 144], 9),
        3 => poly(&[2, -32, 78], 9),
        6 => poly(&[2, -32, 120], 9),
        9 => poly(&[2, -32, 126], 9),
        12 => poly(&[2, -32, 96], 9),
        15 => poly(&[2, -32, 102], 9),
        _ => Polynomial::zero(),
    };
    Quasipolynomial::new((0..18).map(by_residue).collect())
}

/// c₃(t), written over period 12.
pub fn c3() -> Quasipolynomial {
    let by_residue = |r: usize| match r {
        0 | 2 | 6 | 8 => poly(&[1, -16, 76, -96], 6),
        1 => poly(&[1, -16, 73, -58], 6),
        3 | 11 => poly(&[1, -16, 73, -102], 6),
        4 | 10 => poly(&[1, -16, 76, -112], 6),
        5 | 9 => poly(&[1, -16, 73, -90], 6),
        7 => poly(&[1, -16, 73, -70], 6),
        _ => unreachable!(),
    };
    Quasipolynomial::new((0..12).map(by_residue).collect())
}

/// 8z¹⁵(1 + 2z³) / (1−z³)(1−z⁶)(1−z⁹)
pub fn a3_gf() -> RationalGF {
    let mut num = vec![0; 19];
    num[15] = 8;
    num[18] = 16;
    RationalGF::new(Polynomial::from_i64(&num), vec![3, 6, 9])
}

/// 8z¹⁰(1 + 2z²) / (1−z)²(1−z⁴)(1−z⁶)
pub fn c3_gf() -> RationalGF {
    let mut num = vec![0; 13];
    num[10] = 8;
    num[12] = 16;
    RationalGF::new(Polynomial::from_i64(&num), vec![1, 1, 4, 6])
}

/// 3·C(t+3, 4) + C(t+2, 2)
pub fn macmahon(t: i64) -> i64 {
    3 * (t + 3) * (t + 2) * (t + 1) * t / 24 + (t + 2) * (t + 1) / 2
}
