//! Exact arithmetic: big rationals, dense rational matrices, univariate
//! polynomials and integer lattice bases.

mod lattice;
mod matrix;
mod poly;

pub use lattice::{integer_column_echelon, integer_kernel, integer_lattice_basis, ColumnEchelon};
pub use matrix::{RationalMatrix, Rref};
pub use poly::Polynomial;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Integer = BigInt;
pub type Rational = BigRational;
pub type RationalVector = Vec<Rational>;
pub type IntegerVector = Vec<Integer>;

pub fn int(v: i64) -> Integer {
    Integer::from(v)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(int(num), int(den))
}

pub fn rat_int(v: &Integer) -> Rational {
    Rational::from_integer(v.clone())
}

pub fn lcm(a: &Integer, b: &Integer) -> Integer {
    if a.is_zero() || b.is_zero() {
        return Integer::zero();
    }
    a.lcm(b)
}

/// lcm of the denominators of every entry, 1 for an empty input.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Integer {
    values
        .into_iter()
        .fold(Integer::one(), |acc, q| lcm(&acc, q.denom()))
}

/// Non-negative gcd of all entries; zero for the zero vector.
pub fn content(v: &[Integer]) -> Integer {
    v.iter().fold(Integer::zero(), |g, x| g.gcd(x))
}

/// Divides out the content. The zero vector is returned unchanged.
pub fn primitive(v: &[Integer]) -> IntegerVector {
    let g = content(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Smallest positive multiple of `v` with integer entries, made primitive.
pub fn clear_denominators(v: &[Rational]) -> IntegerVector {
    let l = denominator_lcm(v);
    let scaled: Vec<Integer> = v
        .iter()
        .map(|q| (q * rat_int(&l)).to_integer())
        .collect();
    primitive(&scaled)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn int_dot(a: &[Integer], b: &[Integer]) -> Integer {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integer row vector times rational column vector.
pub fn mixed_dot(a: &[Integer], x: &[Rational]) -> Rational {
    a.iter()
        .zip(x)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, v)| v * rat_int(c))
        .sum()
}

pub fn to_rational_vec(v: &[Integer]) -> RationalVector {
    v.iter().map(rat_int).collect()
}

pub fn floor_div(a: &Integer, b: &Integer) -> Integer {
    a.div_floor(b)
}

pub fn ceil_div(a: &Integer, b: &Integer) -> Integer {
    -((-a).div_floor(b))
}

/// Sign of the first nonzero entry, `0` for the zero vector.
pub fn leading_sign(v: &[Integer]) -> i32 {
    v.iter()
        .find(|x| !x.is_zero())
        .map(|x| if x.is_positive() { 1 } else { -1 })
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clearing_denominators_yields_primitive_vector() {
        assert_eq!(clear_denominators(&[rat(1, 2), rat(1, 2)]), vec![int(1), int(1)]);
        assert_eq!(clear_denominators(&[rat(2, 3), rat(-4, 9)]), vec![int(3), int(-2)]);
    }

    #[test]
    fn floor_and_ceil_division_round_correctly() {
        assert_eq!(floor_div(&int(-7), &int(2)), int(-4));
        assert_eq!(ceil_div(&int(-7), &int(2)), int(-3));
        assert_eq!(ceil_div(&int(7), &int(-2)), int(-3));
        assert_eq!(floor_div(&int(7), &int(-2)), int(-4));
    }
}

/// Serde adapters writing big integers as decimal strings.
pub mod serde_int {
    use super::Integer;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub mod serde_int_vec {
    use super::Integer;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Integer], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Integer>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_int_mat {
    use super::Integer;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Integer>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Integer>>, D::Error> {
        let m = Vec::<Vec<String>>::deserialize(d)?;
        m.iter()
            .map(|row| {
                row.iter()
                    .map(|s| s.parse().map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// Serde adapter writing a rational as `"p/q"` (or `"p"` when integral).
pub mod serde_rat {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
