use std::fmt;

use num_integer::Integer as _;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::{Integer, Polynomial, Rational};

/// A function `q(t) = constituent[t mod period](t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quasipolynomial {
    period: usize,
    constituents: Vec<Polynomial>,
}

impl Quasipolynomial {
    pub fn new(constituents: Vec<Polynomial>) -> Self {
        assert!(!constituents.is_empty(), "period must be positive");
        Self {
            period: constituents.len(),
            constituents,
        }
    }

    pub fn zero() -> Self {
        Self::new(vec![Polynomial::zero()])
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self::new(vec![p])
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn constituents(&self) -> &[Polynomial] {
        &self.constituents
    }

    pub fn constituent(&self, r: usize) -> &Polynomial {
        &self.constituents[r % self.period]
    }

    pub fn is_zero(&self) -> bool {
        self.constituents.iter().all(Polynomial::is_zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.constituents.iter().filter_map(Polynomial::degree).max()
    }

    fn residue(&self, t: &Integer) -> usize {
        let r = t.mod_floor(&Integer::from(self.period));
        r.try_into().expect("residue fits in usize")
    }

    /// Exact value at any integer `t`, negative included.
    pub fn evaluate(&self, t: &Integer) -> Rational {
        self.constituents[self.residue(t)].eval(&Rational::from_integer(t.clone()))
    }

    pub fn evaluate_i64(&self, t: i64) -> Rational {
        self.evaluate(&Integer::from(t))
    }

    /// Same function written over period `p`, a multiple of the current one.
    pub fn with_period(&self, p: usize) -> Self {
        assert_eq!(p % self.period, 0, "new period must be a multiple");
        Self::new((0..p).map(|r| self.constituent(r).clone()).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.constituents.iter().map(|p| p.scale(c)).collect())
    }

    /// Minimal-period form: the smallest divisor `d` of the period for which
    /// every constituent equals constituent `r mod d`.
    pub fn normalize(&self) -> Self {
        for d in 1..=self.period {
            if !self.period.is_multiple_of(d) {
                continue;
            }
            if (0..self.period).all(|r| self.constituents[r] == self.constituents[r % d]) {
                return Self::new(self.constituents[..d].to_vec());
            }
        }
        unreachable!("the period itself always qualifies")
    }

    /// `t ↦ (−1)^dim · q(−t)`, the reciprocity image.
    pub fn reciprocal(&self, dim: usize) -> Self {
        let sign = if dim.is_multiple_of(2) {
            Rational::one()
        } else {
            -Rational::one()
        };
        let p = self.period;
        Self::new(
            (0..p)
                .map(|r| {
                    self.constituents[(p - r % p) % p]
                        .compose_affine(&-Rational::one(), &Rational::zero())
                        .scale(&sign)
                })
                .collect(),
        )
    }

    /// `t ↦ q(t/step)` when `step | t`, and `0` otherwise.
    pub fn stretch(&self, step: usize) -> Self {
        assert!(step >= 1);
        if step == 1 {
            return self.clone();
        }
        let inv = Rational::new(Integer::one(), Integer::from(step));
        let p = self.period * step;
        Self::new(
            (0..p)
                .map(|r| {
                    if r % step == 0 {
                        self.constituent(r / step).compose_affine(&inv, &Rational::zero())
                    } else {
                        Polynomial::zero()
                    }
                })
                .collect(),
        )
    }

    /// Constituents as `t ≡ r (mod p): polynomial` lines.
    pub fn render(&self) -> String {
        self.constituents
            .iter()
            .enumerate()
            .map(|(r, c)| format!("t ≡ {r} (mod {}): {c}", self.period))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl std::ops::Add for &Quasipolynomial {
    type Output = Quasipolynomial;

    fn add(self, rhs: &Quasipolynomial) -> Quasipolynomial {
        let p = num_integer::lcm(self.period, rhs.period);
        Quasipolynomial::new(
            (0..p)
                .map(|r| self.constituent(r) + rhs.constituent(r))
                .collect(),
        )
    }
}

impl std::ops::Sub for &Quasipolynomial {
    type Output = Quasipolynomial;

    fn sub(self, rhs: &Quasipolynomial) -> Quasipolynomial {
        self + &rhs.scale(&-Rational::one())
    }
}

impl fmt::Display for Quasipolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Serialize, Deserialize)]
struct QuasiRepr {
    period: usize,
    /// Ascending coefficients per residue class.
    constituents: Vec<Vec<String>>,
}

impl Serialize for Quasipolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QuasiRepr {
            period: self.period,
            constituents: self
                .constituents
                .iter()
                .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quasipolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = QuasiRepr::deserialize(d)?;
        if repr.period == 0 || repr.constituents.len() != repr.period {
            return Err(serde::de::Error::custom("period does not match constituents"));
        }
        let constituents = repr
            .constituents
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|c| c.parse::<Rational>().map_err(serde::de::Error::custom))
                    .collect::<Result<Vec<_>, _>>()
                    .map(Polynomial::new)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(constituents))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    /// floor(t/2) + 1
    fn half_segment() -> Quasipolynomial {
        Quasipolynomial::new(vec![
            Polynomial::new(vec![rat(1, 1), rat(1, 2)]),
            Polynomial::new(vec![rat(1, 2), rat(1, 2)]),
        ])
    }

    #[test]
    fn evaluation_uses_nonnegative_residues() {
        let q = half_segment();
        for t in -7..12i64 {
            assert_eq!(q.evaluate_i64(t), rat(t.div_euclid(2) + 1, 1), "t = {t}");
        }
    }

    #[test]
    fn normalize_merges_identical_constituents() {
        let q = Quasipolynomial::from_polynomial(Polynomial::from_i64(&[1, 1])).with_period(6);
        assert_eq!(q.period(), 6);
        assert_eq!(q.normalize().period(), 1);
        assert_eq!(half_segment().with_period(4).normalize(), half_segment());
    }

    #[test]
    fn stretch_inserts_zero_classes() {
        let q = Quasipolynomial::from_polynomial(Polynomial::one()).stretch(3);
        assert_eq!(q.period(), 3);
        assert_eq!(q.evaluate_i64(6), rat(1, 1));
        assert_eq!(q.evaluate_i64(7), rat(0, 1));
    }

    #[test]
    fn serde_round_trip() {
        let q = half_segment();
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"period":2,"constituents":[["1","1/2"],["1/2","1/2"]]}"#);
        let back: Quasipolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
    }

    fn arb_quasi() -> impl Strategy<Value = Quasipolynomial> {
        (1usize..5).prop_flat_map(|p| {
            proptest::collection::vec(proptest::collection::vec((-5i64..6, 1i64..4), 0..4), p)
                .prop_map(|cs| {
                    Quasipolynomial::new(
                        cs.into_iter()
                            .map(|c| Polynomial::new(c.into_iter().map(|(n, d)| rat(n, d)).collect()))
                            .collect(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn normalization_preserves_values(q in arb_quasi(), k in 1usize..4) {
            let wide = q.with_period(q.period() * k);
            let norm = wide.normalize();
            prop_assert!(norm.period() <= q.period());
            for t in -20..20i64 {
                prop_assert_eq!(norm.evaluate_i64(t), q.evaluate_i64(t));
            }
        }

        #[test]
        fn reciprocal_is_an_involution(q in arb_quasi(), d in 0usize..4) {
            prop_assert_eq!(q.reciprocal(d).reciprocal(d), q.clone());
            for t in -10..10i64 {
                let sign = if d % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
                prop_assert_eq!(q.reciprocal(d).evaluate_i64(t), sign * q.evaluate_i64(-t));
            }
        }
    }
}
