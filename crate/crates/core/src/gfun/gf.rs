use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Quasipolynomial;
use crate::exact::{Integer, Polynomial, Rational};

/// `numerator(z) / Π (1 − z^k)` over a sorted multiset of exponents `k`.
///
/// Values are kept in canonical form: the fraction is in lowest terms, and
/// the denominator is rebuilt from its cyclotomic factors by repeatedly
/// taking `1 − z^d` for the largest remaining cyclotomic index `d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalGF {
    numerator: Polynomial,
    denominator: Vec<usize>,
}

/// `Φ_d` normalized to constant term 1, so `1 − z^k = Π_{d | k} phi(d)`.
fn phi(d: usize) -> Polynomial {
    static CACHE: OnceLock<Mutex<HashMap<usize, Polynomial>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&d) {
        return p.clone();
    }
    // 1 − z^d divided by phi(e) for every proper divisor e.
    let mut p = one_minus_z_pow(d);
    for e in divisors(d) {
        if e < d {
            p = p.exact_div(&phi(e)).expect("cyclotomic factorization");
        }
    }
    cache.lock().unwrap().insert(d, p.clone());
    p
}

fn one_minus_z_pow(k: usize) -> Polynomial {
    &Polynomial::one() - &Polynomial::monomial(Rational::one(), k)
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Multiplicity of each cyclotomic factor in `Π (1 − z^k)`.
fn cyclotomic_exponents(ks: &[usize]) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for &k in ks {
        for d in divisors(k) {
            *m.entry(d).or_insert(0) += 1;
        }
    }
    m
}

fn canonical_from_cyclotomic(mut num: Polynomial, mut m: BTreeMap<usize, usize>) -> RationalGF {
    if num.is_zero() {
        return RationalGF {
            numerator: num,
            denominator: Vec::new(),
        };
    }
    // Lowest terms.
    for (&d, mult) in m.iter_mut() {
        let f = phi(d);
        while *mult > 0 {
            match num.exact_div(&f) {
                Some(q) => {
                    num = q;
                    *mult -= 1;
                }
                None => break,
            }
        }
    }
    // Cover with (1 − z^d) factors, largest index first.
    let mut ks = Vec::new();
    while let Some((&d, _)) = m.iter().rev().find(|(_, &c)| c > 0) {
        ks.push(d);
        for e in divisors(d) {
            match m.get_mut(&e) {
                Some(c) if *c > 0 => *c -= 1,
                _ => num = &num * &phi(e),
            }
        }
    }
    ks.sort_unstable();
    RationalGF {
        numerator: num,
        denominator: ks,
    }
}

impl RationalGF {
    /// Canonical form of `numerator / Π (1 − z^k)`.
    pub fn new(numerator: Polynomial, denominator: Vec<usize>) -> Self {
        assert!(denominator.iter().all(|&k| k >= 1), "exponents must be positive");
        canonical_from_cyclotomic(numerator, cyclotomic_exponents(&denominator))
    }

    pub fn zero() -> Self {
        Self::new(Polynomial::zero(), Vec::new())
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &[usize] {
        &self.denominator
    }

    pub fn denominator_polynomial(&self) -> Polynomial {
        self.denominator
            .iter()
            .fold(Polynomial::one(), |acc, &k| &acc * &one_minus_z_pow(k))
    }

    /// `Σ_{t ≥ start} q(t) z^t`
    pub fn from_quasipolynomial(q: &Quasipolynomial, start: usize) -> Self {
        let p = q.period();
        let d = q.degree().unwrap_or(0);
        // Each residue class r contributes z^r N_r(z^p) / (1 − z^p)^{d+1}.
        let mut num = Polynomial::zero();
        let base = (0..=d).fold(Polynomial::one(), |acc, _| &acc * &one_minus_z_pow(1));
        for r in 0..p {
            let f = q.constituent(r);
            let values: Vec<Rational> = (0..=d)
                .map(|j| f.eval_int((r + j * p) as i64))
                .collect();
            let head = Polynomial::new(values);
            let full = &head * &base;
            let nr = Polynomial::new((0..=d).map(|i| full.coeff(i)).collect());
            num = &num + &nr.inflate(p).shift(r);
        }
        let denominator = vec![p; d + 1];
        if start > 0 {
            let head = Polynomial::new((0..start).map(|t| q.evaluate_i64(t as i64)).collect());
            let den = denominator
                .iter()
                .fold(Polynomial::one(), |acc, &k| &acc * &one_minus_z_pow(k));
            num = &num - &(&head * &den);
        }
        Self::new(num, denominator)
    }

    /// First `n + 1` series coefficients.
    pub fn series(&self, n: usize) -> Vec<Rational> {
        let den = self.denominator_polynomial();
        let dc = den.coeffs();
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        for t in 0..=n {
            let mut c = self.numerator.coeff(t);
            for i in 1..dc.len().min(t + 1) {
                if !dc[i].is_zero() {
                    c -= &dc[i] * &out[t - i];
                }
            }
            out.push(c);
        }
        out
    }

    /// Renders as `numerator / (1-z^k1)(1-z^k2)...`, numerator factored as
    /// content · z^m · (primitive part in ascending powers).
    pub fn render(&self) -> String {
        let num = render_numerator(&self.numerator);
        if self.denominator.is_empty() {
            return num;
        }
        let mut den = String::new();
        let mut i = 0;
        while i < self.denominator.len() {
            let k = self.denominator[i];
            let run = self.denominator[i..].iter().take_while(|&&x| x == k).count();
            if k == 1 {
                den.push_str("(1-z)");
            } else {
                den.push_str(&format!("(1-z^{k})"));
            }
            if run > 1 {
                den.push_str(&format!("^{run}"));
            }
            i += run;
        }
        format!("{num} / {den}")
    }
}

fn monomial(k: usize) -> String {
    match k {
        0 => String::new(),
        1 => "z".into(),
        _ => format!("z^{k}"),
    }
}

fn render_numerator(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let cs = p.coeffs();
    let low = cs.iter().position(|c| !c.is_zero()).unwrap();
    let nums = cs.iter().fold(Integer::zero(), |g, c| g.gcd(c.numer()));
    let dens = cs.iter().fold(Integer::one(), |l, c| l.lcm(c.denom()));
    let mut content = Rational::new(nums, dens);
    if cs[low].is_negative() {
        content = -content;
    }
    let prim: Vec<Rational> = cs[low..].iter().map(|c| c / &content).collect();
    let terms: Vec<(usize, &Rational)> = prim
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let mut out = String::new();
    if content == -Rational::one() {
        out.push('-');
    } else if !content.is_one() {
        out.push_str(&content.to_string());
    }
    out.push_str(&monomial(low));
    if terms.len() > 1 {
        let mut body = String::new();
        for (i, (k, c)) in terms.iter().enumerate() {
            let a = c.abs();
            if i > 0 {
                body.push(if c.is_negative() { '-' } else { '+' });
            } else if c.is_negative() {
                body.push('-');
            }
            if !a.is_one() || *k == 0 {
                body.push_str(&a.to_string());
            }
            body.push_str(&monomial(*k));
        }
        out.push_str(&format!("({body})"));
    } else if out.is_empty() || out == "-" {
        out.push('1');
    }
    out
}

impl fmt::Display for RationalGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::ops::Add for &RationalGF {
    type Output = RationalGF;

    fn add(self, rhs: &RationalGF) -> RationalGF {
        if self.denominator == rhs.denominator {
            return canonical_from_cyclotomic(
                &self.numerator + &rhs.numerator,
                cyclotomic_exponents(&self.denominator),
            );
        }
        let ma = cyclotomic_exponents(&self.denominator);
        let mb = cyclotomic_exponents(&rhs.denominator);
        let mut m = ma.clone();
        for (&d, &c) in &mb {
            let e = m.entry(d).or_insert(0);
            *e = (*e).max(c);
        }
        let cofactor = |own: &BTreeMap<usize, usize>| {
            m.iter().fold(Polynomial::one(), |acc, (&d, &c)| {
                let have = own.get(&d).copied().unwrap_or(0);
                (have..c).fold(acc, |acc, _| &acc * &phi(d))
            })
        };
        let num = &(&self.numerator * &cofactor(&ma)) + &(&rhs.numerator * &cofactor(&mb));
        canonical_from_cyclotomic(num, m)
    }
}

pub fn gf_add(a: &RationalGF, b: &RationalGF) -> RationalGF {
    a + b
}

#[derive(Serialize, Deserialize)]
struct GfRepr {
    /// Ascending coefficients.
    numerator: Vec<String>,
    denominator: Vec<usize>,
}

impl Serialize for RationalGF {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GfRepr {
            numerator: self.numerator.coeffs().iter().map(|c| c.to_string()).collect(),
            denominator: self.denominator.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalGF {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GfRepr::deserialize(d)?;
        if repr.denominator.contains(&0) {
            return Err(serde::de::Error::custom("denominator exponents must be positive"));
        }
        let coeffs = repr
            .numerator
            .iter()
            .map(|c| c.parse::<Rational>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(Polynomial::new(coeffs), repr.denominator))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupingStrategy {
    Sequential,
    BalancedTree,
    BucketedByDenominator,
}

impl GroupingStrategy {
    pub const ALL: [Self; 3] = [Self::Sequential, Self::BalancedTree, Self::BucketedByDenominator];
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupingMetrics {
    pub strategy: GroupingStrategy,
    pub inputs: usize,
    pub additions: usize,
    /// Largest numerator degree seen in any intermediate sum.
    pub max_numerator_degree: usize,
    /// Largest denominator factor count seen in any intermediate sum.
    pub max_denominator_factors: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

struct Tally {
    additions: usize,
    max_deg: usize,
    max_den: usize,
}

impl Tally {
    fn add(&mut self, a: &RationalGF, b: &RationalGF) -> RationalGF {
        let s = a + b;
        self.additions += 1;
        self.max_deg = self.max_deg.max(s.numerator.degree().unwrap_or(0));
        self.max_den = self.max_den.max(s.denominator.len());
        s
    }

    fn tree(&mut self, gfs: &[RationalGF]) -> RationalGF {
        match gfs.len() {
            0 => RationalGF::zero(),
            1 => gfs[0].clone(),
            n => {
                let (l, r) = gfs.split_at(n / 2);
                let a = self.tree(l);
                let b = self.tree(r);
                self.add(&a, &b)
            }
        }
    }
}

/// Sums generating functions under the given associative grouping.
pub fn gf_simplify_grouped(
    gfs: &[RationalGF],
    strategy: GroupingStrategy,
) -> (RationalGF, GroupingMetrics) {
    let start = Instant::now();
    let mut tally = Tally {
        additions: 0,
        max_deg: 0,
        max_den: 0,
    };
    let sum = match strategy {
        GroupingStrategy::Sequential => gfs
            .iter()
            .fold(RationalGF::zero(), |acc, g| tally.add(&acc, g)),
        GroupingStrategy::BalancedTree => tally.tree(gfs),
        GroupingStrategy::BucketedByDenominator => {
            let mut buckets: BTreeMap<Vec<usize>, Vec<&Polynomial>> = BTreeMap::new();
            for g in gfs {
                buckets.entry(g.denominator.clone()).or_default().push(&g.numerator);
            }
            let reduced: Vec<RationalGF> = buckets
                .into_par_iter()
                .map(|(den, nums)| {
                    let num = nums.into_iter().fold(Polynomial::zero(), |acc, n| &acc + n);
                    RationalGF::new(num, den)
                })
                .collect();
            tally.additions += gfs.len().saturating_sub(reduced.len());
            reduced
                .iter()
                .fold(RationalGF::zero(), |acc, g| tally.add(&acc, g))
        }
    };
    let metrics = GroupingMetrics {
        strategy,
        inputs: gfs.len(),
        additions: tally.additions,
        max_numerator_degree: tally.max_deg,
        max_denominator_factors: tally.max_den,
        elapsed: start.elapsed(),
    };
    (sum, metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    fn ints(v: &[Rational]) -> Vec<i64> {
        v.iter()
            .map(|c| {
                assert!(c.is_integer());
                i64::try_from(c.to_integer()).unwrap()
            })
            .collect()
    }

    #[test]
    fn cyclotomic_factors_multiply_back() {
        for k in 1..=12 {
            let prod = divisors(k).into_iter().fold(Polynomial::one(), |acc, d| &acc * &phi(d));
            assert_eq!(prod, one_minus_z_pow(k), "k = {k}");
        }
    }

    #[test]
    fn constant_and_linear_quasipolynomials() {
        let one = Quasipolynomial::from_polynomial(Polynomial::one());
        let g = RationalGF::from_quasipolynomial(&one, 0);
        assert_eq!(g.denominator(), &[1]);
        assert_eq!(g.numerator(), &Polynomial::one());
        assert_eq!(g.render(), "1 / (1-z)");
        let lin = Quasipolynomial::from_polynomial(Polynomial::from_i64(&[1, 1]));
        let g = RationalGF::from_quasipolynomial(&lin, 0);
        assert_eq!(g.denominator(), &[1, 1]);
        assert_eq!(g.numerator(), &Polynomial::one());
        assert_eq!(g.render(), "1 / (1-z)^2");
    }

    #[test]
    fn addition_examples() {
        let a = RationalGF::new(Polynomial::one(), vec![1]);
        let two = &a + &a;
        assert_eq!(two.numerator(), &Polynomial::from_i64(&[2]));
        assert_eq!(two.denominator(), &[1]);
        let b = RationalGF::new(Polynomial::from_i64(&[0, -1]), vec![1]);
        let s = &a + &b;
        assert_eq!(s.numerator(), &Polynomial::one());
        assert!(s.denominator().is_empty());
        assert_eq!(s.render(), "1");
    }

    #[test]
    fn alternating_series() {
        let g = RationalGF::new(Polynomial::one(), vec![2]);
        assert_eq!(ints(&g.series(6)), vec![1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn canonical_denominator_covers_largest_index_first() {
        // 1/((1-z)(1-z^2)) written over (1-z^2)^2 reduces back.
        let g = RationalGF::new(Polynomial::from_i64(&[1, 1]), vec![2, 2]);
        assert_eq!(g.denominator(), &[1, 2]);
        assert_eq!(g.numerator(), &Polynomial::one());
    }

    #[test]
    fn numerator_rendering() {
        let g = RationalGF::new(
            Polynomial::new(
                (0..=18)
                    .map(|k| match k {
                        15 => rat(8, 1),
                        18 => rat(16, 1),
                        _ => rat(0, 1),
                    })
                    .collect(),
            ),
            vec![3, 6, 9],
        );
        assert_eq!(g.render(), "8z^15(1+2z^3) / (1-z^3)(1-z^6)(1-z^9)");
        let neg = RationalGF::new(Polynomial::from_i64(&[0, -3, 6]), vec![]);
        assert_eq!(neg.render(), "-3z(1-2z)");
    }

    fn arb_gf() -> impl Strategy<Value = RationalGF> {
        (
            proptest::collection::vec(-4i64..5, 0..6),
            proptest::collection::vec(1usize..7, 0..4),
        )
            .prop_map(|(n, d)| RationalGF::new(Polynomial::from_i64(&n), d))
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
        fn conversion_round_trip(q in arb_quasi(), start in 0usize..3) {
            let g = RationalGF::from_quasipolynomial(&q, start);
            let n = 3 * q.period() * (q.degree().unwrap_or(0) + 1);
            let s = g.series(n);
            for (t, c) in s.iter().enumerate() {
                let expect = if t < start { rat(0, 1) } else { q.evaluate_i64(t as i64) };
                prop_assert_eq!(c.clone(), expect, "t = {}", t);
            }
        }

        #[test]
        fn addition_is_commutative_and_associative(a in arb_gf(), b in arb_gf(), c in arb_gf()) {
            let ab = &a + &b;
            prop_assert_eq!(&ab, &(&b + &a));
            let left = &ab + &c;
            let right = &a + &(&b + &c);
            prop_assert_eq!(&left, &right);
            let sa = a.series(200);
            let sb = b.series(200);
            let sab = ab.series(200);
            for i in 0..=200 {
                prop_assert_eq!(&sab[i], &(&sa[i] + &sb[i]));
            }
        }

        #[test]
        fn canonical_form_is_unique(n in proptest::collection::vec(-4i64..5, 0..5),
                                    d in proptest::collection::vec(1usize..6, 0..3),
                                    extra in proptest::collection::vec(1usize..6, 0..3)) {
            // Multiplying numerator and denominator by the same factors does
            // not change the canonical form.
            let g = RationalGF::new(Polynomial::from_i64(&n), d.clone());
            let factor = extra.iter().fold(Polynomial::one(), |acc, &k| &acc * &one_minus_z_pow(k));
            let mut dd = d.clone();
            dd.extend(extra);
            let h = RationalGF::new(&Polynomial::from_i64(&n) * &factor, dd);
            prop_assert_eq!(g, h);
        }

        #[test]
        fn grouping_strategies_agree(gs in proptest::collection::vec(arb_gf(), 0..8)) {
            let results: Vec<RationalGF> = GroupingStrategy::ALL
                .iter()
                .map(|&s| gf_simplify_grouped(&gs, s).0)
                .collect();
            prop_assert_eq!(&results[0], &results[1]);
            prop_assert_eq!(&results[0], &results[2]);
        }
    }
}
