use std::fmt;

use num_traits::{Signed, Zero};

use crate::exact::{content, leading_sign, mixed_dot, Integer, IntegerVector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strictness {
    Weak,
    Strict,
}

/// `normal · x ≥ rhs` (weak) or `normal · x > rhs` (strict).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub normal: IntegerVector,
    pub rhs: Integer,
    pub strictness: Strictness,
}

/// `normal · x = rhs`
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equality {
    pub normal: IntegerVector,
    pub rhs: Integer,
}

fn divide_content(normal: &mut IntegerVector, rhs: &mut Integer) {
    let g = num_integer::Integer::gcd(&content(normal), &*rhs);
    if !g.is_zero() && g != Integer::from(1) {
        for x in normal.iter_mut() {
            *x /= &g;
        }
        *rhs /= &g;
    }
}

impl Inequality {
    /// Canonical form: `gcd(normal, rhs) = 1`.
    pub fn new(mut normal: IntegerVector, mut rhs: Integer, strictness: Strictness) -> Self {
        divide_content(&mut normal, &mut rhs);
        Self {
            normal,
            rhs,
            strictness,
        }
    }

    pub fn weak(normal: IntegerVector, rhs: Integer) -> Self {
        Self::new(normal, rhs, Strictness::Weak)
    }

    pub fn strict(normal: IntegerVector, rhs: Integer) -> Self {
        Self::new(normal, rhs, Strictness::Strict)
    }

    pub fn is_strict(&self) -> bool {
        self.strictness == Strictness::Strict
    }

    /// `normal · x − rhs`
    pub fn slack(&self, x: &[Rational]) -> Rational {
        mixed_dot(&self.normal, x) - Rational::from_integer(self.rhs.clone())
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let s = self.slack(x);
        match self.strictness {
            Strictness::Weak => !s.is_negative(),
            Strictness::Strict => s.is_positive(),
        }
    }

    /// The opposite closed or open half-space: `a·x ≥ b` becomes `−a·x > −b`.
    pub fn complement(&self) -> Self {
        let flipped = match self.strictness {
            Strictness::Weak => Strictness::Strict,
            Strictness::Strict => Strictness::Weak,
        };
        Self::new(
            self.normal.iter().map(|x| -x).collect(),
            -self.rhs.clone(),
            flipped,
        )
    }
}

impl Equality {
    /// Canonical form: primitive with the first nonzero normal entry positive.
    pub fn new(mut normal: IntegerVector, mut rhs: Integer) -> Self {
        divide_content(&mut normal, &mut rhs);
        let sign = leading_sign(&normal);
        if sign < 0 || (sign == 0 && rhs.is_negative()) {
            normal.iter_mut().for_each(|x| *x = -x.clone());
            rhs = -rhs;
        }
        Self { normal, rhs }
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        mixed_dot(&self.normal, x) == Rational::from_integer(self.rhs.clone())
    }

    /// The two weak inequalities whose intersection is this equality.
    pub fn as_inequalities(&self) -> [Inequality; 2] {
        [
            Inequality::weak(self.normal.clone(), self.rhs.clone()),
            Inequality::weak(
                self.normal.iter().map(|x| -x).collect(),
                -self.rhs.clone(),
            ),
        ]
    }
}

/// A rational polyhedron given by integer linear equalities and weak or
/// strict inequalities. Dilation by `t` multiplies every right-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HPolyhedron {
    dim: usize,
    equalities: Vec<Equality>,
    inequalities: Vec<Inequality>,
}

impl HPolyhedron {
    /// Normalizes every constraint and drops duplicates. Of two inequalities
    /// with the same normal and right-hand side only the strict one survives.
    pub fn new(dim: usize, equalities: Vec<Equality>, inequalities: Vec<Inequality>) -> Self {
        let mut p = Self {
            dim,
            equalities: Vec::new(),
            inequalities: Vec::new(),
        };
        for e in equalities {
            p.add_equality(e);
        }
        for i in inequalities {
            p.add_inequality(i);
        }
        p
    }

    pub fn full_space(dim: usize) -> Self {
        Self::new(dim, Vec::new(), Vec::new())
    }

    /// `[lo, hi]^dim` with the given strictness on every facet.
    pub fn cube(dim: usize, lo: i64, hi: i64, strictness: Strictness) -> Self {
        let mut ineqs = Vec::new();
        for i in 0..dim {
            let mut e = vec![Integer::zero(); dim];
            e[i] = Integer::from(1);
            ineqs.push(Inequality::new(e.clone(), Integer::from(lo), strictness));
            e[i] = Integer::from(-1);
            ineqs.push(Inequality::new(e, Integer::from(-hi), strictness));
        }
        Self::new(dim, Vec::new(), ineqs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn equalities(&self) -> &[Equality] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn add_equality(&mut self, e: Equality) {
        assert_eq!(e.normal.len(), self.dim, "equality dimension mismatch");
        let e = Equality::new(e.normal, e.rhs);
        if !self.equalities.contains(&e) {
            self.equalities.push(e);
        }
    }

    pub fn add_inequality(&mut self, i: Inequality) {
        assert_eq!(i.normal.len(), self.dim, "inequality dimension mismatch");
        let i = Inequality::new(i.normal, i.rhs, i.strictness);
        if let Some(existing) = self
            .inequalities
            .iter_mut()
            .find(|c| c.normal == i.normal && c.rhs == i.rhs)
        {
            if i.is_strict() {
                existing.strictness = Strictness::Strict;
            }
            return;
        }
        self.inequalities.push(i);
    }

    pub fn with_inequality(&self, i: Inequality) -> Self {
        let mut p = self.clone();
        p.add_inequality(i);
        p
    }

    pub fn with_equality(&self, e: Equality) -> Self {
        let mut p = self.clone();
        p.add_equality(e);
        p
    }

    /// Keeps only the inequalities selected by `keep`.
    pub fn retain_inequalities(&self, mut keep: impl FnMut(usize, &Inequality) -> bool) -> Self {
        let inequalities = self
            .inequalities
            .iter()
            .enumerate()
            .filter(|(i, c)| keep(*i, c))
            .map(|(_, c)| c.clone())
            .collect();
        Self {
            dim: self.dim,
            equalities: self.equalities.clone(),
            inequalities,
        }
    }

    /// Same constraints with every inequality made weak.
    pub fn closure(&self) -> Self {
        let mut p = self.clone();
        for c in &mut p.inequalities {
            c.strictness = Strictness::Weak;
        }
        p
    }

    /// Same constraints with every inequality made strict.
    pub fn interior(&self) -> Self {
        let mut p = self.clone();
        for c in &mut p.inequalities {
            c.strictness = Strictness::Strict;
        }
        p
    }

    pub fn has_strict(&self) -> bool {
        self.inequalities.iter().any(Inequality::is_strict)
    }

    pub fn is_open(&self) -> bool {
        self.inequalities.iter().all(Inequality::is_strict)
    }

    /// `t · self`
    pub fn dilate(&self, t: &Integer) -> Self {
        Self {
            dim: self.dim,
            equalities: self
                .equalities
                .iter()
                .map(|e| Equality::new(e.normal.clone(), &e.rhs * t))
                .collect(),
            inequalities: self
                .inequalities
                .iter()
                .map(|c| Inequality::new(c.normal.clone(), &c.rhs * t, c.strictness))
                .collect(),
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equalities.iter().all(|e| e.satisfied_by(x))
            && self.inequalities.iter().all(|c| c.satisfied_by(x))
    }

    /// Constraints sorted into a canonical order, for set-level comparison.
    pub fn canonical(&self) -> Self {
        let mut p = self.clone();
        p.equalities.sort();
        p.inequalities.sort();
        p
    }
}

impl fmt::Display for HPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |normal: &[Integer]| {
            let parts: Vec<String> = normal
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("{c}*x{i}"))
                .collect();
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        };
        let mut lines = Vec::new();
        for e in &self.equalities {
            lines.push(format!("{} = {}", term(&e.normal), e.rhs));
        }
        for c in &self.inequalities {
            let op = if c.is_strict() { ">" } else { ">=" };
            lines.push(format!("{} {op} {}", term(&c.normal), c.rhs));
        }
        write!(f, "{{{}}}", lines.join("; "))
    }
}
