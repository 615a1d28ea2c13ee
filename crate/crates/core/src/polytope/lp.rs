//! Exact two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Strict inequalities are relaxed to weak ones: every result refers to the
//! closure of the polyhedron.

use num_traits::{One, Signed, Zero};

use super::HPolyhedron;
use crate::exact::{Rational, RationalVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Present when optimal.
    pub optimum: Option<Rational>,
    /// Optimal point, or an improving ray when unbounded.
    pub witness: Option<RationalVector>,
}

impl LpResult {
    fn infeasible() -> Self {
        Self {
            status: LpStatus::Infeasible,
            optimum: None,
            witness: None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs of the current phase.
    cost: Vec<Rational>,
    value: Rational,
    ncols: usize,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.value -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn set_cost(&mut self, c: &[Rational]) {
        self.cost = c.to_vec();
        self.value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            if c[b].is_zero() {
                continue;
            }
            let f = c[b].clone();
            for (x, a) in self.cost.iter_mut().zip(&self.rows[r]) {
                if !a.is_zero() {
                    *x -= &f * a;
                }
            }
            self.value -= &f * &self.rhs[r];
        }
    }

    /// Minimizes the current cost; `value` holds minus the objective.
    fn run(&mut self, allowed: usize) -> Outcome {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Outcome::Unbounded(enter),
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[r].clone();
        }
        x
    }
}

/// Optimizes `objective · x` over the closure of `p`.
pub fn lp_optimize(p: &HPolyhedron, objective: &[Rational], sense: Sense) -> LpResult {
    let n = p.dim();
    assert_eq!(objective.len(), n, "objective dimension mismatch");
    let ineqs = p.inequalities();
    let eqs = p.equalities();
    let m = ineqs.len() + eqs.len();
    let n_struct = 2 * n + ineqs.len();

    // Rows: a·x⁺ − a·x⁻ − s = b for inequalities, a·x⁺ − a·x⁻ = b for
    // equalities, each negated when b < 0. Rows whose surplus ends up with a
    // +1 coefficient start with the surplus basic; the rest get artificials.
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut needs_artificial = Vec::new();
    let mut push = |normal: &[num_bigint::BigInt], b: &num_bigint::BigInt, surplus: Option<usize>| {
        let mut row = vec![Rational::zero(); n_struct];
        for (j, a) in normal.iter().enumerate() {
            if !a.is_zero() {
                row[j] = Rational::from_integer(a.clone());
                row[n + j] = -Rational::from_integer(a.clone());
            }
        }
        let mut b = Rational::from_integer(b.clone());
        if let Some(s) = surplus {
            row[s] = -Rational::one();
        }
        let negate = b.is_negative() || (b.is_zero() && surplus.is_some());
        if negate {
            row.iter_mut().for_each(|x| *x = -x.clone());
            b = -b;
        }
        let idx = rows.len();
        rows.push(row);
        rhs.push(b);
        match surplus {
            Some(s) if negate => basis.push(s),
            _ => {
                basis.push(usize::MAX);
                needs_artificial.push(idx);
            }
        }
    };
    for (k, c) in ineqs.iter().enumerate() {
        push(&c.normal, &c.rhs, Some(2 * n + k));
    }
    for e in eqs {
        push(&e.normal, &e.rhs, None);
    }

    let n_art = needs_artificial.len();
    let ncols = n_struct + n_art;
    for row in rows.iter_mut() {
        row.resize(ncols, Rational::zero());
    }
    for (k, &r) in needs_artificial.iter().enumerate() {
        rows[r][n_struct + k] = Rational::one();
        basis[r] = n_struct + k;
    }
    let mut tab = Tableau {
        rows,
        rhs,
        basis,
        cost: Vec::new(),
        value: Rational::zero(),
        ncols,
    };

    if n_art > 0 {
        let mut phase1 = vec![Rational::zero(); ncols];
        for c in phase1.iter_mut().skip(n_struct) {
            *c = Rational::one();
        }
        tab.set_cost(&phase1);
        // Phase one is bounded below by zero.
        let _ = tab.run(ncols);
        if !tab.value.is_zero() {
            return LpResult::infeasible();
        }
        // Drive remaining artificials out of the basis, dropping redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= n_struct {
                if let Some(j) = (0..n_struct).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, j);
                } else {
                    tab.rows.remove(r);
                    tab.rhs.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![Rational::zero(); ncols];
    for (j, c) in objective.iter().enumerate() {
        let c = match sense {
            Sense::Minimize => c.clone(),
            Sense::Maximize => -c.clone(),
        };
        cost[n + j] = -c.clone();
        cost[j] = c;
    }
    tab.set_cost(&cost);
    let outcome = tab.run(n_struct);
    let y = tab.primal();
    let to_x = |y: &[Rational]| -> RationalVector { (0..n).map(|j| &y[j] - &y[n + j]).collect() };
    match outcome {
        Outcome::Optimal => {
            let min = -tab.value.clone();
            let optimum = match sense {
                Sense::Minimize => min,
                Sense::Maximize => -min,
            };
            LpResult {
                status: LpStatus::Optimal,
                optimum: Some(optimum),
                witness: Some(to_x(&y)),
            }
        }
        Outcome::Unbounded(enter) => {
            let mut dir = vec![Rational::zero(); ncols];
            dir[enter] = Rational::one();
            for (r, &b) in tab.basis.iter().enumerate() {
                dir[b] = -tab.rows[r][enter].clone();
            }
            LpResult {
                status: LpStatus::Unbounded,
                optimum: None,
                witness: Some(to_x(&dir)),
            }
        }
    }
}

pub fn is_feasible(p: &HPolyhedron) -> bool {
    let zero = vec![Rational::zero(); p.dim()];
    lp_optimize(p, &zero, Sense::Maximize).status != LpStatus::Infeasible
}

/// A point satisfying every constraint including strict ones, if any exists.
///
/// Solves `max ε` subject to `a·x − ε ≥ b` on strict rows, `a·x ≥ b` on weak
/// rows and `ε ≤ 1`.
pub fn strict_point(p: &HPolyhedron) -> Option<RationalVector> {
    use super::{Equality, HPolyhedron, Inequality};
    use num_bigint::BigInt;
    if !p.has_strict() {
        let zero = vec![Rational::zero(); p.dim()];
        let r = lp_optimize(p, &zero, Sense::Maximize);
        return r.witness.filter(|_| r.status == LpStatus::Optimal);
    }
    let n = p.dim();
    let lift = |normal: &[BigInt], eps: i64| {
        let mut v = normal.to_vec();
        v.push(BigInt::from(eps));
        v
    };
    let mut ineqs: Vec<Inequality> = p
        .inequalities()
        .iter()
        .map(|c| Inequality::weak(lift(&c.normal, if c.is_strict() { -1 } else { 0 }), c.rhs.clone()))
        .collect();
    let mut cap = vec![BigInt::zero(); n + 1];
    cap[n] = BigInt::from(-1);
    ineqs.push(Inequality::weak(cap, BigInt::from(-1)));
    let eqs: Vec<Equality> = p
        .equalities()
        .iter()
        .map(|e| Equality::new(lift(&e.normal, 0), e.rhs.clone()))
        .collect();
    let aux = HPolyhedron::new(n + 1, eqs, ineqs);
    let mut obj = vec![Rational::zero(); n + 1];
    obj[n] = Rational::one();
    let r = lp_optimize(&aux, &obj, Sense::Maximize);
    match (r.status, r.optimum) {
        (LpStatus::Optimal, Some(eps)) if eps.is_positive() => {
            let mut x = r.witness.unwrap();
            x.truncate(n);
            Some(x)
        }
        _ => None,
    }
}

/// True when `p` (with strictness respected) contains at least one point.
pub fn is_nonempty(p: &HPolyhedron) -> bool {
    strict_point(p).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::polytope::{Inequality, Strictness};

    fn unit_square() -> HPolyhedron {
        HPolyhedron::cube(2, 0, 1, Strictness::Weak)
    }

    #[test]
    fn max_x_over_unit_square() {
        let r = lp_optimize(&unit_square(), &[rat(1, 1), rat(0, 1)], Sense::Maximize);
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.optimum, Some(rat(1, 1)));
        let w = r.witness.unwrap();
        assert!(unit_square().contains(&w));
        assert_eq!(w[0], rat(1, 1));
    }

    #[test]
    fn infeasible_interval() {
        let p = HPolyhedron::new(
            1,
            vec![],
            vec![
                Inequality::weak(vec![int(1)], int(0)),
                Inequality::weak(vec![int(-1)], int(1)),
            ],
        );
        let r = lp_optimize(&p, &[rat(1, 1)], Sense::Maximize);
        assert_eq!(r.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let p = HPolyhedron::new(1, vec![], vec![Inequality::weak(vec![int(1)], int(0))]);
        let r = lp_optimize(&p, &[rat(1, 1)], Sense::Maximize);
        assert_eq!(r.status, LpStatus::Unbounded);
        assert!(r.witness.unwrap()[0] > rat(0, 1));
        let r = lp_optimize(&p, &[rat(1, 1)], Sense::Minimize);
        assert_eq!(r.optimum, Some(rat(0, 1)));
    }

    #[test]
    fn equality_constrained_optimum() {
        // x + y = 1, x, y >= 0, maximize 2x + y
        let p = HPolyhedron::new(
            2,
            vec![crate::polytope::Equality::new(vec![int(1), int(1)], int(1))],
            vec![
                Inequality::weak(vec![int(1), int(0)], int(0)),
                Inequality::weak(vec![int(0), int(1)], int(0)),
            ],
        );
        let r = lp_optimize(&p, &[rat(2, 1), rat(1, 1)], Sense::Maximize);
        assert_eq!(r.optimum, Some(rat(2, 1)));
    }

    #[test]
    fn strict_point_detects_empty_open_set() {
        // x >= 0, -x >= 0, x > 0 has closure {0} but no point.
        let p = HPolyhedron::new(
            1,
            vec![],
            vec![
                Inequality::weak(vec![int(-1)], int(0)),
                Inequality::strict(vec![int(1)], int(0)),
            ],
        );
        assert!(is_feasible(&p));
        assert!(strict_point(&p).is_none());
        let open = HPolyhedron::cube(2, 0, 1, Strictness::Strict);
        let x = strict_point(&open).unwrap();
        assert!(open.contains(&x));
    }
}
