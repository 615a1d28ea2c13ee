//! Integer-point counting in dilates of a full-dimensional polytope.
//!
//! The polytope is projected onto its leading coordinates by Fourier-Motzkin
//! elimination once. At dilation `s`, the integer range of coordinate `k`
//! given an integer prefix comes from the projection onto the first `k + 1`
//! coordinates, so the recursion never explores an empty real fiber. The
//! innermost coordinate is counted by range length.

use std::ops::ControlFlow;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{Integer, Rational};
use crate::polytope::{
    full_dimensionalize, lp_optimize, remove_redundant, HPolyhedron, Inequality, LpStatus, Sense,
    Strictness,
};

#[derive(Clone, Debug)]
struct Row {
    /// Coefficients on the first `k + 1` ordered coordinates.
    coeffs: Vec<i128>,
    rhs: i128,
    strict: bool,
}

/// Precomputed projections of one full-dimensional polytope.
#[derive(Clone, Debug)]
pub struct LatticeCounter {
    dim: usize,
    /// `order[k]` is the original coordinate handled at depth `k`.
    order: Vec<usize>,
    /// Rows of the projection onto the first `k + 1` ordered coordinates
    /// that involve coordinate `k`.
    levels: Vec<Vec<Row>>,
    /// Constant rows (no coordinates); checked once per dilation.
    constants: Vec<Row>,
}

fn to_i128(v: &Integer) -> Result<i128> {
    v.to_i128().ok_or(Error::Overflow)
}

fn fm_eliminate(p: &HPolyhedron, j: usize) -> HPolyhedron {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for c in p.inequalities() {
        let cj = &c.normal[j];
        let drop_j = |n: &[Integer]| -> Vec<Integer> {
            n.iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, x)| x.clone())
                .collect()
        };
        if cj.is_zero() {
            out.push(Inequality::new(drop_j(&c.normal), c.rhs.clone(), c.strictness));
        } else if cj > &Integer::zero() {
            pos.push(c);
        } else {
            neg.push(c);
        }
    }
    for a in &pos {
        for b in &neg {
            let fa = -b.normal[j].clone();
            let fb = a.normal[j].clone();
            let normal: Vec<Integer> = (0..p.dim())
                .filter(|&i| i != j)
                .map(|i| &a.normal[i] * &fa + &b.normal[i] * &fb)
                .collect();
            let rhs = &a.rhs * &fa + &b.rhs * &fb;
            let strictness = if a.is_strict() || b.is_strict() {
                Strictness::Strict
            } else {
                Strictness::Weak
            };
            out.push(Inequality::new(normal, rhs, strictness));
        }
    }
    let (constant, rest): (Vec<_>, Vec<_>) = out
        .into_iter()
        .partition(|c| c.normal.iter().all(Zero::is_zero));
    let mut q = HPolyhedron::new(p.dim() - 1, Vec::new(), rest);
    // Constant rows survive as a zero-normal marker on the next projection.
    for c in constant {
        q.add_inequality(c);
    }
    q
}

impl LatticeCounter {
    /// `p` must be bounded with no equalities.
    pub fn new(p: &HPolyhedron) -> Result<Self> {
        assert!(p.equalities().is_empty(), "counter expects no equalities");
        let n = p.dim();
        // Outer coordinates get the narrowest LP ranges.
        let closure = p.closure();
        let mut widths = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::from_integer(1.into());
            let hi = lp_optimize(&closure, &e, Sense::Maximize);
            let lo = lp_optimize(&closure, &e, Sense::Minimize);
            match (hi.status, lo.status) {
                (LpStatus::Infeasible, _) | (_, LpStatus::Infeasible) => {
                    return Err(Error::EmptyPolyhedron)
                }
                (LpStatus::Optimal, LpStatus::Optimal) => {
                    widths.push((hi.optimum.unwrap() - lo.optimum.unwrap(), i))
                }
                _ => return Err(Error::UnboundedPolyhedron),
            }
        }
        widths.sort();
        let order: Vec<usize> = widths.into_iter().map(|(_, i)| i).collect();

        // Reorder coordinates, then eliminate from the innermost outwards.
        let permuted: Vec<Inequality> = p
            .inequalities()
            .iter()
            .map(|c| {
                Inequality::new(
                    order.iter().map(|&i| c.normal[i].clone()).collect(),
                    c.rhs.clone(),
                    c.strictness,
                )
            })
            .collect();
        let mut current = HPolyhedron::new(n, Vec::new(), permuted);
        let mut levels = vec![Vec::new(); n];
        for k in (0..n).rev() {
            let mut rest = Vec::new();
            for c in current.inequalities() {
                if c.normal[k].is_zero() {
                    continue;
                }
                rest.push(Row {
                    coeffs: c.normal.iter().map(to_i128).collect::<Result<_>>()?,
                    rhs: to_i128(&c.rhs)?,
                    strict: c.is_strict(),
                });
            }
            if k > 0 || !rest.is_empty() {
                levels[k] = rest;
            }
            if k > 0 {
                current = fm_eliminate(&current, k);
                let (constant, proper): (Vec<_>, Vec<_>) = current
                    .inequalities()
                    .iter()
                    .cloned()
                    .partition(|c| c.normal.iter().all(Zero::is_zero));
                current = remove_redundant(&HPolyhedron::new(k, Vec::new(), proper));
                for c in constant {
                    current.add_inequality(c);
                }
            }
        }
        let constants = if n == 0 {
            p.inequalities()
                .iter()
                .map(|c| {
                    Ok(Row {
                        coeffs: Vec::new(),
                        rhs: to_i128(&c.rhs)?,
                        strict: c.is_strict(),
                    })
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            dim: n,
            order,
            levels,
            constants,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn constants_hold(&self, s: i128) -> Result<bool> {
        for r in &self.constants {
            let rhs = r.rhs.checked_mul(s).ok_or(Error::Overflow)?;
            let ok = if r.strict { 0 > rhs } else { 0 >= rhs };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Integer range of coordinate `k` for the given prefix, as `(lo, hi)`.
    fn range(&self, k: usize, prefix: &[i128], s: i128) -> Result<(i128, i128)> {
        let mut lo = i128::MIN;
        let mut hi = i128::MAX;
        for row in &self.levels[k] {
            let mut r = row.rhs.checked_mul(s).ok_or(Error::Overflow)?;
            for (c, x) in row.coeffs[..k].iter().zip(prefix) {
                r = r
                    .checked_sub(c.checked_mul(*x).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?;
            }
            let c = row.coeffs[k];
            // c·x ≥ r (or > r)
            if c > 0 {
                let b = if row.strict {
                    r.div_euclid(c) + 1
                } else {
                    -((-r).div_euclid(c))
                };
                lo = lo.max(b);
            } else {
                let c = -c;
                // x ≤ −r/c
                let b = if row.strict {
                    -(r.div_euclid(c) + 1)
                } else {
                    (-r).div_euclid(c)
                };
                hi = hi.min(b);
            }
        }
        if lo == i128::MIN || hi == i128::MAX {
            return Err(Error::UnboundedPolyhedron);
        }
        Ok((lo, hi))
    }

    fn count_from(&self, k: usize, prefix: &mut Vec<i128>, s: i128) -> Result<u128> {
        let (lo, hi) = self.range(k, prefix, s)?;
        if hi < lo {
            return Ok(0);
        }
        if k + 1 == self.dim {
            return Ok((hi - lo + 1) as u128);
        }
        let mut total = 0u128;
        for x in lo..=hi {
            prefix.push(x);
            total += self.count_from(k + 1, prefix, s)?;
            prefix.pop();
        }
        Ok(total)
    }

    /// Number of integer points in the `s`-th dilate.
    pub fn count(&self, s: u64) -> Result<Integer> {
        let s = s as i128;
        if !self.constants_hold(s)? {
            return Ok(Integer::zero());
        }
        if self.dim == 0 {
            return Ok(Integer::from(1));
        }
        Ok(Integer::from(self.count_from(0, &mut Vec::with_capacity(self.dim), s)?))
    }

    fn visit_from(
        &self,
        k: usize,
        prefix: &mut Vec<i128>,
        s: i128,
        f: &mut dyn FnMut(&[i128]) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        let (lo, hi) = self.range(k, prefix, s)?;
        for x in lo..=hi {
            prefix.push(x);
            let flow = if k + 1 == self.dim {
                // un-permute
                let mut point = vec![0i128; self.dim];
                for (pos, &orig) in self.order.iter().enumerate() {
                    point[orig] = prefix[pos];
                }
                f(&point)
            } else {
                self.visit_from(k + 1, prefix, s, f)?
            };
            prefix.pop();
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Calls `f` on every integer point of the `s`-th dilate, in original
    /// coordinate order.
    pub fn for_each_point(
        &self,
        s: u64,
        mut f: impl FnMut(&[i128]) -> ControlFlow<()>,
    ) -> Result<()> {
        let s = s as i128;
        if !self.constants_hold(s)? {
            return Ok(());
        }
        if self.dim == 0 {
            let _ = f(&[]);
            return Ok(());
        }
        let _ = self.visit_from(0, &mut Vec::with_capacity(self.dim), s, &mut f)?;
        Ok(())
    }
}

/// `|t·p ∩ Zᵈ|` respecting strictness; `p` may be lower-dimensional.
pub fn count_lattice_points(p: &HPolyhedron, t: u64) -> Result<Integer> {
    let (q, emb) = match full_dimensionalize(p) {
        Ok(v) => v,
        Err(Error::EmptyPolyhedron) => return Ok(Integer::zero()),
        Err(e) => return Err(e),
    };
    let step = emb.step.to_u64().ok_or(Error::Overflow)?;
    if !t.is_multiple_of(step) {
        return Ok(Integer::zero());
    }
    LatticeCounter::new(&q)?.count(t / step)
}
