//! The inside-out count by Möbius inversion over the intersection poset.
//!
//! A flat is a nonempty intersection of arrangement hyperplanes that meets
//! the open polytope. With `g(u)` the number of points of `t·P` on the flat
//! `u` and `f(u)` the number whose smallest containing flat is exactly `u`,
//! `g(u) = Σ_{v ⊆ u} f(v)`, so the count off every hyperplane is
//! `f(0̂) = Σ_u μ(0̂, u) · g(u)`.

use std::collections::HashSet;

use num_traits::{ToPrimitive, Zero};

use super::LatticeCounter;
use crate::arrangement::{InsideOutPolytope, ReducedIop};
use crate::error::{Error, Result};
use crate::exact::{rat_int, Integer, Rational, RationalMatrix};
use crate::polytope::{full_dimensionalize, strict_point, Equality, HPolyhedron};

/// One element of the intersection poset, in reduced coordinates.
#[derive(Clone, Debug)]
pub struct Flat {
    pub equalities: Vec<Equality>,
    /// Indices of the reduced hyperplanes containing this flat, ascending.
    pub hyperplanes: Vec<usize>,
    pub mobius: i64,
}

/// Flats of an inside-out polytope meeting its open polytope, with the
/// counters needed to evaluate each term.
#[derive(Debug)]
pub struct IntersectionPoset {
    reduced: ReducedIop,
    flats: Vec<Flat>,
    /// Per flat: the reduction step and the counter of `P° ∩ u`.
    terms: Vec<(u64, LatticeCounter)>,
}

/// Reduced row echelon form of the augmented rows `[a | b]`, or `None` when
/// the system is inconsistent.
fn echelon_key(eqs: &[Equality], dim: usize) -> Option<Vec<Vec<Rational>>> {
    let rows: Vec<Vec<Rational>> = eqs
        .iter()
        .map(|e| {
            let mut r: Vec<Rational> = e.normal.iter().map(rat_int).collect();
            r.push(rat_int(&e.rhs));
            r
        })
        .collect();
    let rref = RationalMatrix::from_rows(dim + 1, &rows).rref();
    if rref.pivots.contains(&dim) {
        return None;
    }
    Some(rref.matrix.to_rows().into_iter().take(rref.rank).collect())
}

fn rank(eqs: &[Equality], dim: usize) -> usize {
    let rows: Vec<Vec<Rational>> = eqs
        .iter()
        .map(|e| {
            let mut r: Vec<Rational> = e.normal.iter().map(rat_int).collect();
            r.push(rat_int(&e.rhs));
            r
        })
        .collect();
    RationalMatrix::from_rows(dim + 1, &rows).rank()
}

impl IntersectionPoset {
    /// Builds the poset of an already reduced inside-out polytope.
    pub fn build(reduced: ReducedIop) -> Result<Self> {
        let p = &reduced.iop.polytope;
        let dim = p.dim();
        let hs: Vec<Equality> = reduced.iop.hyperplanes.iter().map(|h| h.as_equality()).collect();
        let interior = p.interior();
        let mut flats = vec![Flat {
            equalities: Vec::new(),
            hyperplanes: Vec::new(),
            mobius: 1,
        }];
        let mut seen: HashSet<Vec<Vec<Rational>>> = HashSet::new();
        seen.insert(Vec::new());
        let mut level_start = 0;
        while level_start < flats.len() {
            let level_end = flats.len();
            for f in level_start..level_end {
                for (i, h) in hs.iter().enumerate() {
                    if flats[f].hyperplanes.contains(&i) {
                        continue;
                    }
                    let mut eqs = flats[f].equalities.clone();
                    eqs.push(h.clone());
                    let Some(key) = echelon_key(&eqs, dim) else {
                        continue;
                    };
                    if !seen.insert(key) {
                        continue;
                    }
                    let mut meets = interior.clone();
                    for e in &eqs {
                        meets.add_equality(e.clone());
                    }
                    if strict_point(&meets).is_none() {
                        continue;
                    }
                    let r = eqs.len();
                    let containing: Vec<usize> = (0..hs.len())
                        .filter(|&j| {
                            let mut with = eqs.clone();
                            with.push(hs[j].clone());
                            rank(&with, dim) == r
                        })
                        .collect();
                    flats.push(Flat {
                        equalities: eqs,
                        hyperplanes: containing,
                        mobius: 0,
                    });
                }
            }
            level_start = level_end;
        }
        // Flats are stored by increasing codimension, so every proper
        // superset flat precedes the flat itself.
        for g in 1..flats.len() {
            let mut sum = 0i64;
            for f in 0..g {
                let sub = flats[f].hyperplanes.len() < flats[g].hyperplanes.len()
                    && flats[f]
                        .hyperplanes
                        .iter()
                        .all(|j| flats[g].hyperplanes.contains(j));
                if sub {
                    sum += flats[f].mobius;
                }
            }
            flats[g].mobius = -sum;
        }
        let mut terms = Vec::with_capacity(flats.len());
        for f in &flats {
            let mut piece: HPolyhedron = interior.clone();
            for e in &f.equalities {
                piece.add_equality(e.clone());
            }
            let (q, emb) = full_dimensionalize(&piece)?;
            let step = emb.step.to_u64().ok_or(Error::Overflow)?;
            terms.push((step, LatticeCounter::new(&q)?));
        }
        Ok(Self {
            reduced,
            flats,
            terms,
        })
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn reduced(&self) -> &ReducedIop {
        &self.reduced
    }

    /// `Σ_u μ(0̂, u) · |t·(P° ∩ u) ∩ Zᵈ|` at dilation `t` of the original
    /// problem.
    pub fn count(&self, t: u64) -> Result<Integer> {
        let step = self.reduced.embedding.step.to_u64().ok_or(Error::Overflow)?;
        if !t.is_multiple_of(step) {
            return Ok(Integer::zero());
        }
        let s = t / step;
        let mut total = Integer::zero();
        for (f, (k, counter)) in self.flats.iter().zip(&self.terms) {
            if f.mobius == 0 || !s.is_multiple_of(*k) {
                continue;
            }
            total += counter.count(s / k)? * Integer::from(f.mobius);
        }
        Ok(total)
    }
}

/// Inside-out count of `iop` at dilation `t` by Möbius inversion.
pub fn iop_count_moebius(iop: &InsideOutPolytope, t: u64) -> Result<Integer> {
    match iop.reduce() {
        Ok(r) => IntersectionPoset::build(r)?.count(t),
        Err(Error::DegenerateArrangement { .. }) | Err(Error::EmptyPolyhedron) => {
            Ok(Integer::zero())
        }
        Err(e) => Err(e),
    }
}
