//! Vertex enumeration by the double description method.
//!
//! The polyhedron `{x : A x ≥ b}` is homogenized to the cone
//! `{(x₀, x) : A x − b x₀ ≥ 0, x₀ ≥ 0}`. Constraints are inserted one at a
//! time into an initial simplicial cone; rays are kept as primitive integer
//! vectors and adjacency is decided by the combinatorial zero-set test.

use num_traits::{Signed, Zero};

use super::{HPolyhedron, VPolytope};
use crate::error::{Error, Result};
use crate::exact::{
    clear_denominators, int_dot, primitive, rat_int, Integer, IntegerVector, Rational,
    RationalMatrix,
};

#[derive(Clone)]
struct Ray {
    coords: IntegerVector,
    /// Indices (into the constraint rows) where the ray is tight.
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bits_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn bits_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn popcount(a: &[u64]) -> usize {
    a.iter().map(|x| x.count_ones() as usize).sum()
}

/// Homogenized constraint rows `(−b, a)` plus `x₀ ≥ 0`; equalities appear as
/// two opposite rows.
fn cone_rows(p: &HPolyhedron) -> Vec<IntegerVector> {
    let n = p.dim();
    let mut rows = Vec::new();
    let mut x0 = vec![Integer::zero(); n + 1];
    x0[0] = Integer::from(1);
    rows.push(x0);
    for e in p.equalities() {
        for c in e.as_inequalities() {
            let mut r = vec![-c.rhs.clone()];
            r.extend(c.normal.iter().cloned());
            rows.push(r);
        }
    }
    for c in p.inequalities() {
        let mut r = vec![-c.rhs.clone()];
        r.extend(c.normal.iter().cloned());
        rows.push(r);
    }
    rows
}

/// Extreme rays of the pointed cone `{y : rows · y ≥ 0}`.
///
/// Returns `None` when the cone is not pointed.
fn extreme_rays(rows: &[IntegerVector], dim: usize) -> Option<Vec<IntegerVector>> {
    let words = rows.len().div_ceil(64).max(1);
    // Greedy choice of `dim` independent rows for the initial cone.
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<Vec<Rational>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = basis_rows.clone();
        trial.push(r.iter().map(rat_int).collect());
        if RationalMatrix::from_rows(dim, &trial).rank() == trial.len() {
            basis_rows = trial;
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    if chosen.len() < dim {
        return None;
    }
    // Columns of the inverse of the chosen rows span the initial cone.
    let m = RationalMatrix::from_rows(dim, &basis_rows);
    let mut rays: Vec<Ray> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut e = vec![Rational::zero(); dim];
        e[j] = Rational::from_integer(1.into());
        let col = m.solve(&e).expect("chosen rows are independent");
        let coords = clear_denominators(&col);
        let mut zeros = vec![0u64; words];
        for (k, &ci) in chosen.iter().enumerate() {
            if k != j {
                bit_set(&mut zeros, ci);
            }
        }
        rays.push(Ray { coords, zeros });
    }

    let mut processed: Vec<usize> = chosen.clone();
    for (i, row) in rows.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let values: Vec<Integer> = rays.iter().map(|r| int_dot(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        let zer: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_zero()).collect();
        processed.push(i);
        if neg.is_empty() {
            for &k in &zer {
                bit_set(&mut rays[k].zeros, i);
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for &k in pos.iter() {
            next.push(rays[k].clone());
        }
        for &k in &zer {
            let mut r = rays[k].clone();
            bit_set(&mut r.zeros, i);
            next.push(r);
        }
        for &p in &pos {
            for &q in &neg {
                let common = bits_and(&rays[p].zeros, &rays[q].zeros);
                if popcount(&common) + 2 < dim {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .filter(|&k| k != p && k != q)
                    .all(|k| !bits_subset(&common, &rays[k].zeros));
                if !adjacent {
                    continue;
                }
                let vp = &values[p];
                let vq = -&values[q];
                let coords: IntegerVector = rays[q]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(a, b)| vp * a + &vq * b)
                    .collect();
                let mut zeros = common;
                bit_set(&mut zeros, i);
                next.push(Ray {
                    coords: primitive(&coords),
                    zeros,
                });
            }
        }
        rays = next;
    }
    Some(rays.into_iter().map(|r| r.coords).collect())
}

/// Vertices of the closure of `p`.
pub fn vertex_enumeration(p: &HPolyhedron) -> Result<VPolytope> {
    let n = p.dim();
    let rows = cone_rows(p);
    let Some(rays) = extreme_rays(&rows, n + 1) else {
        // Not pointed: the polyhedron contains a line, or it is empty.
        return Err(if super::lp::is_feasible(p) {
            Error::UnboundedPolyhedron
        } else {
            Error::EmptyPolyhedron
        });
    };
    let mut vertices = Vec::new();
    let mut has_direction = false;
    for r in rays {
        if r[0].is_positive() {
            let x0 = rat_int(&r[0]);
            vertices.push(r[1..].iter().map(|c| rat_int(c) / &x0).collect::<Vec<_>>());
        } else if r.iter().any(|c| !c.is_zero()) {
            has_direction = true;
        }
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    if has_direction {
        return Err(Error::UnboundedPolyhedron);
    }
    vertices.sort();
    vertices.dedup();
    Ok(VPolytope { vertices })
}
