//! Ehrhart quasipolynomials by exact counting and interpolation, open
//! counts by reciprocity, and the two inside-out counting paths.

mod count;
mod moebius;

pub use count::{count_lattice_points, LatticeCounter};
pub use moebius::{iop_count_moebius, Flat, IntersectionPoset};

use std::ops::ControlFlow;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{enumerate_regions, with_workers, InsideOutPolytope, Region};
use crate::error::{Error, Result};
use crate::exact::{Integer, Polynomial, Rational};
use crate::gfun::Quasipolynomial;
use crate::polytope::{full_dimensionalize, vertex_enumeration, HPolyhedron};

/// One exact count `|t·P ∩ Zᵈ|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountFunctionSample {
    pub t: u64,
    #[serde(with = "crate::exact::serde_int")]
    pub count: Integer,
}

/// Quasipolynomial of a full-dimensional polytope from direct counts.
///
/// Strictness flags are respected, so this also produces open and
/// half-open counting functions. The period is the denominator of the
/// closure.
pub(crate) fn full_dim_quasipolynomial(q: &HPolyhedron) -> Result<Quasipolynomial> {
    let d = q.dim();
    if d == 0 {
        let counter = LatticeCounter::new(q)?;
        return Ok(Quasipolynomial::from_polynomial(Polynomial::constant(
            Rational::from_integer(counter.count(1)?),
        )));
    }
    let period = vertex_enumeration(&q.closure())?
        .denominator()
        .to_usize()
        .ok_or(Error::Overflow)?;
    let counter = LatticeCounter::new(q)?;
    let mut constituents = Vec::with_capacity(period);
    for r in 0..period {
        let first = if r == 0 { 1 } else { 0 };
        let s_at = |j: usize| (r + (j + first) * period) as u64;
        let mut points = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let s = s_at(j);
            points.push((
                Rational::from_integer(s.into()),
                Rational::from_integer(counter.count(s)?),
            ));
        }
        let poly = Polynomial::interpolate(&points);
        let check = s_at(d + 1);
        let expected = Rational::from_integer(counter.count(check)?);
        let got = poly.eval(&Rational::from_integer(check.into()));
        if got != expected {
            return Err(Error::VerificationFailure(format!(
                "residue {r} mod {period}: interpolant gives {got} at t = {check}, direct count is {expected}"
            )));
        }
        constituents.push(poly);
    }
    Ok(Quasipolynomial::new(constituents).normalize())
}

/// `t ↦ |t·p ∩ Zᵈ|` for `t ≥ 1`, with strictness respected.
///
/// An empty `p` gives the zero quasipolynomial.
pub fn ehrhart_quasipolynomial(p: &HPolyhedron) -> Result<Quasipolynomial> {
    let (q, emb) = match full_dimensionalize(p) {
        Ok(v) => v,
        Err(Error::EmptyPolyhedron) => return Ok(Quasipolynomial::zero()),
        Err(e) => return Err(e),
    };
    let step = emb.step.to_usize().ok_or(Error::Overflow)?;
    Ok(full_dim_quasipolynomial(&q)?.stretch(step).normalize())
}

/// Counting function of the relative interior of `p`, obtained from the
/// closure by reciprocity.
pub fn open_quasipolynomial(p: &HPolyhedron) -> Result<Quasipolynomial> {
    let closure = p.closure();
    let (_, emb) = match full_dimensionalize(&closure) {
        Ok(v) => v,
        Err(Error::EmptyPolyhedron) => return Ok(Quasipolynomial::zero()),
        Err(e) => return Err(e),
    };
    Ok(ehrhart_quasipolynomial(&closure)?.reciprocal(emb.reduced_dim()))
}

/// `(−1)^dim · L_closure(−t)`, the number of integer points in the relative
/// interior of `t·p`.
pub fn open_count_via_reciprocity(p: &HPolyhedron, t: u64) -> Result<Integer> {
    let v = open_quasipolynomial(p)?.evaluate(&Integer::from(t));
    if !v.is_integer() {
        return Err(Error::VerificationFailure(format!(
            "open count at t = {t} evaluates to non-integer {v}"
        )));
    }
    Ok(v.to_integer())
}

/// Open counting function of one full-dimensional region.
pub fn region_quasipolynomial(region: &Region) -> Result<Quasipolynomial> {
    let closure = region.polytope.closure();
    Ok(full_dim_quasipolynomial(&closure)?.reciprocal(closure.dim()))
}

/// Sum of the open counting functions of `regions`, in list order.
///
/// The regions must be full-dimensional in a common space. The sum is taken
/// over the lcm of the region periods and then put in minimal-period form.
pub fn iop_count_regions(regions: &[Region]) -> Result<Quasipolynomial> {
    let parts: Vec<Quasipolynomial> = regions
        .par_iter()
        .map(region_quasipolynomial)
        .collect::<Result<_>>()?;
    Ok(parts
        .iter()
        .fold(Quasipolynomial::zero(), |acc, q| &acc + q)
        .normalize())
}

/// Inside-out counting function of `iop` via region enumeration, in the
/// original dilation parameter.
pub fn iop_quasipolynomial(
    iop: &InsideOutPolytope,
    split_depth: usize,
    worker_budget: usize,
) -> Result<Quasipolynomial> {
    let reduced = match iop.reduce() {
        Ok(r) => r,
        Err(Error::DegenerateArrangement { .. }) | Err(Error::EmptyPolyhedron) => {
            return Ok(Quasipolynomial::zero())
        }
        Err(e) => return Err(e),
    };
    let depth = split_depth.min(reduced.iop.hyperplanes.len());
    let regions = enumerate_regions(&reduced.iop, depth, worker_budget)?;
    let sum = with_workers(worker_budget, || iop_count_regions(&regions))??;
    let step = reduced.embedding.step.to_usize().ok_or(Error::Overflow)?;
    Ok(sum.stretch(step).normalize())
}

/// Checks `q` against `count` at two dilates per residue class beyond the
/// interpolation range, `r + (d+2)·p` and `r + (d+3)·p`.
pub fn verify_quasipolynomial(
    q: &Quasipolynomial,
    mut count: impl FnMut(u64) -> Result<Integer>,
) -> Result<Vec<CountFunctionSample>> {
    let p = q.period() as u64;
    let d = q.degree().unwrap_or(0) as u64;
    let mut checked = Vec::with_capacity(2 * q.period());
    for r in 0..p {
        for j in [d + 2, d + 3] {
            let t = r + j * p;
            let direct = count(t)?;
            let value = q.evaluate(&Integer::from(t));
            if value != Rational::from_integer(direct.clone()) {
                return Err(Error::VerificationFailure(format!(
                    "quasipolynomial gives {value} at t = {t}, direct count is {direct}"
                )));
            }
            checked.push(CountFunctionSample { t, count: direct });
        }
    }
    Ok(checked)
}

/// Integer points of `t·P°` on no hyperplane of `iop`, by enumerating the
/// points of `t·P°` and filtering.
pub fn count_inside_out_direct(iop: &InsideOutPolytope, t: u64) -> Result<Integer> {
    let reduced = match iop.reduce() {
        Ok(r) => r,
        Err(Error::DegenerateArrangement { .. }) | Err(Error::EmptyPolyhedron) => {
            return Ok(Integer::zero())
        }
        Err(e) => return Err(e),
    };
    let step = reduced.embedding.step.to_u64().ok_or(Error::Overflow)?;
    if !t.is_multiple_of(step) {
        return Ok(Integer::zero());
    }
    let s = t / step;
    let counter = LatticeCounter::new(&reduced.iop.polytope.interior())?;
    let hs: Vec<(Vec<i128>, i128)> = reduced
        .iop
        .hyperplanes
        .iter()
        .map(|h| {
            let n = h
                .normal
                .iter()
                .map(|c| c.to_i128().ok_or(Error::Overflow))
                .collect::<Result<_>>()?;
            let b = h.offset.to_i128().ok_or(Error::Overflow)? * s as i128;
            Ok((n, b))
        })
        .collect::<Result<_>>()?;
    let mut total = 0u128;
    counter.for_each_point(s, |u| {
        let on_some = hs
            .iter()
            .any(|(n, b)| n.iter().zip(u).map(|(a, x)| a * x).sum::<i128>() == *b);
        if !on_some {
            total += 1;
        }
        ControlFlow::Continue(())
    })?;
    Ok(Integer::from(total))
}
