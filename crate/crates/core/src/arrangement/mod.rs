//! Inside-out polytopes and region enumeration.
//!
//! An open polytope is split recursively by the hyperplanes of an
//! arrangement, in list order. A hyperplane that meets the interior of the
//! current piece yields two open pieces; any other hyperplane is consumed
//! without branching. The traversal is a depth-first walk of the resulting
//! binary tree with an explicit stack, so at most `|H| + 1` pieces are alive
//! at any time.
//!
//! Every piece carries a lineage string: one character per branching split,
//! `0` for the side `a·x > b` and `1` for `a·x < b`. Lineage order is the
//! order in which the sequential walk emits regions, which makes parallel
//! runs and resumed runs reproducible.

use std::fmt;
use std::ops::ControlFlow;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int_dot, to_rational_vec, Integer, IntegerVector, Rational};
use crate::polytope::{
    full_dimensionalize, lp_optimize, remove_redundant, strict_point, AffineEmbedding, Equality,
    HPolyhedron, Inequality, LpStatus, Sense,
};

/// The hyperplane `normal · x = offset`, dilated as `normal · x = t·offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hyperplane {
    #[serde(with = "crate::exact::serde_int_vec")]
    pub normal: IntegerVector,
    #[serde(with = "crate::exact::serde_int")]
    pub offset: Integer,
}

impl Hyperplane {
    /// Canonical form: `gcd(normal, offset) = 1`, first nonzero entry positive.
    pub fn new(normal: IntegerVector, offset: Integer) -> Self {
        let e = Equality::new(normal, offset);
        Self {
            normal: e.normal,
            offset: e.rhs,
        }
    }

    pub fn from_i64(normal: &[i64], offset: i64) -> Self {
        Self::new(normal.iter().map(|&x| x.into()).collect(), offset.into())
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn as_equality(&self) -> Equality {
        Equality::new(self.normal.clone(), self.offset.clone())
    }

    /// `normal · x > offset`
    pub fn positive_side(&self) -> Inequality {
        Inequality::strict(self.normal.clone(), self.offset.clone())
    }

    /// `normal · x < offset`
    pub fn negative_side(&self) -> Inequality {
        Inequality::strict(
            self.normal.iter().map(|x| -x).collect(),
            -self.offset.clone(),
        )
    }

    /// Whether the integer point `x` of the `t`-th dilate lies on this hyperplane.
    pub fn contains_point(&self, x: &[Integer], t: &Integer) -> bool {
        int_dot(&self.normal, x) == &self.offset * t
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .normal
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}*x{i}"))
            .collect();
        write!(f, "{} = {}", parts.join(" + "), self.offset)
    }
}

/// A polytope with a hyperplane arrangement removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsideOutPolytope {
    pub polytope: HPolyhedron,
    pub hyperplanes: Vec<Hyperplane>,
}

impl InsideOutPolytope {
    /// Drops exact duplicates, keeping the first occurrence of each.
    pub fn new(polytope: HPolyhedron, hyperplanes: Vec<Hyperplane>) -> Self {
        let mut unique: Vec<Hyperplane> = Vec::with_capacity(hyperplanes.len());
        for h in hyperplanes {
            assert_eq!(h.dim(), polytope.dim(), "hyperplane dimension mismatch");
            if !unique.contains(&h) {
                unique.push(h);
            }
        }
        Self {
            polytope,
            hyperplanes: unique,
        }
    }

    /// The same problem in full-dimensional reduced coordinates.
    pub fn reduce(&self) -> Result<ReducedIop> {
        let (q, embedding) = full_dimensionalize(&self.polytope)?;
        let restricted = dedupe_restricted(&self.hyperplanes, &embedding);
        if let Some(&index) = restricted.containing.first() {
            return Err(Error::DegenerateArrangement {
                index,
                hyperplane: self.hyperplanes[index].to_string(),
            });
        }
        Ok(ReducedIop {
            iop: InsideOutPolytope {
                polytope: q,
                hyperplanes: restricted.hyperplanes,
            },
            embedding,
            origins: restricted.origins,
        })
    }
}

/// A full-dimensional inside-out polytope and the map back to the original
/// coordinates. Counts at dilation `t` of the original problem equal counts
/// at `t / step` here, and vanish when `step ∤ t`.
#[derive(Clone, Debug)]
pub struct ReducedIop {
    pub iop: InsideOutPolytope,
    pub embedding: AffineEmbedding,
    /// For each reduced hyperplane, the original indices mapping onto it.
    pub origins: Vec<Vec<usize>>,
}

/// Outcome of restricting an arrangement to an affine hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restricted {
    /// Distinct restricted hyperplanes in order of first appearance.
    pub hyperplanes: Vec<Hyperplane>,
    pub origins: Vec<Vec<usize>>,
    /// Indices of hyperplanes containing the whole hull.
    pub containing: Vec<usize>,
    /// Indices of hyperplanes that miss the hull entirely.
    pub dropped: Vec<usize>,
}

/// Rewrites each hyperplane in the reduced coordinates of `embedding` and
/// merges those that coincide on the hull.
pub fn dedupe_restricted(hyperplanes: &[Hyperplane], embedding: &AffineEmbedding) -> Restricted {
    let mut out = Restricted {
        hyperplanes: Vec::new(),
        origins: Vec::new(),
        containing: Vec::new(),
        dropped: Vec::new(),
    };
    for (i, h) in hyperplanes.iter().enumerate() {
        let (a, b) = embedding.map_constraint(&h.normal, &h.offset);
        if a.iter().all(Zero::is_zero) {
            if b.is_zero() {
                out.containing.push(i);
            } else {
                out.dropped.push(i);
            }
            continue;
        }
        let r = Hyperplane::new(a, b);
        match out.hyperplanes.iter().position(|x| *x == r) {
            Some(k) => out.origins[k].push(i),
            None => {
                out.hyperplanes.push(r);
                out.origins.push(vec![i]);
            }
        }
    }
    out
}

/// Whether `h` meets the relative interior of `p`.
pub fn is_transverse(p: &HPolyhedron, h: &Hyperplane) -> Result<bool> {
    let closure = p.closure();
    let obj = to_rational_vec(&h.normal);
    let b = Rational::from_integer(h.offset.clone());
    let hi = lp_optimize(&closure, &obj, Sense::Maximize);
    match hi.status {
        LpStatus::Infeasible => return Err(Error::EmptyPolyhedron),
        LpStatus::Unbounded => {}
        LpStatus::Optimal => {
            if hi.optimum.expect("optimal") <= b {
                return Ok(false);
            }
        }
    }
    let lo = lp_optimize(&closure, &obj, Sense::Minimize);
    Ok(match lo.status {
        LpStatus::Infeasible => return Err(Error::EmptyPolyhedron),
        LpStatus::Unbounded => true,
        LpStatus::Optimal => lo.optimum.expect("optimal") < b,
    })
}

fn split_transverse(p: &HPolyhedron, h: &Hyperplane) -> [HPolyhedron; 2] {
    [
        remove_redundant(&p.with_inequality(h.positive_side())),
        remove_redundant(&p.with_inequality(h.negative_side())),
    ]
}

/// `{p ∩ a·x > b, p ∩ a·x < b}` when `h` is transverse, otherwise `{p}`.
pub fn split(p: &HPolyhedron, h: &Hyperplane) -> Result<Vec<HPolyhedron>> {
    if is_transverse(p, h)? {
        Ok(split_transverse(p, h).into())
    } else {
        Ok(vec![p.clone()])
    }
}

/// One open cell of an inside-out polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub polytope: HPolyhedron,
    pub lineage: String,
}

/// A piece of the traversal still to be split by hyperplanes `next..`.
#[derive(Clone, Debug)]
pub struct Subproblem {
    pub polytope: HPolyhedron,
    pub next: usize,
    pub lineage: String,
}

/// Traversal counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WalkStats {
    /// Largest number of pieces held at once.
    pub peak_live: usize,
    /// Tree nodes visited, leaves included.
    pub nodes: usize,
    pub regions: usize,
}

impl WalkStats {
    fn merge(&mut self, other: &WalkStats) {
        self.peak_live = self.peak_live.max(other.peak_live);
        self.nodes += other.nodes;
        self.regions += other.regions;
    }
}

fn check_root(iop: &InsideOutPolytope) -> Result<()> {
    let p = &iop.polytope;
    if strict_point(p).is_none() {
        return Err(Error::EmptyPolyhedron);
    }
    let closure = p.closure();
    for (index, h) in iop.hyperplanes.iter().enumerate() {
        let obj = to_rational_vec(&h.normal);
        let b = Rational::from_integer(h.offset.clone());
        let hi = lp_optimize(&closure, &obj, Sense::Maximize);
        let lo = lp_optimize(&closure, &obj, Sense::Minimize);
        if hi.optimum.as_ref() == Some(&b) && lo.optimum.as_ref() == Some(&b) {
            return Err(Error::DegenerateArrangement {
                index,
                hyperplane: h.to_string(),
            });
        }
    }
    Ok(())
}

/// First transverse hyperplane at or after `from`.
fn next_transverse(p: &HPolyhedron, hyperplanes: &[Hyperplane], from: usize) -> Result<Option<usize>> {
    for (i, h) in hyperplanes.iter().enumerate().skip(from) {
        if is_transverse(p, h)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Expands the tree through hyperplane indices below `split_depth`,
/// returning the frontier in lineage order.
pub fn subproblems(iop: &InsideOutPolytope, split_depth: usize) -> Result<Vec<Subproblem>> {
    check_root(iop)?;
    let hs = &iop.hyperplanes;
    let mut out = Vec::new();
    let mut stack = vec![Subproblem {
        polytope: iop.polytope.clone(),
        next: 0,
        lineage: String::new(),
    }];
    while let Some(node) = stack.pop() {
        match next_transverse(&node.polytope, hs, node.next)? {
            Some(i) if i < split_depth => {
                let [plus, minus] = split_transverse(&node.polytope, &hs[i]);
                stack.push(Subproblem {
                    polytope: minus,
                    next: i + 1,
                    lineage: format!("{}1", node.lineage),
                });
                stack.push(Subproblem {
                    polytope: plus,
                    next: i + 1,
                    lineage: format!("{}0", node.lineage),
                });
            }
            found => out.push(Subproblem {
                next: found.unwrap_or(hs.len()),
                ..node
            }),
        }
    }
    Ok(out)
}

/// Whether the subtree rooted at lineage `node` lies entirely at or before
/// the already-processed lineage `done`.
fn subtree_done(node: &str, done: &str) -> bool {
    !done.starts_with(node) && node < done
}

/// Depth-first walk of one subproblem, calling `visit` on each region in
/// lineage order. Regions with lineage `≤ resume_after` are skipped.
pub fn walk(
    hyperplanes: &[Hyperplane],
    sub: Subproblem,
    resume_after: Option<&str>,
    stats: &mut WalkStats,
    mut visit: impl FnMut(Region) -> Result<ControlFlow<()>>,
) -> Result<ControlFlow<()>> {
    let mut stack = vec![sub];
    stats.peak_live = stats.peak_live.max(1);
    while let Some(node) = stack.pop() {
        stats.nodes += 1;
        if let Some(done) = resume_after {
            if subtree_done(&node.lineage, done) {
                continue;
            }
        }
        match next_transverse(&node.polytope, hyperplanes, node.next)? {
            Some(i) => {
                let [plus, minus] = split_transverse(&node.polytope, &hyperplanes[i]);
                stack.push(Subproblem {
                    polytope: minus,
                    next: i + 1,
                    lineage: format!("{}1", node.lineage),
                });
                stack.push(Subproblem {
                    polytope: plus,
                    next: i + 1,
                    lineage: format!("{}0", node.lineage),
                });
                stats.peak_live = stats.peak_live.max(stack.len());
            }
            None => {
                if resume_after.is_some_and(|done| node.lineage.as_str() <= done) {
                    continue;
                }
                stats.regions += 1;
                let region = Region {
                    polytope: node.polytope,
                    lineage: node.lineage,
                };
                if visit(region)?.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Runs `f` inside a pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// All regions in lineage order, with traversal counters.
pub fn enumerate_regions_with_stats(
    iop: &InsideOutPolytope,
    split_depth: usize,
    worker_budget: usize,
) -> Result<(Vec<Region>, WalkStats)> {
    let subs = subproblems(iop, split_depth)?;
    let hs = &iop.hyperplanes;
    let parts: Vec<Result<(Vec<Region>, WalkStats)>> = with_workers(worker_budget, || {
        subs.into_par_iter()
            .map(|sub| {
                let mut stats = WalkStats::default();
                let mut regions = Vec::new();
                let _ = walk(hs, sub, None, &mut stats, |r| {
                    regions.push(r);
                    Ok(ControlFlow::Continue(()))
                })?;
                Ok((regions, stats))
            })
            .collect()
    })?;
    let mut regions = Vec::new();
    let mut stats = WalkStats::default();
    for part in parts {
        let (r, s) = part?;
        regions.extend(r);
        stats.merge(&s);
    }
    Ok((regions, stats))
}

/// All regions of `iop` in lineage order.
pub fn enumerate_regions(
    iop: &InsideOutPolytope,
    split_depth: usize,
    worker_budget: usize,
) -> Result<Vec<Region>> {
    enumerate_regions_with_stats(iop, split_depth, worker_budget).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::polytope::{volume, Strictness};

    fn open_square() -> HPolyhedron {
        HPolyhedron::cube(2, 0, 1, Strictness::Strict)
    }

    #[test]
    fn transversality_on_the_square() {
        let sq = HPolyhedron::cube(2, 0, 1, Strictness::Weak);
        assert!(is_transverse(&sq, &Hyperplane::from_i64(&[2, 0], 1)).unwrap());
        assert!(!is_transverse(&sq, &Hyperplane::from_i64(&[1, 0], 0)).unwrap());
        assert!(!is_transverse(&sq, &Hyperplane::from_i64(&[1, 0], 2)).unwrap());
    }

    #[test]
    fn split_examples() {
        let halves = split(&open_square(), &Hyperplane::from_i64(&[2, 0], 1)).unwrap();
        assert_eq!(halves.len(), 2);
        for h in &halves {
            assert!(h.is_open());
            assert_eq!(volume(h).unwrap(), crate::exact::rat(1, 2));
        }
        let same = split(&open_square(), &Hyperplane::from_i64(&[1, 0], 0)).unwrap();
        assert_eq!(same, vec![open_square()]);

        let tri = HPolyhedron::new(
            2,
            vec![],
            vec![
                Inequality::strict(vec![int(1), int(0)], int(0)),
                Inequality::strict(vec![int(0), int(1)], int(0)),
                Inequality::strict(vec![int(-1), int(-1)], int(-1)),
            ],
        );
        let parts = split(&tri, &Hyperplane::from_i64(&[1, -1], 0)).unwrap();
        assert_eq!(parts.len(), 2);
        for p in &parts {
            assert_eq!(p.inequalities().len(), 3);
        }
    }

    #[test]
    fn square_region_counts() {
        let one = InsideOutPolytope::new(open_square(), vec![Hyperplane::from_i64(&[1, -1], 0)]);
        assert_eq!(enumerate_regions(&one, 0, 1).unwrap().len(), 2);
        let two = InsideOutPolytope::new(
            open_square(),
            vec![Hyperplane::from_i64(&[1, -1], 0), Hyperplane::from_i64(&[1, 1], 1)],
        );
        let regions = enumerate_regions(&two, 0, 1).unwrap();
        let lineages: Vec<&str> = regions.iter().map(|r| r.lineage.as_str()).collect();
        assert_eq!(lineages, ["00", "01", "10", "11"]);
        let boundary = InsideOutPolytope::new(open_square(), vec![Hyperplane::from_i64(&[1, 0], 0)]);
        assert_eq!(enumerate_regions(&boundary, 0, 1).unwrap().len(), 1);
    }

    #[test]
    fn parallel_split_matches_sequential() {
        let iop = InsideOutPolytope::new(
            HPolyhedron::cube(2, 0, 3, Strictness::Strict),
            vec![
                Hyperplane::from_i64(&[1, -1], 0),
                Hyperplane::from_i64(&[1, 1], 3),
                Hyperplane::from_i64(&[1, 0], 1),
                Hyperplane::from_i64(&[0, 1], 2),
                Hyperplane::from_i64(&[1, -2], 0),
            ],
        );
        let base = enumerate_regions(&iop, 0, 1).unwrap();
        for (depth, workers) in [(1, 2), (3, 4), (5, 3)] {
            assert_eq!(enumerate_regions(&iop, depth, workers).unwrap(), base);
        }
    }

    #[test]
    fn degenerate_hyperplane_is_reported() {
        let line = HPolyhedron::new(
            2,
            vec![Equality::new(vec![int(1), int(-1)], int(0))],
            vec![
                Inequality::strict(vec![int(1), int(0)], int(0)),
                Inequality::strict(vec![int(-1), int(0)], int(-1)),
            ],
        );
        let iop = InsideOutPolytope::new(line.clone(), vec![Hyperplane::from_i64(&[1, -1], 0)]);
        assert!(matches!(
            enumerate_regions(&iop, 0, 1),
            Err(Error::DegenerateArrangement { index: 0, .. })
        ));
        assert!(matches!(iop.reduce(), Err(Error::DegenerateArrangement { .. })));
    }

    #[test]
    fn restriction_merges_and_drops() {
        let id = AffineEmbedding::identity(2);
        let r = dedupe_restricted(
            &[Hyperplane::from_i64(&[1, -1], 0), Hyperplane::from_i64(&[2, -2], 0)],
            &id,
        );
        assert_eq!(r.hyperplanes.len(), 1);

        // hull x + y = 1; x − y = 0 becomes a point constraint on one coordinate
        let seg = HPolyhedron::new(
            2,
            vec![Equality::new(vec![int(1), int(1)], int(1))],
            vec![
                Inequality::strict(vec![int(1), int(0)], int(0)),
                Inequality::strict(vec![int(0), int(1)], int(0)),
            ],
        );
        let (_, emb) = full_dimensionalize(&seg).unwrap();
        let r = dedupe_restricted(
            &[
                Hyperplane::from_i64(&[1, -1], 0),
                Hyperplane::from_i64(&[1, 1], 5),
                Hyperplane::from_i64(&[1, 1], 1),
            ],
            &emb,
        );
        assert_eq!(r.hyperplanes.len(), 1);
        assert_eq!(r.hyperplanes[0].dim(), 1);
        assert_eq!(r.dropped, vec![1]);
        assert_eq!(r.containing, vec![2]);
    }

    #[test]
    fn resume_skips_processed_regions() {
        let iop = InsideOutPolytope::new(
            HPolyhedron::cube(2, 0, 3, Strictness::Strict),
            vec![
                Hyperplane::from_i64(&[1, -1], 0),
                Hyperplane::from_i64(&[1, 1], 3),
                Hyperplane::from_i64(&[1, 0], 1),
            ],
        );
        let all = enumerate_regions(&iop, 0, 1).unwrap();
        for k in 0..all.len() {
            let root = subproblems(&iop, 0).unwrap().remove(0);
            let mut rest = Vec::new();
            let _ = walk(&iop.hyperplanes, root, Some(&all[k].lineage), &mut WalkStats::default(), |r| {
                rest.push(r);
                Ok(ControlFlow::Continue(()))
            })
            .unwrap();
            assert_eq!(rest, all[k + 1..].to_vec());
        }
    }
}
