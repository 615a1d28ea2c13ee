//! Magic-square inside-out polytopes.
//!
//! The affine problem lives on `{x ∈ R^{n²} : every line sums to 1}` with
//! all entries positive; the cubical problem on the subspace where all line
//! sums agree, intersected with the open unit cube. Both remove the
//! hyperplanes `x_a = x_b` for every pair of cells, so that lattice points
//! of the `t`-th dilate are exactly the magic squares with distinct entries.

mod brute;

pub use brute::{brute_force_bound, brute_force_count};

use std::fmt;
use std::str::FromStr;

use num_integer::Integer as _;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{enumerate_regions, with_workers, Hyperplane, InsideOutPolytope};
use crate::ehrhart::{iop_quasipolynomial, region_quasipolynomial, CountFunctionSample};
use crate::error::{Error, Result};
use crate::exact::Integer;
use crate::gfun::{Quasipolynomial, RationalGF};
use crate::polytope::{Equality, HPolyhedron, Inequality};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Affine,
    Cubical,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Affine => "affine",
            Variant::Cubical => "cubical",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "affine" => Ok(Variant::Affine),
            "cubical" => Ok(Variant::Cubical),
            other => Err(Error::InvalidInput(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MagicSpec {
    pub n: usize,
    pub variant: Variant,
}

impl MagicSpec {
    pub fn new(n: usize, variant: Variant) -> Self {
        Self { n, variant }
    }
}

/// Rows, columns, the main diagonal and the anti-diagonal of an `n × n`
/// grid, as row-major cell indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineSumSystem {
    pub n: usize,
    pub lines: Vec<Vec<usize>>,
}

impl LineSumSystem {
    pub fn new(n: usize) -> Self {
        let mut lines = Vec::with_capacity(2 * n + 2);
        for i in 0..n {
            lines.push((0..n).map(|j| i * n + j).collect());
        }
        for j in 0..n {
            lines.push((0..n).map(|i| i * n + j).collect());
        }
        lines.push((0..n).map(|i| i * n + i).collect());
        lines.push((0..n).map(|i| i * n + (n - 1 - i)).collect());
        Self { n, lines }
    }

    fn indicator(&self, line: usize) -> Vec<Integer> {
        let mut v = vec![Integer::from(0); self.n * self.n];
        for &c in &self.lines[line] {
            v[c] += 1;
        }
        v
    }
}

/// The magic-square polytope and its `C(n², 2)` difference hyperplanes,
/// before restriction to the affine hull.
pub fn build_magic_iop(spec: &MagicSpec) -> InsideOutPolytope {
    let n = spec.n;
    let d = n * n;
    let sys = LineSumSystem::new(n);
    let unit = |i: usize, c: i64| {
        let mut v = vec![Integer::from(0); d];
        v[i] = Integer::from(c);
        v
    };
    let mut equalities = Vec::new();
    let mut inequalities = Vec::new();
    match spec.variant {
        Variant::Affine => {
            for k in 0..sys.lines.len() {
                equalities.push(Equality::new(sys.indicator(k), Integer::from(1)));
            }
            for i in 0..d {
                inequalities.push(Inequality::strict(unit(i, 1), Integer::from(0)));
            }
        }
        Variant::Cubical => {
            let first = sys.indicator(0);
            for k in 1..sys.lines.len() {
                let diff = sys.indicator(k).iter().zip(&first).map(|(a, b)| a - b).collect();
                equalities.push(Equality::new(diff, Integer::from(0)));
            }
            for i in 0..d {
                inequalities.push(Inequality::strict(unit(i, 1), Integer::from(0)));
                inequalities.push(Inequality::strict(unit(i, -1), Integer::from(-1)));
            }
        }
    }
    let mut hyperplanes = Vec::with_capacity(d * d.saturating_sub(1) / 2);
    for a in 0..d {
        for b in a + 1..d {
            let mut v = unit(a, 1);
            v[b] = Integer::from(-1);
            hyperplanes.push(Hyperplane::new(v, Integer::from(0)));
        }
    }
    InsideOutPolytope::new(HPolyhedron::new(d, equalities, inequalities), hyperplanes)
}

/// `aₙ(t)` or `cₙ(t)` via region enumeration. Sizes below 3 give zero.
pub fn count_magic(
    spec: &MagicSpec,
    split_depth: usize,
    worker_budget: usize,
) -> Result<Quasipolynomial> {
    if spec.n <= 2 {
        return Ok(Quasipolynomial::zero());
    }
    iop_quasipolynomial(&build_magic_iop(spec), split_depth, worker_budget)
}

/// Generating function of every region's open counting function, in
/// region lineage order and in the original dilation parameter.
pub fn region_generating_functions(
    spec: &MagicSpec,
    split_depth: usize,
    worker_budget: usize,
) -> Result<Vec<RationalGF>> {
    if spec.n <= 2 {
        return Ok(Vec::new());
    }
    let reduced = build_magic_iop(spec).reduce()?;
    let step = reduced.embedding.step.to_usize().ok_or(Error::Overflow)?;
    let depth = split_depth.min(reduced.iop.hyperplanes.len());
    let regions = enumerate_regions(&reduced.iop, depth, worker_budget)?;
    with_workers(worker_budget, || {
        regions
            .par_iter()
            .map(|r| Ok(magic_gf(&region_quasipolynomial(r)?.stretch(step))))
            .collect()
    })?
}

/// `Σ_{t ≥ 1} q(t) z^t`. The value of a counting quasipolynomial at `t = 0`
/// is not a count, so the series starts at `t = 1`.
pub fn magic_gf(q: &Quasipolynomial) -> RationalGF {
    RationalGF::from_quasipolynomial(q, 1)
}

/// Which values were checked for divisibility by 8.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub spec: MagicSpec,
    pub checked: Vec<CountFunctionSample>,
}

/// Checks `8 | count` for every sample: the symmetries of the square act
/// freely on squares with distinct entries.
pub fn symmetry_factor_check(
    spec: &MagicSpec,
    counts: &[CountFunctionSample],
) -> Result<SymmetryReport> {
    let eight = Integer::from(8);
    for s in counts {
        if !s.count.is_multiple_of(&eight) {
            return Err(Error::SymmetryViolation(format!(
                "{}×{} {} count at t = {} is {}, not divisible by 8",
                spec.n, spec.n, spec.variant, s.t, s.count
            )));
        }
    }
    Ok(SymmetryReport {
        spec: *spec,
        checked: counts.to_vec(),
    })
}

/// Samples `t ↦ q(t)` on `range` as counts.
pub fn sample_counts(
    q: &Quasipolynomial,
    range: impl IntoIterator<Item = u64>,
) -> Result<Vec<CountFunctionSample>> {
    range
        .into_iter()
        .map(|t| {
            let v = q.evaluate(&Integer::from(t));
            if !v.is_integer() {
                return Err(Error::VerificationFailure(format!(
                    "counting function is not integral at t = {t}: {v}"
                )));
            }
            Ok(CountFunctionSample {
                t,
                count: v.to_integer(),
            })
        })
        .collect()
}
