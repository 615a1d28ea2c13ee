use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lp::{lp_optimize, strict_point, LpStatus, Sense};
use super::{Equality, HPolyhedron, Inequality};
use crate::error::{Error, Result};
use crate::exact::{
    denominator_lcm, int_dot, integer_column_echelon, rat_int, to_rational_vec, Integer,
    IntegerVector, Rational, RationalMatrix, RationalVector,
};

/// All equalities valid on a polyhedron, and its dimension.
#[derive(Clone, Debug)]
pub struct AffineHull {
    /// Stated equalities followed by implicit ones.
    pub equalities: Vec<Equality>,
    /// Indices of inequalities that hold with equality on the whole closure.
    pub implicit: Vec<usize>,
    pub dim: usize,
}

fn rank_of(eqs: &[Equality], n: usize) -> usize {
    let rows: Vec<RationalVector> = eqs.iter().map(|e| to_rational_vec(&e.normal)).collect();
    RationalMatrix::from_rows(n, &rows).rank()
}

/// Affine hull of the closure of `p`.
///
/// An inequality `a·x ≥ b` is an implicit equality iff `max a·x = b` on the
/// closure (the minimum is then `b` as well).
pub fn affine_hull(p: &HPolyhedron) -> Result<AffineHull> {
    let n = p.dim();
    let closure = p.closure();
    // Fast path: a point strictly inside every inequality rules out implicit
    // equalities altogether.
    let relaxed_interior = closure.interior();
    let mut implicit = Vec::new();
    if strict_point(&relaxed_interior).is_none() {
        for (i, c) in closure.inequalities().iter().enumerate() {
            let obj = to_rational_vec(&c.normal);
            let r = lp_optimize(&closure, &obj, Sense::Maximize);
            match r.status {
                LpStatus::Infeasible => return Err(Error::EmptyPolyhedron),
                LpStatus::Unbounded => {}
                LpStatus::Optimal => {
                    if r.optimum.unwrap() == rat_int(&c.rhs) {
                        implicit.push(i);
                    }
                }
            }
        }
    }
    if p.inequalities().is_empty() && !super::lp::is_feasible(&closure) {
        return Err(Error::EmptyPolyhedron);
    }
    let mut equalities: Vec<Equality> = p.equalities().to_vec();
    for &i in &implicit {
        let c = &p.inequalities()[i];
        let e = Equality::new(c.normal.clone(), c.rhs.clone());
        if !equalities.contains(&e) {
            equalities.push(e);
        }
    }
    let dim = n - rank_of(&equalities, n);
    Ok(AffineHull {
        equalities,
        implicit,
        dim,
    })
}

/// Lattice-point preserving affine map from a full-dimensional reduced space.
///
/// For a dilation `t` divisible by `step`, `u ↦ (t/step)·anchor + basis·u`
/// is a bijection from `Zᵏ` onto the integer points of the `t`-th dilate of
/// the affine hull; for other `t` that dilate contains no integer point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineEmbedding {
    pub ambient_dim: usize,
    /// Smallest positive dilation whose hull meets the lattice.
    #[serde(with = "crate::exact::serde_int")]
    pub step: Integer,
    /// An integer point of the `step`-th dilate of the hull.
    #[serde(with = "crate::exact::serde_int_vec")]
    pub anchor: IntegerVector,
    /// Lattice basis of the direction space; `basis[j]` is the j-th column.
    #[serde(with = "crate::exact::serde_int_mat")]
    pub basis: Vec<IntegerVector>,
    /// Rows of a left inverse of `basis` on the direction lattice.
    #[serde(with = "crate::exact::serde_int_mat")]
    pub inverse: Vec<IntegerVector>,
}

impl AffineEmbedding {
    pub fn identity(n: usize) -> Self {
        let id: Vec<IntegerVector> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Integer::one() } else { Integer::zero() })
                    .collect()
            })
            .collect();
        Self {
            ambient_dim: n,
            step: Integer::one(),
            anchor: vec![Integer::zero(); n],
            basis: id.clone(),
            inverse: id,
        }
    }

    pub fn reduced_dim(&self) -> usize {
        self.basis.len()
    }

    /// Offset of the hull in ambient space at dilation 1 (`anchor / step`).
    pub fn offset(&self) -> RationalVector {
        let s = rat_int(&self.step);
        self.anchor.iter().map(|a| rat_int(a) / &s).collect()
    }

    /// Maps an ambient constraint `a·x (op) t·b` to the reduced constraint
    /// `a'·u (op) s·b'` where `t = step·s`.
    pub fn map_constraint(&self, normal: &[Integer], rhs: &Integer) -> (IntegerVector, Integer) {
        let a: IntegerVector = self.basis.iter().map(|col| int_dot(normal, col)).collect();
        let b = &self.step * rhs - int_dot(normal, &self.anchor);
        (a, b)
    }

    /// Ambient integer point for reduced point `u` at dilation `t`.
    pub fn push_forward(&self, u: &[Integer], t: &Integer) -> Option<IntegerVector> {
        let (s, r) = t.div_rem(&self.step);
        if !r.is_zero() {
            return None;
        }
        let mut x: IntegerVector = self.anchor.iter().map(|a| a * &s).collect();
        for (col, c) in self.basis.iter().zip(u) {
            for (xi, bi) in x.iter_mut().zip(col) {
                *xi += bi * c;
            }
        }
        Some(x)
    }

    /// Reduced coordinates of an ambient integer point of the `t`-th dilate
    /// of the hull.
    pub fn pull_back(&self, x: &[Integer], t: &Integer) -> Option<IntegerVector> {
        let (s, r) = t.div_rem(&self.step);
        if !r.is_zero() {
            return None;
        }
        let diff: IntegerVector = x.iter().zip(&self.anchor).map(|(xi, a)| xi - a * &s).collect();
        let u: IntegerVector = self.inverse.iter().map(|row| int_dot(row, &diff)).collect();
        (self.push_forward(&u, t)? == x).then_some(u)
    }
}

/// Reduces `p` to a full-dimensional polyhedron in `dim(p)` coordinates.
///
/// Integer points of `t·p` correspond to integer points of `(t/step)·q`
/// when `step | t`; otherwise `t·p` has none. Strictness is preserved.
pub fn full_dimensionalize(p: &HPolyhedron) -> Result<(HPolyhedron, AffineEmbedding)> {
    let n = p.dim();
    let hull = affine_hull(p)?;
    if hull.implicit.iter().any(|&i| p.inequalities()[i].is_strict()) {
        return Err(Error::EmptyPolyhedron);
    }
    let rows: Vec<IntegerVector> = hull.equalities.iter().map(|e| e.normal.clone()).collect();
    let ech = integer_column_echelon(&rows, n);
    let r = ech.rank;

    // Solve H₁·y = b for the pivot block; y is unique.
    let h_rows: Vec<RationalVector> = ech
        .h
        .iter()
        .map(|row| row[..r].iter().map(rat_int).collect())
        .collect();
    let b: RationalVector = hull.equalities.iter().map(|e| rat_int(&e.rhs)).collect();
    let y = if r == 0 {
        Vec::new()
    } else {
        RationalMatrix::from_rows(r, &h_rows)
            .solve(&b)
            .ok_or(Error::NoLatticeCompatibleOrigin)?
    };
    let step = denominator_lcm(&y);
    let y_int: IntegerVector = y.iter().map(|q| (q * rat_int(&step)).to_integer()).collect();
    let mut anchor = vec![Integer::zero(); n];
    for (j, yj) in y_int.iter().enumerate() {
        let col = ech.u_column(j);
        for (a, c) in anchor.iter_mut().zip(&col) {
            *a += c * yj;
        }
    }
    let basis: Vec<IntegerVector> = (r..n).map(|j| ech.u_column(j)).collect();
    // U is unimodular, so the last n − r rows of U⁻¹ recover u exactly.
    let u_rows: Vec<RationalVector> = ech.u.iter().map(|row| to_rational_vec(row)).collect();
    let u_mat = RationalMatrix::from_rows(n, &u_rows);
    let mut inverse = Vec::with_capacity(n - r);
    let mut inv_cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        inv_cols.push(u_mat.solve(&e).expect("unimodular"));
    }
    for j in r..n {
        inverse.push(inv_cols.iter().map(|c: &RationalVector| c[j].to_integer()).collect());
    }
    let emb = AffineEmbedding {
        ambient_dim: n,
        step,
        anchor,
        basis,
        inverse,
    };

    let k = n - r;
    let mut ineqs = Vec::new();
    for (i, c) in p.inequalities().iter().enumerate() {
        if hull.implicit.contains(&i) {
            continue;
        }
        let (a, b) = emb.map_constraint(&c.normal, &c.rhs);
        if a.iter().all(Zero::is_zero) {
            // Constant on the hull and not implicit, so strictly satisfied.
            continue;
        }
        ineqs.push(Inequality::new(a, b, c.strictness));
    }
    Ok((HPolyhedron::new(k, Vec::new(), ineqs), emb))
}

/// Drops inequalities that do not change the point set.
///
/// A weak row is redundant when the others force `a·x ≥ b`. A strict row
/// additionally needs the others to exclude the hyperplane `a·x = b`.
pub fn remove_redundant(p: &HPolyhedron) -> HPolyhedron {
    let mut current = p.clone();
    let mut i = 0;
    while i < current.inequalities().len() {
        let c = current.inequalities()[i].clone();
        let others = current.retain_inequalities(|j, _| j != i);
        let r = lp_optimize(&others.closure(), &to_rational_vec(&c.normal), Sense::Minimize);
        let redundant = match (r.status, r.optimum) {
            (LpStatus::Infeasible, _) => false,
            (LpStatus::Unbounded, _) => false,
            (LpStatus::Optimal, Some(min)) => {
                let b = rat_int(&c.rhs);
                if min > b {
                    true
                } else if min == b {
                    !c.is_strict()
                        || strict_point(&others.with_equality(Equality::new(
                            c.normal.clone(),
                            c.rhs.clone(),
                        )))
                        .is_none()
                } else {
                    false
                }
            }
            _ => false,
        };
        if redundant {
            current = others;
        } else {
            i += 1;
        }
    }
    current
}

/// Euclidean volume of a full-dimensional bounded polyhedron's closure.
///
/// Cone over the facets from a feasible apex `c`: a facet `a·x ≥ b`
/// contributes `(a·c − b)/d · vol(proj_j F) / |a_j|`, where `proj_j` drops a
/// coordinate `j` with `a_j ≠ 0`. The projection is volume-scaled by exactly
/// `|a_j| / |a|`, which cancels the Euclidean normal length.
pub fn volume(p: &HPolyhedron) -> Result<Rational> {
    let closure = p.closure();
    if closure
        .inequalities()
        .iter()
        .any(|c| c.normal.iter().all(|a| a.is_zero()) && c.rhs.is_positive())
    {
        return Ok(Rational::zero());
    }
    let hull = affine_hull(&closure)?;
    if hull.dim < closure.dim() {
        return Ok(Rational::zero());
    }
    if !closure.equalities().is_empty() {
        return Err(Error::InvalidInput("volume expects no equalities".into()));
    }
    let d = closure.dim();
    if d == 1 {
        let obj = vec![Rational::one()];
        let hi = lp_optimize(&closure, &obj, Sense::Maximize);
        let lo = lp_optimize(&closure, &obj, Sense::Minimize);
        return match (hi.optimum, lo.optimum) {
            (Some(h), Some(l)) => Ok(h - l),
            _ => Err(Error::UnboundedPolyhedron),
        };
    }
    let apex = strict_point(&closure).ok_or(Error::EmptyPolyhedron)?;
    let mut total = Rational::zero();
    for c in closure.inequalities() {
        let height = c.slack(&apex);
        if height.is_zero() {
            continue;
        }
        let Some(j) = c.normal.iter().position(|a| !a.is_zero()) else {
            continue;
        };
        let facet = closure.with_equality(Equality::new(c.normal.clone(), c.rhs.clone()));
        let projected = eliminate_coordinate(&facet, j);
        let area = match volume(&projected) {
            Ok(a) => a,
            Err(Error::EmptyPolyhedron) => Rational::zero(),
            Err(e) => return Err(e),
        };
        total += height * area / (rat_int(&c.normal[j].abs()) * Rational::from_integer(d.into()));
    }
    Ok(total)
}

/// Substitutes `x_j` from the single equality of `p` into the inequalities.
fn eliminate_coordinate(p: &HPolyhedron, j: usize) -> HPolyhedron {
    let e = &p.equalities()[p.equalities().len() - 1];
    let aj = e.normal[j].clone();
    let mut ineqs = Vec::new();
    for c in p.inequalities() {
        let cj = &c.normal[j];
        // aj·c − cj·e eliminates x_j; multiply by sign(aj) to keep direction.
        let sign = if aj.is_negative() { -Integer::one() } else { Integer::one() };
        let normal: IntegerVector = (0..p.dim())
            .filter(|&i| i != j)
            .map(|i| (&aj * &c.normal[i] - cj * &e.normal[i]) * &sign)
            .collect();
        let rhs = (&aj * &c.rhs - cj * &e.rhs) * &sign;
        if normal.iter().all(Zero::is_zero) && !rhs.is_positive() {
            continue;
        }
        ineqs.push(Inequality::new(normal, rhs, c.strictness));
    }
    HPolyhedron::new(p.dim() - 1, Vec::new(), ineqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::polytope::Strictness;

    #[test]
    fn unit_square_hull() {
        let h = affine_hull(&HPolyhedron::cube(2, 0, 1, Strictness::Weak)).unwrap();
        assert!(h.equalities.is_empty());
        assert_eq!(h.dim, 2);
    }

    #[test]
    fn implicit_equalities_collapse_to_point() {
        let p = HPolyhedron::new(
            2,
            vec![],
            vec![
                Inequality::weak(vec![int(1), int(0)], int(0)),
                Inequality::weak(vec![int(0), int(1)], int(0)),
                Inequality::weak(vec![int(-1), int(-1)], int(0)),
            ],
        );
        let h = affine_hull(&p).unwrap();
        assert_eq!(h.dim, 0);
        assert_eq!(h.implicit.len(), 3);
    }

    #[test]
    fn empty_hull_is_an_error() {
        let p = HPolyhedron::new(
            1,
            vec![],
            vec![
                Inequality::weak(vec![int(1)], int(1)),
                Inequality::weak(vec![int(-1)], int(0)),
            ],
        );
        assert!(matches!(affine_hull(&p), Err(Error::EmptyPolyhedron)));
    }

    #[test]
    fn diagonal_segment_reduces_to_interval() {
        let p = HPolyhedron::new(
            2,
            vec![Equality::new(vec![int(1), int(-1)], int(0))],
            vec![
                Inequality::weak(vec![int(1), int(0)], int(0)),
                Inequality::weak(vec![int(-1), int(0)], int(-1)),
            ],
        );
        let (q, emb) = full_dimensionalize(&p).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(emb.step, int(1));
        // interval of length one in the reduced coordinate
        let v = crate::polytope::vertex_enumeration(&q).unwrap();
        assert_eq!(v.vertices.len(), 2);
        let len = (&v.vertices[1][0] - &v.vertices[0][0]).abs();
        assert_eq!(len, rat(1, 1));
        let x = emb.push_forward(&[int(2)], &int(2)).unwrap();
        assert_eq!(emb.pull_back(&x, &int(2)), Some(vec![int(2)]));
    }

    #[test]
    fn full_dimensional_input_gets_identity_embedding() {
        let sq = HPolyhedron::cube(2, 0, 1, Strictness::Weak);
        let (q, emb) = full_dimensionalize(&sq).unwrap();
        assert_eq!(emb, AffineEmbedding::identity(2));
        assert_eq!(q.canonical(), sq.canonical());
    }

    #[test]
    fn fractional_point_needs_step() {
        // 3x = 1
        let p = HPolyhedron::new(1, vec![Equality::new(vec![int(3)], int(1))], vec![]);
        let (q, emb) = full_dimensionalize(&p).unwrap();
        assert_eq!(q.dim(), 0);
        assert_eq!(emb.step, int(3));
        assert_eq!(emb.anchor, vec![int(1)]);
    }

    #[test]
    fn redundancy_removal_keeps_point_set() {
        let p = HPolyhedron::cube(2, 0, 1, Strictness::Strict)
            .with_inequality(Inequality::strict(vec![int(1), int(1)], int(-1)))
            .with_inequality(Inequality::strict(vec![int(-1), int(-1)], int(-2)));
        let r = remove_redundant(&p);
        assert_eq!(r.inequalities().len(), 4);
        // a weak facet shadowed by a strict one stays strict-correct
        let q = HPolyhedron::new(
            1,
            vec![],
            vec![
                Inequality::weak(vec![int(1)], int(0)),
                Inequality::strict(vec![int(1)], int(0)),
                Inequality::weak(vec![int(-1)], int(-1)),
            ],
        );
        let r = remove_redundant(&q);
        assert_eq!(r.inequalities().len(), 2);
        assert!(r.inequalities().iter().any(|c| c.is_strict()));
    }

    #[test]
    fn volumes_of_simple_shapes() {
        assert_eq!(volume(&HPolyhedron::cube(3, 0, 2, Strictness::Weak)).unwrap(), rat(8, 1));
        let tri = HPolyhedron::new(
            2,
            vec![],
            vec![
                Inequality::weak(vec![int(1), int(0)], int(0)),
                Inequality::weak(vec![int(0), int(1)], int(0)),
                Inequality::weak(vec![int(-1), int(-2)], int(-2)),
            ],
        );
        assert_eq!(volume(&tri).unwrap(), rat(1, 1));
    }

    #[test]
    fn redundant_facets_add_no_volume() {
        let square = HPolyhedron::cube(2, 0, 1, Strictness::Weak);
        let loose = square.with_inequality(Inequality::weak(vec![int(1), int(0)], int(-1)));
        assert_eq!(volume(&loose).unwrap(), rat(1, 1));
    }
}
