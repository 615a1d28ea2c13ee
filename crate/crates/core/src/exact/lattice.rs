use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use super::{clear_denominators, Integer, IntegerVector, Rational, RationalMatrix};

/// Result of unimodular column reduction `M·U = H`.
///
/// `H` is in column echelon form: its first `rank` columns are nonzero and
/// each starts strictly lower than the previous one; the remaining columns
/// are zero. `U` is unimodular.
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    /// `rows × cols`
    pub h: Vec<IntegerVector>,
    /// `cols × cols`, stored by rows.
    pub u: Vec<IntegerVector>,
    pub rank: usize,
    /// Row index of the leading entry of each of the first `rank` columns.
    pub pivot_rows: Vec<usize>,
}

impl ColumnEchelon {
    /// Column `j` of `U`.
    pub fn u_column(&self, j: usize) -> IntegerVector {
        self.u.iter().map(|row| row[j].clone()).collect()
    }
}

fn col_op(m: &mut [IntegerVector], dst: usize, src: usize, f: &Integer) {
    // column dst += f * column src
    for row in m.iter_mut() {
        let v = &row[src] * f;
        row[dst] += v;
    }
}

fn col_swap(m: &mut [IntegerVector], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn col_negate(m: &mut [IntegerVector], a: usize) {
    for row in m.iter_mut() {
        row[a] = -row[a].clone();
    }
}

/// Integer column echelon form via extended-gcd column operations.
pub fn integer_column_echelon(rows: &[IntegerVector], cols: usize) -> ColumnEchelon {
    let mut h: Vec<IntegerVector> = rows.to_vec();
    let mut u: Vec<IntegerVector> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { Integer::one() } else { Integer::zero() })
                .collect()
        })
        .collect();
    let mut pivot_col = 0;
    let mut pivot_rows = Vec::new();
    for r in 0..h.len() {
        if pivot_col == cols {
            break;
        }
        // Euclid across columns pivot_col.. until a single nonzero remains.
        loop {
            let nonzero: Vec<usize> = (pivot_col..cols).filter(|&j| !h[r][j].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let &min = nonzero
                .iter()
                .min_by(|&&a, &&b| h[r][a].abs().cmp(&h[r][b].abs()))
                .unwrap();
            if nonzero.len() == 1 {
                col_swap(&mut h, pivot_col, min);
                col_swap(&mut u, pivot_col, min);
                if h[r][pivot_col].is_negative() {
                    col_negate(&mut h, pivot_col);
                    col_negate(&mut u, pivot_col);
                }
                pivot_rows.push(r);
                pivot_col += 1;
                break;
            }
            for &j in &nonzero {
                if j == min {
                    continue;
                }
                let q = -h[r][j].div_floor(&h[r][min]);
                col_op(&mut h, j, min, &q);
                col_op(&mut u, j, min, &q);
            }
        }
    }
    ColumnEchelon {
        h,
        u,
        rank: pivot_col,
        pivot_rows,
    }
}

/// Basis of the integer kernel `{x ∈ Zⁿ : rows·x = 0}`.
pub fn integer_kernel(rows: &[IntegerVector], cols: usize) -> Vec<IntegerVector> {
    let ech = integer_column_echelon(rows, cols);
    (ech.rank..cols).map(|j| ech.u_column(j)).collect()
}

/// Basis of the lattice `span(vectors) ∩ Zᵈ`.
///
/// This is the lattice of the spanned subspace, not the lattice generated by
/// the inputs: `{(2,0), (0,2)}` yields a basis of all of `Z²`.
pub fn integer_lattice_basis(vectors: &[Vec<Rational>]) -> Vec<IntegerVector> {
    let Some(d) = vectors.first().map(|v| v.len()) else {
        return Vec::new();
    };
    // The subspace is the kernel of its orthogonal complement.
    let span = RationalMatrix::from_rows(d, vectors);
    let complement: Vec<IntegerVector> = span
        .nullspace()
        .iter()
        .map(|v| clear_denominators(v))
        .collect();
    integer_kernel(&complement, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, rat_int, to_rational_vec};
    use proptest::prelude::*;

    fn det2(b: &[IntegerVector]) -> Integer {
        &b[0][0] * &b[1][1] - &b[0][1] * &b[1][0]
    }

    #[test]
    fn half_vector_saturates_to_primitive() {
        let b = integer_lattice_basis(&[vec![rat(1, 2), rat(1, 2)]]);
        assert_eq!(b.len(), 1);
        let v = &b[0];
        assert!(v == &vec![int(1), int(1)] || v == &vec![int(-1), int(-1)]);
    }

    #[test]
    fn full_plane_basis_is_unimodular() {
        for gens in [
            vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]],
            vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(2, 1)]],
        ] {
            let b = integer_lattice_basis(&gens);
            assert_eq!(b.len(), 2);
            assert_eq!(det2(&b).abs(), int(1));
        }
    }

    #[test]
    fn kernel_of_line_sum_row() {
        let k = integer_kernel(&[vec![int(1), int(1), int(1)]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<Integer>(), int(0));
        }
    }

    proptest! {
        #[test]
        fn lattice_basis_spans_saturated_lattice(
            gens in proptest::collection::vec(proptest::collection::vec(-3i64..4, 3), 1..3)
        ) {
            let vecs: Vec<Vec<Rational>> = gens
                .iter()
                .map(|g| g.iter().map(|&x| rat(x, 1)).collect())
                .collect();
            let dim = RationalMatrix::from_rows(3, &vecs).rank();
            let basis = integer_lattice_basis(&vecs);
            prop_assert_eq!(basis.len(), dim);
            // every basis vector lies in the span
            for b in &basis {
                let mut rows = vecs.clone();
                rows.push(to_rational_vec(b));
                prop_assert_eq!(RationalMatrix::from_rows(3, &rows).rank(), dim);
            }
            // every generator is an integer combination of the basis
            if dim > 0 {
                let cols: Vec<Vec<Rational>> = (0..3)
                    .map(|i| basis.iter().map(|b| rat_int(&b[i])).collect())
                    .collect();
                let m = RationalMatrix::from_rows(dim, &cols);
                for g in &vecs {
                    let coeffs = m.solve(g).expect("generator in span");
                    prop_assert!(coeffs.iter().all(|c| c.is_integer()));
                }
                // saturation: a primitive integer point of the span built
                // from a fractional combination is still reachable
                let mut combo = vec![Rational::zero(); 3];
                for (k, g) in vecs.iter().enumerate() {
                    for i in 0..3 {
                        combo[i] += &g[i] * rat(1, k as i64 + 2);
                    }
                }
                let x = clear_denominators(&combo);
                if x.iter().any(|v| !v.is_zero()) {
                    let coeffs = m.solve(&to_rational_vec(&x)).expect("point in span");
                    prop_assert!(coeffs.iter().all(|c| c.is_integer()));
                }
            }
        }
    }
}
