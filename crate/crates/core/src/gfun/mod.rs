//! Quasipolynomials and rational generating functions with
//! `Π (1 − z^k)` denominators.

mod gf;
mod quasi;

pub use gf::{gf_add, gf_simplify_grouped, GroupingMetrics, GroupingStrategy, RationalGF};
pub use quasi::Quasipolynomial;

use crate::exact::{Integer, Rational};

pub fn qp_evaluate(q: &Quasipolynomial, t: &Integer) -> Rational {
    q.evaluate(t)
}

/// `Σ_{t ≥ 0} q(t) z^t`
pub fn qp_to_gf(q: &Quasipolynomial) -> RationalGF {
    RationalGF::from_quasipolynomial(q, 0)
}

pub fn gf_series(g: &RationalGF, n: usize) -> Vec<Rational> {
    g.series(n)
}
