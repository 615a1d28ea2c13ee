use magic_iop::arrangement::{enumerate_regions_with_stats, Hyperplane, InsideOutPolytope};
use magic_iop::ehrhart::{
    count_inside_out_direct, count_lattice_points, ehrhart_quasipolynomial, iop_count_moebius,
    iop_quasipolynomial, LatticeCounter,
};
use magic_iop::exact::{int, rat, rat_int, Integer, Rational};
use magic_iop::polytope::{strict_point, volume, HPolyhedron, Inequality, Strictness};
use proptest::prelude::*;

/// `[0, hi]^d` cut by `a·x ≤ b` rows.
fn polytope(d: usize, hi: &[(i64, i64)], cuts: &[(Vec<i64>, i64)]) -> HPolyhedron {
    let mut p = HPolyhedron::full_space(d);
    for (i, &(num, den)) in hi.iter().enumerate() {
        let mut lo = vec![int(0); d];
        lo[i] = int(1);
        p.add_inequality(Inequality::weak(lo, int(0)));
        let mut up = vec![int(0); d];
        up[i] = int(-den);
        p.add_inequality(Inequality::weak(up, int(-num)));
    }
    for (a, b) in cuts {
        p.add_inequality(Inequality::new(
            a.iter().map(|&x| int(-x)).collect(),
            int(-b),
            Strictness::Weak,
        ));
    }
    p
}

fn arb_polytope() -> impl Strategy<Value = HPolyhedron> {
    (1usize..=3)
        .prop_flat_map(|d| {
            (
                Just(d),
                prop::collection::vec((1i64..=3, 1i64..=3), d),
                prop::collection::vec((prop::collection::vec(-2i64..=2, d), 1i64..=4), 0..=2),
            )
        })
        .prop_map(|(d, hi, cuts)| polytope(d, &hi, &cuts))
        .prop_filter("needs an interior point", |p| strict_point(&p.interior()).is_some())
}

fn arb_arrangement() -> impl Strategy<Value = InsideOutPolytope> {
    (
        prop::collection::vec((1i64..=3, 1i64..=2), 2),
        prop::collection::vec((prop::collection::vec(-2i64..=2, 2), -2i64..=3), 1..=4),
    )
        .prop_map(|(hi, hs)| {
            let hs = hs
                .into_iter()
                .filter(|(a, _)| a.iter().any(|&x| x != 0))
                .map(|(a, b)| Hyperplane::from_i64(&a, b))
                .collect();
            InsideOutPolytope::new(polytope(2, &hi, &[]), hs)
        })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interpolated_counts_match_direct_counts(p in arb_polytope()) {
        let q = ehrhart_quasipolynomial(&p).unwrap();
        for t in 0..=(2 * q.period() as u64).min(8) {
            prop_assert_eq!(q.evaluate(&Integer::from(t)), rat_int(&count_lattice_points(&p, t).unwrap()));
        }
    }

    #[test]
    fn reciprocity_holds(p in arb_polytope()) {
        let q = ehrhart_quasipolynomial(&p).unwrap();
        let d = p.dim();
        let sign = if d % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
        let interior = p.interior();
        for t in 1..=(2 * q.period() as i64).min(8) {
            let open = count_lattice_points(&interior, t as u64).unwrap();
            prop_assert_eq!(q.evaluate_i64(-t) * &sign, rat_int(&open));
        }
    }

    #[test]
    fn leading_coefficient_is_volume(p in arb_polytope()) {
        let q = ehrhart_quasipolynomial(&p).unwrap();
        let v = volume(&p).unwrap();
        for c in q.constituents() {
            prop_assert_eq!(c.degree(), Some(p.dim()));
            prop_assert_eq!(c.leading(), v.clone());
        }
    }

    #[test]
    fn counting_paths_agree(iop in arb_arrangement()) {
        let q = iop_quasipolynomial(&iop, 1, 2).unwrap();
        for t in 1..=6u64 {
            let direct = count_inside_out_direct(&iop, t).unwrap();
            prop_assert_eq!(q.evaluate(&Integer::from(t)), rat_int(&direct));
            prop_assert_eq!(iop_count_moebius(&iop, t).unwrap(), direct);
        }
    }

    #[test]
    fn regions_partition_the_polytope(iop in arb_arrangement()) {
        let reduced = iop.reduce().unwrap();
        let (regions, stats) = enumerate_regions_with_stats(&reduced.iop, 0, 1).unwrap();
        let m = reduced.iop.hyperplanes.len();
        prop_assert!(regions.len() <= (0..=2).map(|k| binomial(m, k)).sum::<usize>());
        prop_assert!(stats.peak_live <= m + 1);

        let total: Rational = regions.iter().map(|r| volume(&r.polytope.closure()).unwrap()).sum();
        prop_assert_eq!(total, volume(&reduced.iop.polytope.closure()).unwrap());

        let t = 6u64;
        let open = reduced.iop.polytope.interior();
        let counter = LatticeCounter::new(&open).unwrap();
        let tt = Integer::from(t);
        let mut ok = true;
        let _ = counter.for_each_point(t, |x| {
            let x: Vec<Integer> = x.iter().map(|&v| Integer::from(v)).collect();
            if reduced.iop.hyperplanes.iter().any(|h| h.contains_point(&x, &tt)) {
                return std::ops::ControlFlow::Continue(());
            }
            let xr: Vec<Rational> = x.iter().map(rat_int).collect();
            let hits = regions
                .iter()
                .filter(|r| r.polytope.dilate(&tt).interior().contains(&xr))
                .count();
            ok &= hits == 1;
            std::ops::ControlFlow::Continue(())
        });
        prop_assert!(ok, "a lattice point is not in exactly one region");
    }

    #[test]
    fn hyperplane_order_does_not_matter(iop in arb_arrangement(), seed in any::<u64>()) {
        let mut hs = iop.hyperplanes.clone();
        let n = hs.len();
        for i in (1..n).rev() {
            hs.swap(i, (seed as usize ^ i.wrapping_mul(2654435761)) % (i + 1));
        }
        let shuffled = InsideOutPolytope::new(iop.polytope.clone(), hs);
        prop_assert_eq!(
            iop_quasipolynomial(&iop, 0, 1).unwrap(),
            iop_quasipolynomial(&shuffled, 0, 1).unwrap()
        );
        let a = enumerate_regions_with_stats(&iop.reduce().unwrap().iop, 0, 1).unwrap().0.len();
        let b = enumerate_regions_with_stats(&shuffled.reduce().unwrap().iop, 0, 1).unwrap().0.len();
        prop_assert_eq!(a, b);
    }
}
