use nil_core::ideal::MonomialIdeal;
use nil_core::lp::{int, rat};
use nil_core::newton::Scale;
use nil_core::Rational;
use proptest::prelude::*;

fn planar_ideal() -> impl Strategy<Value = Vec<(u32, u32)>> {
    prop::collection::vec((0u32..=6, 0u32..=6), 1..=4).prop_filter("proper", |g| g.iter().all(|p| *p != (0, 0)))
}

fn ideal(g: &[(u32, u32)]) -> MonomialIdeal {
    MonomialIdeal::minimalize(2, &g.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>()).unwrap()
}

fn scale() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

/// Candidate inward normals of the planar Newton polyhedron, with support values.
fn normals(g: &[(u32, u32)]) -> Vec<((i64, i64), i64)> {
    let mut ws = vec![(1i64, 0i64), (0, 1)];
    for a in g {
        for b in g {
            if a.0 < b.0 && a.1 > b.1 {
                ws.push((a.1 as i64 - b.1 as i64, b.0 as i64 - a.0 as i64));
            }
        }
    }
    ws.into_iter()
        .map(|w| (w, g.iter().map(|&(a, b)| w.0 * a as i64 + w.1 * b as i64).min().unwrap()))
        .collect()
}

/// `x ∈ c·P̊` through the planar facet inequalities.
fn interior(g: &[(u32, u32)], x: (i64, i64), c: &Rational) -> bool {
    normals(g).iter().all(|((w1, w2), h)| int(w1 * x.0 + w2 * x.1) > c * int(*h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn multiplier_matches_planar_howald(g in planar_ideal(), c in scale()) {
        let j = ideal(&g).multiplier_ideal(&c).unwrap();
        for b0 in 0..=12u32 {
            for b1 in 0..=12u32 {
                let want = interior(&g, (b0 as i64 + 1, b1 as i64 + 1), &c);
                prop_assert_eq!(j.contains(&[b0, b1]).unwrap(), want, "β = ({}, {})", b0, b1);
            }
        }
    }

    #[test]
    fn adjoint_matches_planar_oracle(g in planar_ideal(), c in scale()) {
        let a = ideal(&g);
        // Axis 0: H = {x = 0}, face generators are those with α₀ = 0.
        let Some(m) = g.iter().filter(|p| p.0 == 0).map(|p| p.1).min() else {
            prop_assert!(a.adjoint_ideal(&c, 0).is_err());
            return Ok(());
        };
        let adj = a.adjoint_ideal(&c, 0).unwrap();
        for b0 in 0..=12u32 {
            for b1 in 0..=12u32 {
                let want = if b0 == 0 {
                    int(b1 as i64 + 1) > &c * int(m as i64)
                } else {
                    interior(&g, (b0 as i64, b1 as i64 + 1), &c)
                };
                prop_assert_eq!(adj.contains(&[b0, b1]).unwrap(), want, "β = ({}, {})", b0, b1);
            }
        }
        let report = a.adjunction_report(&c, 0).unwrap();
        prop_assert!(report.kernel_exact);
        prop_assert!(report.restriction_exact);
    }

    #[test]
    fn lct_is_the_diagonal_critical_scale(g in planar_ideal()) {
        let want = normals(&g)
            .iter()
            .filter(|(_, h)| *h > 0)
            .map(|((w1, w2), h)| rat(w1 + w2, *h))
            .min()
            .unwrap();
        prop_assert_eq!(ideal(&g).lct().unwrap(), Scale::Finite(want));
    }

    #[test]
    fn ideal_is_constant_between_jumps(g in planar_ideal()) {
        let a = ideal(&g);
        let c_max = int(3);
        let jumps = a.jumping_numbers(&c_max).unwrap();
        prop_assert!(jumps.windows(2).all(|w| w[0] < w[1]));
        let mut prev = Rational::from_integer(0.into());
        for j in &jumps {
            let mid = (&prev + j) / int(2);
            let before = a.multiplier_ideal(&mid).unwrap();
            let at = a.multiplier_ideal(j).unwrap();
            prop_assert!(at.is_subset_of(&before) && at != before, "no jump at {}", j);
            if prev > Rational::from_integer(0.into()) {
                prop_assert_eq!(&before, &a.multiplier_ideal(&prev).unwrap());
            }
            prev = j.clone();
        }
        if prev < c_max {
            let mid = (&prev + &c_max) / int(2);
            prop_assert_eq!(a.multiplier_ideal(&mid).unwrap(), a.multiplier_ideal(&c_max).unwrap());
        }
    }

    #[test]
    fn openness_margin_keeps_the_ideal(g in planar_ideal(), c in scale()) {
        let a = ideal(&g);
        let eps = a.openness_margin(&c).unwrap();
        let bumped = (int(1) + eps) * &c;
        prop_assert_eq!(a.multiplier_ideal(&bumped).unwrap(), a.multiplier_ideal(&c).unwrap());
    }

    #[test]
    fn spatial_sandwich_and_nesting(
        gens in prop::collection::vec(prop::collection::vec(0u32..=4, 3), 1..=4),
        c in scale(),
        axis in 0usize..3,
    ) {
        prop_assume!(gens.iter().all(|g| g.iter().any(|&e| e > 0)));
        let a = MonomialIdeal::minimalize(3, &gens).unwrap();
        let j = a.multiplier_ideal(&c).unwrap();
        let j2 = a.multiplier_ideal(&(&c + rat(1, 3))).unwrap();
        prop_assert!(j2.is_subset_of(&j));
        if a.generators().iter().any(|g| g[axis] == 0) {
            let adj = a.adjoint_ideal(&c, axis).unwrap();
            prop_assert!(j.shift_by_axis(axis).unwrap().is_subset_of(&adj));
            prop_assert!(adj.is_subset_of(&j));
        }
    }
}
