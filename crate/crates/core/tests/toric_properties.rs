use nil_core::ideal::MonomialIdeal;
use nil_core::lp::{int, rat};
use nil_core::newton::ExponentVector;
use nil_core::toric::ConcaveToricFunction;
use nil_core::Rational;
use proptest::prelude::*;

fn ev(v: &[Rational]) -> ExponentVector {
    ExponentVector::new(v.to_vec()).unwrap()
}

/// Homogeneous exponents `pᵢ/q` with `Σpᵢ = q`, every `pᵢ > 0`.
fn homogeneous() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1i64..=4, 1..=3).prop_map(|p| {
        let q: i64 = p.iter().sum();
        p.iter().map(|&pi| rat(pi, q)).collect()
    })
}

/// `k·Π(λᵢ/αᵢ)^{−αᵢ}`, the sup of `ĝ(w)/⟨w,λ⟩` by weighted AM-GM.
fn amgm_ratio(k: f64, alpha: &[Rational], lambda: &[u32]) -> f64 {
    let ln: f64 = alpha
        .iter()
        .zip(lambda)
        .map(|(a, &l)| {
            let a = num_traits::ToPrimitive::to_f64(a).unwrap();
            -a * ((l as f64 + 1.0) / a).ln()
        })
        .sum();
    k * ln.exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn power_membership_matches_amgm(
        alpha in homogeneous(),
        k in (1i64..=30, 1i64..=4),
        beta in prop::collection::vec(0u32..=6, 3),
    ) {
        let n = alpha.len();
        let beta = &beta[..n];
        let k = rat(k.0, k.1);
        let g = ConcaveToricFunction::power(k.clone(), ev(&alpha)).unwrap();
        let ratio = amgm_ratio(num_traits::ToPrimitive::to_f64(&k).unwrap(), &alpha, beta);
        prop_assume!((ratio - 1.0).abs() > 1e-9);
        let report = g.valuative_membership(beta).unwrap();
        prop_assert_eq!(report.member, ratio < 1.0);
        prop_assert!(report.verify(&g, beta));
        if let Some(m) = &report.margin {
            // The certified margin never exceeds the true one.
            prop_assert!(num_traits::ToPrimitive::to_f64(m).unwrap() <= 1.0 - ratio + 1e-12);
        }
    }

    #[test]
    fn power_values_scale_linearly(alpha in homogeneous(), t in 1i64..=9, c in (1i64..=5, 1i64..=5)) {
        let n = alpha.len();
        let g = ConcaveToricFunction::power(int(2), ev(&alpha)).unwrap();
        let x: Vec<Rational> = (0..n).map(|i| int(i as i64 + 1)).collect();
        let tx: Vec<Rational> = x.iter().map(|v| v * int(t)).collect();
        let gx = g.evaluate(&ev(&x)).unwrap().to_f64();
        let gtx = g.evaluate(&ev(&tx)).unwrap().to_f64();
        prop_assert!((gtx - t as f64 * gx).abs() <= 1e-9 * gtx.abs().max(1.0));
        let c = rat(c.0, c.1);
        let cg = g.scaled(&c).unwrap().evaluate(&ev(&x)).unwrap().to_f64();
        prop_assert!((cg - num_traits::ToPrimitive::to_f64(&c).unwrap() * gx).abs() <= 1e-9 * cg.abs().max(1.0));
    }

    #[test]
    fn gradient_points_are_interior(
        alpha in homogeneous(),
        v in prop::collection::vec((1i64..=20, 1i64..=5), 3),
        mu in 1i64..=8,
    ) {
        let n = alpha.len();
        let g = ConcaveToricFunction::power(rat(3, 2), ev(&alpha)).unwrap();
        let v: Vec<Rational> = v[..n].iter().map(|&(a, b)| rat(a, b)).collect();
        let mu = ExponentVector::ones(n).scaled(&rat(1, mu));
        let points = g.gradient_sample(&[ev(&v)], &mu).unwrap();
        prop_assert!(g.classify_in_body(&points[0]).unwrap().is_interior());
    }

    #[test]
    fn generator_weights_agree_with_howald(
        gens in prop::collection::vec(prop::collection::vec(0u32..=5, 2), 1..=4),
        c in (1i64..=8, 1i64..=4),
        beta in prop::collection::vec(0u32..=8, 2),
    ) {
        prop_assume!(gens.iter().all(|g| g.iter().any(|&e| e > 0)));
        let c = rat(c.0, c.1);
        let a = MonomialIdeal::minimalize(2, &gens).unwrap();
        let exps: Vec<ExponentVector> = a.generators().iter().map(|g| ExponentVector::from_naturals(g)).collect();
        let g = ConcaveToricFunction::from_generators(&exps, &c).unwrap();
        let report = g.valuative_membership(&beta).unwrap();
        prop_assert_eq!(report.member, a.multiplier_ideal(&c).unwrap().contains(&beta).unwrap());
        prop_assert!(report.verify(&g, &beta));
    }
}

#[test]
fn sub_homogeneous_power_is_everywhere_integrable() {
    let g = ConcaveToricFunction::power(int(50), ev(&[rat(1, 3), rat(1, 3)])).unwrap();
    for b in [[0u32, 0], [0, 5], [3, 0]] {
        assert!(g.valuative_membership(&b).unwrap().member);
    }
}

#[test]
fn power_rejects_convex_exponents() {
    assert!(ConcaveToricFunction::power(int(1), ev(&[rat(2, 3), rat(2, 3)])).is_err());
    assert!(ConcaveToricFunction::power(int(0), ev(&[rat(1, 2)])).is_err());
}
