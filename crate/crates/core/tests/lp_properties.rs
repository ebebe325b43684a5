use nil_core::lp::{maximize, rat, LinearConstraintSystem, LpOutcome, Relation};
use nil_core::Rational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

type Row = (i64, i64, Relation, i64);

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![4 => Just(Relation::Le), 2 => Just(Relation::Ge), 1 => Just(Relation::Eq)]
}

fn rows() -> impl Strategy<Value = Vec<Row>> {
    prop::collection::vec((-3i64..=3, -3i64..=3, relation(), -6i64..=6), 1..=4)
}

fn satisfied(rows: &[Row], x: &Rational, y: &Rational) -> bool {
    if x.is_negative() || y.is_negative() {
        return false;
    }
    rows.iter().all(|(a, b, rel, c)| {
        let lhs = rat(*a, 1) * x + rat(*b, 1) * y;
        let c = rat(*c, 1);
        match rel {
            Relation::Le => lhs <= c,
            Relation::Ge => lhs >= c,
            Relation::Eq => lhs == c,
        }
    })
}

/// Vertices of `{x, y ≥ 0} ∩ rows` from all pairs of boundary lines.
fn vertices(rows: &[Row]) -> Vec<(Rational, Rational)> {
    let mut lines: Vec<(i64, i64, i64)> = vec![(1, 0, 0), (0, 1, 0)];
    lines.extend(rows.iter().map(|(a, b, _, c)| (*a, *b, *c)));
    let mut out = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = lines[i];
            let (a2, b2, c2) = lines[j];
            let det = a1 * b2 - a2 * b1;
            if det == 0 {
                continue;
            }
            let x = rat(c1 * b2 - c2 * b1, det);
            let y = rat(a1 * c2 - a2 * c1, det);
            if satisfied(rows, &x, &y) {
                out.push((x, y));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn two_variable_lps_match_vertex_enumeration(rows in rows(), ox in -3i64..=3, oy in -3i64..=3) {
        let mut sys = LinearConstraintSystem::nonnegative(2);
        for (a, b, rel, c) in &rows {
            sys.add(vec![rat(*a, 1), rat(*b, 1)], *rel, rat(*c, 1)).unwrap();
        }
        let obj = [rat(ox, 1), rat(oy, 1)];
        let verts = vertices(&rows);
        match maximize(&obj, &sys).unwrap() {
            LpOutcome::Optimal { optimum, point, dual } => {
                prop_assert!(sys.is_satisfied_by(&point));
                prop_assert!(sys.verify_dual_bound(&obj, &dual, &optimum));
                let best = verts.iter().map(|(x, y)| &obj[0] * x + &obj[1] * y).max().unwrap();
                prop_assert_eq!(optimum, best);
            }
            LpOutcome::Infeasible { farkas } => {
                prop_assert!(verts.is_empty());
                prop_assert!(sys.verify_farkas(&farkas));
            }
            LpOutcome::Unbounded { point, ray } => {
                prop_assert!(sys.is_satisfied_by(&point));
                prop_assert!(ray.iter().all(|r| !r.is_negative()));
                let gain = &obj[0] * &ray[0] + &obj[1] * &ray[1];
                prop_assert!(gain.is_positive());
                for (a, b, rel, _) in &rows {
                    let d = rat(*a, 1) * &ray[0] + rat(*b, 1) * &ray[1];
                    let ok = match rel {
                        Relation::Le => !d.is_positive(),
                        Relation::Ge => !d.is_negative(),
                        Relation::Eq => d.is_zero(),
                    };
                    prop_assert!(ok);
                }
            }
        }
    }
}
