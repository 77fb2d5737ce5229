use focklab::carleson_mult::{
    carleson_condition, carleson_diagnose_with, mult_classify, MultVerdict, PositiveMeasure,
};
use focklab::quadcore::{CPoint, QuadSpec};
use focklab::weights::{parse_weight, Weight};
use proptest::prelude::*;

fn point(r: f64) -> impl Strategy<Value = CPoint> {
    (-r..r, -r..r).prop_map(|(x, y)| CPoint::new(x, y))
}

fn atoms() -> impl Strategy<Value = PositiveMeasure> {
    proptest::collection::vec((point(2.0), 0.1f64..3.0), 1..4)
        .prop_map(|a| PositiveMeasure::atoms(a).unwrap())
}

fn spec() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-9)
}

fn density() -> PositiveMeasure {
    PositiveMeasure::density(parse_weight("power:gamma=1").unwrap(), -1.0).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) + 1e-300
}

/// `(p, q, n)`: one case with `p <= q` (G) and one with `q < p` (H).
const CASES: [(f64, f64, i32); 3] = [(2.0, 2.0, 0), (1.0, 2.0, 1), (2.0, 1.0, -1)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn atomic_conditions_are_additive(m1 in atoms(), m2 in atoms(), u in point(3.0), alpha in 0.5f64..2.0) {
        let w = parse_weight("power:gamma=1").unwrap();
        let sum = m1.add(&m2);
        for (p, q, n) in CASES {
            let a = carleson_condition(&m1, p, q, alpha, &w, n, u, &spec()).unwrap();
            let b = carleson_condition(&m2, p, q, alpha, &w, n, u, &spec()).unwrap();
            let s = carleson_condition(&sum, p, q, alpha, &w, n, u, &spec()).unwrap();
            prop_assert!(a >= 0.0 && b >= 0.0);
            prop_assert!(close(s, a + b, 1e-12), "{} vs {}", s, a + b);
        }
    }

    #[test]
    fn density_conditions_are_additive(m in atoms(), u in point(3.0)) {
        let w = Weight::one();
        let d = density();
        let sum = m.add(&d);
        for (p, q, n) in CASES {
            let a = carleson_condition(&m, p, q, 1.0, &w, n, u, &spec()).unwrap();
            let b = carleson_condition(&d, p, q, 1.0, &w, n, u, &spec()).unwrap();
            let s = carleson_condition(&sum, p, q, 1.0, &w, n, u, &spec()).unwrap();
            prop_assert!(close(s, a + b, 1e-8), "{} vs {}", s, a + b);
        }
    }

    #[test]
    fn conditions_scale_linearly(m in atoms(), c in 0.01f64..100.0, u in point(3.0)) {
        let w = parse_weight("exp_re:gamma=0.5").unwrap();
        let mu = m.add(&density());
        let scaled = mu.scale(c).unwrap();
        for (p, q, n) in CASES {
            let a = carleson_condition(&mu, p, q, 1.0, &w, n, u, &spec()).unwrap();
            let s = carleson_condition(&scaled, p, q, 1.0, &w, n, u, &spec()).unwrap();
            prop_assert!(close(s, c * a, 1e-8), "{} vs {}", s, c * a);
        }
    }

    #[test]
    fn classification_follows_the_table(p in 0.5f64..4.0, q in 0.5f64..4.0, alpha in 0.5f64..3.0, beta in 0.5f64..3.0) {
        let class = mult_classify(p, q, alpha, beta).unwrap();
        let expected_kind = if beta < alpha {
            "zero"
        } else if p == q && alpha == beta {
            "constants"
        } else if p == q {
            "finfty"
        } else if q > p {
            "growth"
        } else {
            "integrability"
        };
        let kind = match class.verdict {
            MultVerdict::ZeroOnly => "zero",
            MultVerdict::ConstantsOnly => "constants",
            MultVerdict::FInfty { .. } => "finfty",
            MultVerdict::GrowthCondition { .. } => "growth",
            MultVerdict::IntegrabilityCondition { .. } => "integrability",
        };
        prop_assert_eq!(kind, expected_kind);
    }
}

#[test]
fn empirical_norm_and_reducers_scale_linearly() {
    let mu = PositiveMeasure::atoms(vec![(CPoint::new(0.0, 0.0), 1.0), (CPoint::new(1.5, -0.5), 0.7)])
        .unwrap()
        .add(&density());
    let w = parse_weight("power:gamma=2").unwrap();
    let radii = [1.0, 2.0];
    for (p, q, n) in CASES {
        let a = carleson_diagnose_with(&mu, p, q, 1.0, &w, n, &radii, &spec()).unwrap();
        for c in [0.25, 3.0] {
            let b = carleson_diagnose_with(&mu.scale(c).unwrap(), p, q, 1.0, &w, n, &radii, &spec())
                .unwrap();
            assert!(close(b.empirical_norm, c * a.empirical_norm, 1e-8));
            // G scales with c; the H norm is an L^{p/(p-q)} norm of H, which
            // scales with c as well.
            assert!(close(b.condition_value, c * a.condition_value, 1e-7));
            assert!(b.condition_value >= 0.0 && b.empirical_norm >= 0.0);
        }
    }
}
