use focklab::apclass::{ap_constant, ap_constant_in, ap_quotient, berezin, kt_check, KT_MAX_GROWTH};
use focklab::quadcore::{CPoint, QuadSpec, Region};
use focklab::weights::{derive_weight, parse_weight, Derive, Weight};
use proptest::prelude::*;

const FINITE_AP: &[&str] = &[
    "constant",
    "power:gamma=2",
    "power:gamma=-2",
    "exp_abs:gamma=1",
    "exp_re:gamma=1",
    "muck:p=2",
];

fn spec() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-9)
}

#[test]
fn constants_are_at_least_one() {
    for s in FINITE_AP.iter().chain(["log_pos", "shifted_power:gamma=-1,z0=0.3+0.2i"].iter()) {
        let w = parse_weight(s).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let r = ap_constant(&w, p, 1.0, 1.0, &spec()).unwrap();
            assert!(r.constant_estimate >= 1.0 - 1e-9, "{s} p={p}: {}", r.constant_estimate);
        }
    }
}

#[test]
fn monotone_in_p() {
    for s in FINITE_AP {
        let w = parse_weight(s).unwrap();
        let vals: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 5.0]
            .iter()
            .map(|&p| ap_constant(&w, p, 1.0, 1.0, &spec()).unwrap().constant_estimate)
            .collect();
        for v in vals.windows(2) {
            assert!(v[1] <= v[0] + 1e-6, "{s}: {vals:?}");
        }
    }
}

#[test]
fn translation_invariance_over_translated_windows() {
    let a = CPoint::new(0.75, -1.25);
    for s in ["exp_re:gamma=1", "power:gamma=2", "exp_abs:gamma=1"] {
        let w = parse_weight(s).unwrap();
        let wa = derive_weight(&w, Derive::Translate(a)).unwrap();
        let c = ap_constant_in(&w, 2.0, 1.0, a, 1.0, &spec()).unwrap().constant_estimate;
        let ca = ap_constant(&wa, 2.0, 1.0, 1.0, &spec()).unwrap().constant_estimate;
        assert!((c - ca).abs() <= 2.0 * spec().rel_tol * c.max(1.0) + 1e-9, "{s}: {c} vs {ca}");
    }
}

#[test]
fn duality_on_a_square() {
    let q = Region::square(CPoint::new(1.5, -0.5), 1.0).unwrap();
    for s in FINITE_AP {
        let w = parse_weight(s).unwrap();
        for p in [1.5, 2.0, 4.0] {
            let pp = p / (p - 1.0);
            let wd = derive_weight(&w, Derive::Dual(p)).unwrap();
            let lhs = ap_quotient(&wd, pp, &q, &spec()).unwrap();
            let rhs = ap_quotient(&w, p, &q, &spec()).unwrap().powf(pp / p);
            assert!((lhs - rhs).abs() <= 1e-7 * rhs, "{s} p={p}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn duality_preserves_finiteness() {
    for s in FINITE_AP {
        let w = parse_weight(s).unwrap();
        let wd = derive_weight(&w, Derive::Dual(2.0)).unwrap();
        let c = ap_constant(&w, 2.0, 1.0, 1.0, &spec()).unwrap();
        let cd = ap_constant(&wd, 2.0, 1.0, 1.0, &spec()).unwrap();
        assert_eq!(c.infinite, cd.infinite, "{s}");
        assert!(c.constant_estimate.is_finite() && cd.constant_estimate.is_finite());
    }
}

#[test]
fn kt_feasible_at_reciprocal_p() {
    let squares: Vec<Region> = [(0.0, 0.0), (2.0, 0.0), (0.0, 3.0), (4.0, 4.0)]
        .iter()
        .map(|&(x, y)| Region::square(CPoint::new(x, y), 1.0).unwrap())
        .collect();
    for s in FINITE_AP {
        let w = parse_weight(s).unwrap();
        for p in [2.0, 4.0] {
            assert!(ap_constant(&w, p, 1.0, 1.0, &spec()).unwrap().constant_estimate.is_finite());
            let kt = kt_check(&w, 1.0, &squares, 11, &spec()).unwrap();
            let (_, sup, growth) = *kt
                .scan
                .iter()
                .find(|(d, _, _)| (d - 1.0 / p).abs() < 1e-12)
                .unwrap();
            assert!(sup.is_finite() && growth <= KT_MAX_GROWTH, "{s} p={p}: {sup} {growth}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn berezin_is_linear(c in 0.01f64..100.0, x in -2.0f64..2.0, y in -2.0f64..2.0, alpha in 0.5f64..3.0) {
        let w = parse_weight("product:(power:gamma=1;exp_re:gamma=0.5)").unwrap();
        let cw = Weight::product(vec![Weight::constant(c).unwrap(), w.clone()]).unwrap();
        let z = CPoint::new(x, y);
        let b = berezin(&w, alpha, z, &spec()).unwrap();
        let bc = berezin(&cw, alpha, z, &spec()).unwrap();
        prop_assert!((bc - c * b).abs() <= 1e-8 * c * b);
    }
}
