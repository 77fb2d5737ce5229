use focklab::fockcore::{
    diff_antidiff, fock_norm, lp_ratio, lp_test_family, project, EntireFn, FockParams, ProjInput,
};
use focklab::quadcore::{lattice_points, CPoint, IntegrandMeta, QuadSpec};
use focklab::weights::{parse_weight, Weight};
use num_complex::Complex64;
use proptest::prelude::*;

const CATALOG: &[&str] = &[
    "constant:c=2.5",
    "power:gamma=2",
    "power:gamma=-2",
    "shifted_power:gamma=1.5,z0=1-1i",
    "exp_abs:gamma=1,z0=0.5i",
    "exp_re:gamma=-0.7",
    "muck:p=3",
    "power_pure:delta=0.5",
    "product:(power:gamma=1;exp_re:gamma=0.3)",
    "power:gamma=1|translate:1+1i",
    "exp_abs:gamma=1|distort:2",
    "power:gamma=2|dual:3",
];

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(x, y)| Complex64::new(x, y))
}

fn poly(max_deg: usize) -> impl Strategy<Value = EntireFn> {
    proptest::collection::vec(complex(1.0), 1..=max_deg + 1).prop_map(EntireFn::poly)
}

/// Polynomial plus a kernel-type term with exponent `b`.
fn mixed() -> impl Strategy<Value = EntireFn> {
    (poly(4), complex(1.0), complex(2.0), 0usize..3).prop_map(|(p, c, b, m)| {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
        coeffs[m] = c;
        p.add(&EntireFn::exp_poly(b, coeffs))
    })
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

fn spec() -> QuadSpec {
    QuadSpec::default().with_rel_tol(1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homogeneity(f in poly(5), c in complex(3.0), p in 1.0f64..3.0) {
        prop_assume!(c.norm() > 1e-3 && !f.is_zero());
        let params = FockParams::new(p, 1.5).unwrap();
        let w = parse_weight("power:gamma=1").unwrap();
        let a = fock_norm(&f, &params, &w, &spec()).unwrap();
        let b = fock_norm(&f.scale(c), &params, &w, &spec()).unwrap();
        prop_assert!((b - c.norm() * a).abs() <= 1e-8 * b, "{} vs {}", b, c.norm() * a);
    }

    #[test]
    fn derivative_undoes_antiderivative(f in mixed(), z in complex(2.0)) {
        // Exact up to the rounding of c/b * b in each coefficient.
        let g = diff_antidiff(&diff_antidiff(&f, -1), 1);
        prop_assert!(close(g.eval(z), f.eval(z), 1e-13));
        let g2 = diff_antidiff(&diff_antidiff(&f, -3), 3);
        prop_assert!(close(g2.eval(z), f.eval(z), 1e-12));
    }

    #[test]
    fn antiderivative_vanishes_at_origin(f in mixed(), n in 1i32..4) {
        let g = diff_antidiff(&f, -n);
        let t = g.taylor(n as usize - 1);
        for c in t {
            prop_assert!(c.norm() <= 1e-13 * (1.0 + f.eval(CPoint::new(0.0, 0.0)).norm()));
        }
    }

    #[test]
    fn lp_ratio_is_scale_invariant(f in poly(5), c in complex(5.0)) {
        prop_assume!(c.norm() > 1e-2 && f.degree() >= 1);
        let params = FockParams::new(2.0, 1.0).unwrap().with_order(1);
        let w = parse_weight("power:gamma=2").unwrap();
        let a = lp_ratio(&f, &params, &w, &spec()).unwrap();
        let b = lp_ratio(&f.scale(c), &params, &w, &spec()).unwrap();
        prop_assert!((a.ratio - b.ratio).abs() <= 1e-8 * a.ratio, "{} vs {}", a.ratio, b.ratio);
    }

    #[test]
    fn majorization(g in mixed(), alpha in 0.8f64..2.5, z in complex(1.5)) {
        let s = QuadSpec::default().with_rel_tol(1e-8);
        let plain = project(&g, alpha, z, false, &s).unwrap();
        let positive = project(&g, alpha, z, true, &s).unwrap().re;
        prop_assert!(plain.norm() <= positive * (1.0 + 1e-7) + 1e-12, "{} > {}", plain.norm(), positive);
    }
}

#[test]
fn reproducing_property() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut cases: Vec<EntireFn> = (0..=6)
        .map(|d| {
            let coeffs = (0..=d)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            EntireFn::poly(coeffs)
        })
        .collect();
    for b in [
        CPoint::new(2.0, 0.0),
        CPoint::new(0.0, -1.5),
        CPoint::new(1.2, 1.2),
        CPoint::new(-0.5, 0.3),
    ] {
        cases.push(EntireFn::exp_poly(b, vec![Complex64::new(1.0, 0.0)]));
    }
    let s = QuadSpec::default().with_rel_tol(1e-10);
    for alpha in [1.0, 2.0] {
        for f in &cases {
            for z in lattice_points(1.0, 2.0).unwrap() {
                let v = project(f, alpha, z, false, &s).unwrap();
                let e = f.eval(z);
                assert!((v - e).norm() < 1e-6, "{f} alpha={alpha} z={z}: {v} vs {e}");
            }
        }
    }
}

/// Largest `[P+_alpha(|g|)(z)]^theta / P+_{theta alpha}(|g|^theta)(z)` over a
/// grid.
fn subordination_ratio(g: &EntireFn, alpha: f64, theta: f64, spec: &QuadSpec) -> f64 {
    let gt = |z: CPoint| Complex64::new(g.eval(z).norm().powf(theta), 0.0);
    let meta = IntegrandMeta::new(g.envelope(theta), vec![]);
    let sampled = ProjInput::Sampled { f: &gt, meta: &meta };
    let mut worst = 0.0f64;
    for z in lattice_points(1.0, 2.0).unwrap() {
        let lhs = project(g, alpha, z, true, spec).unwrap().re.powf(theta);
        let rhs = project(sampled, theta * alpha, z, true, spec).unwrap().re;
        assert!(lhs.is_finite() && rhs > 0.0);
        worst = worst.max(lhs / rhs);
    }
    worst
}

#[test]
fn subordination_constant_is_finite_and_stable() {
    let alpha = 1.0;
    let gs = [
        EntireFn::constant(Complex64::new(1.0, 0.0)),
        EntireFn::kernel(alpha, CPoint::new(1.0, 0.0)),
        EntireFn::monomial(2),
    ];
    let coarse = QuadSpec::default().with_rel_tol(1e-6);
    let fine = QuadSpec::default().with_rel_tol(1e-8);
    let mut c_coarse = 0.0f64;
    let mut c_fine = 0.0f64;
    for theta in [0.5, 1.0] {
        for g in &gs {
            c_coarse = c_coarse.max(subordination_ratio(g, alpha, theta, &coarse));
            c_fine = c_fine.max(subordination_ratio(g, alpha, theta, &fine));
        }
    }
    assert!(c_fine.is_finite() && c_fine > 0.0);
    assert!((c_coarse - c_fine).abs() <= 1e-4 * c_fine, "{c_coarse} vs {c_fine}");
}

#[test]
fn embedding_sanity() {
    let s = QuadSpec::default().with_rel_tol(1e-6);
    let family = lp_test_family(1.0, 2024);
    for spec_str in CATALOG {
        let w: Weight = parse_weight(spec_str).unwrap();
        for p in [1.0, 2.0] {
            let params = FockParams::new(p, 1.0).unwrap();
            for (name, f) in &family {
                let n = fock_norm(f, &params, &w, &s)
                    .unwrap_or_else(|e| panic!("{spec_str} p={p} {name}: {e}"));
                assert!(n.is_finite() && n > 0.0, "{spec_str} p={p} {name}: {n}");
            }
        }
    }
}
