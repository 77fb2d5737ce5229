use std::f64::consts::PI;

use focklab::quadcore::{integrate_plane, integrate_region, CPoint, IntegrandMeta, QuadSpec, Region};
use focklab::quadcore::Envelope;
use proptest::prelude::*;

fn gaussian_meta(rate: f64, c: CPoint) -> IntegrandMeta {
    IntegrandMeta::new(Envelope::gaussian_at(rate, c), vec![])
}

fn plane(rate: f64, c: CPoint, spec: &QuadSpec) -> f64 {
    integrate_plane(|z: CPoint| (-rate * (z - c).norm_sqr()).exp(), &gaussian_meta(rate, c), spec)
        .unwrap()
        .value
}

/// Closed-form set: (integrand, meta, exact value).
type Case = (Box<dyn Fn(CPoint) -> f64 + Sync>, IntegrandMeta, f64);

fn closed_forms() -> Vec<Case> {
    vec![
        (Box::new(|z: CPoint| (-z.norm_sqr()).exp()), IntegrandMeta::gaussian(1.0, 0.0), PI),
        (
            Box::new(|z: CPoint| z.norm_sqr() * (-2.0 * z.norm_sqr()).exp()),
            IntegrandMeta::gaussian(2.0, 2.0),
            PI / 4.0,
        ),
        (
            Box::new(|z: CPoint| (-(z - CPoint::new(1.5, -0.5)).norm_sqr()).exp()),
            gaussian_meta(1.0, CPoint::new(1.5, -0.5)),
            PI,
        ),
        (
            Box::new(|z: CPoint| (z.re - 2.0 * z.norm_sqr()).exp()),
            IntegrandMeta::new(
                Envelope {
                    gauss: 2.0,
                    lin: CPoint::new(1.0, 0.0),
                    ..Default::default()
                },
                vec![],
            ),
            PI / 2.0 * (1.0f64 / 8.0).exp(),
        ),
    ]
}

#[test]
fn refinement_stability_on_closed_forms() {
    let spec = QuadSpec::default();
    for (i, (f, meta, exact)) in closed_forms().iter().enumerate() {
        let base = integrate_plane(f, meta, &spec).unwrap().value;
        let deeper = integrate_plane(f, meta, &spec.with_max_refine(2 * spec.max_refine))
            .unwrap()
            .value;
        let finer = integrate_plane(f, meta, &spec.with_base_tile(spec.base_tile / 2.0))
            .unwrap()
            .value;
        let tol = 2.0 * spec.rel_tol * base.abs();
        assert!((deeper - base).abs() <= tol, "case {i}: {deeper} vs {base}");
        assert!((finer - base).abs() <= tol, "case {i}: {finer} vs {base}");
        assert!((base - exact).abs() <= tol, "case {i}: {base} vs {exact}");
    }
}

#[test]
fn bit_identical_across_worker_counts() {
    let spec = QuadSpec::default();
    let sing = [CPoint::new(0.25, 0.0)];
    let run = || {
        let a = plane(1.3, CPoint::new(0.4, -1.0), &spec);
        let b = integrate_region(
            |z: CPoint| (z - sing[0]).norm().ln().abs() * (1.0 + z.re * z.im).cos(),
            &Region::square(CPoint::new(0.0, 0.0), 2.0).unwrap(),
            &sing,
            &spec,
        )
        .unwrap()
        .value;
        (a.to_bits(), b.to_bits())
    };
    let results: Vec<(u64, u64)> = [1, 2, 4]
        .iter()
        .map(|&n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(run)
        })
        .collect();
    assert!(results.windows(2).all(|w| w[0] == w[1]), "{results:?}");
}

fn poly_integrand(c: [f64; 6]) -> impl Fn(CPoint) -> f64 + Sync {
    move |z: CPoint| {
        let (x, y) = (z.re, z.im);
        c[0] + c[1] * x + c[2] * y + c[3] * x * y + c[4] * x.powi(3) * y * y + c[5] * y.powi(5)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translation_invariance(rate in 0.5f64..3.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let spec = QuadSpec::default();
        let v0 = plane(rate, CPoint::new(0.0, 0.0), &spec);
        let va = plane(rate, CPoint::new(x, y), &spec);
        prop_assert!((va - v0).abs() <= 2.0 * spec.rel_tol * v0.abs());
        prop_assert!((v0 - PI / rate).abs() <= 2.0 * spec.rel_tol * v0.abs());
    }

    #[test]
    fn additivity_over_quarters(
        c in proptest::array::uniform6(-1.0f64..1.0),
        x in -2.0f64..2.0,
        y in -2.0f64..2.0,
        side in 0.1f64..3.0,
    ) {
        let spec = QuadSpec::default();
        let f = poly_integrand(c);
        let center = CPoint::new(x, y);
        let whole = integrate_region(&f, &Region::square(center, side).unwrap(), &[], &spec).unwrap().value;
        let h = side / 4.0;
        let mut parts = 0.0;
        for (dx, dy) in [(-h, -h), (h, -h), (-h, h), (h, h)] {
            let q = Region::square(center + CPoint::new(dx, dy), side / 2.0).unwrap();
            parts += integrate_region(&f, &q, &[], &spec).unwrap().value;
        }
        // Degree <= 5 in each variable is integrated exactly; only rounding remains.
        let scale = side * side * (1.0 + x.abs() + y.abs() + side).powi(5);
        prop_assert!((whole - parts).abs() <= spec.abs_tol.max(64.0 * f64::EPSILON * scale));
    }

    #[test]
    fn positivity(k in 0.5f64..6.0, x in -1.0f64..1.0, side in 0.2f64..2.0) {
        let spec = QuadSpec::default();
        let f = |z: CPoint| (k * z.re).sin().powi(2) * (-z.norm_sqr()).exp();
        let v = integrate_region(f, &Region::square(CPoint::new(x, 0.0), side).unwrap(), &[], &spec).unwrap().value;
        prop_assert!(v >= 0.0);
        let d = integrate_region(f, &Region::disc(CPoint::new(x, 0.0), side).unwrap(), &[], &spec).unwrap().value;
        prop_assert!(d >= 0.0);
    }
}
