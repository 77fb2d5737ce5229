//! Weighted Fock norms, the Bergman projection and the Littlewood–Paley,
//! kernel-norm and representation-formula experiments.

mod entire;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_usage, Result};
use crate::quadcore::{integrate_plane, integrate_region, CPoint, Envelope, IntegrandMeta, QuadSpec, Region};
use crate::weights::{derive_weight, weight_measure, Derive, Weight};

pub use entire::{diff_antidiff, parse_entire, EntireFn};

/// Exponents and flags of a weighted Fock norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockParams {
    pub p: f64,
    pub alpha: f64,
    /// Derivative order: the Fock–Sobolev order for norms, the
    /// Littlewood–Paley order for [`lp_ratio`].
    pub k: usize,
    /// Multiply the integral by `p*alpha/(2*pi)`.
    pub normalized: bool,
}

impl FockParams {
    pub fn new(p: f64, alpha: f64) -> Result<FockParams> {
        let params = FockParams {
            p,
            alpha,
            k: 0,
            normalized: false,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_order(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn normalized(mut self, on: bool) -> Self {
        self.normalized = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_usage!(self.p > 0.0 && self.p.is_finite(), "p must be positive, got {}", self.p);
        ensure_usage!(
            self.alpha > 0.0 && self.alpha.is_finite(),
            "alpha must be positive, got {}",
            self.alpha
        );
        Ok(())
    }
}

/// One side-by-side comparison of the two members of an equivalence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// `int |f|^p e^{-p alpha |z|^2/2} w dA` as `(value, shift)` with the true
/// integral equal to `value * e^shift`.
pub(crate) fn lp_integral_scaled(f: &EntireFn, p: f64, alpha: f64, w: &Weight, spec: &QuadSpec) -> Result<(f64, f64)> {
    if f.is_zero() {
        return Ok((0.0, 0.0));
    }
    let env = f
        .envelope(p)
        .times(Envelope::gaussian(p * alpha / 2.0))
        .times(w.envelope());
    let shift = env.ln_peak();
    let mut sing = w.singular_points().to_vec();
    if f.eval(CPoint::new(0.0, 0.0)) == Complex64::new(0.0, 0.0) {
        sing.push(CPoint::new(0.0, 0.0));
    }
    let meta = IntegrandMeta::new(env, sing);
    let r = integrate_plane(
        |z: CPoint| {
            let e = p * f.ln_abs(z) - p * alpha / 2.0 * z.norm_sqr() + w.ln_eval(z) - shift;
            if e == f64::NEG_INFINITY {
                0.0
            } else {
                e.exp()
            }
        },
        &meta,
        spec,
    )?;
    Ok((r.value, shift))
}

/// `int |f|^p e^{-p alpha |z|^2/2} w dA`.
pub fn lp_integral(f: &EntireFn, p: f64, alpha: f64, w: &Weight, spec: &QuadSpec) -> Result<f64> {
    let (v, s) = lp_integral_scaled(f, p, alpha, w, spec)?;
    Ok(v * s.exp())
}

fn derivatives_at_zero(f: &EntireFn, k: usize) -> Vec<Complex64> {
    let t = f.taylor(k);
    let mut fact = 1.0;
    t.iter()
        .enumerate()
        .map(|(j, c)| {
            if j > 0 {
                fact *= j as f64;
            }
            c * fact
        })
        .take(k)
        .collect()
}

/// `||f||^p`: the weighted Fock norm to the power `p`, or the Fock–Sobolev
/// norm of order `params.k` when that is positive.
pub fn fock_norm_pow(f: &EntireFn, params: &FockParams, w: &Weight, spec: &QuadSpec) -> Result<f64> {
    params.validate()?;
    let (p, alpha) = (params.p, params.alpha);
    let g = diff_antidiff(f, params.k as i32);
    let mut integral = lp_integral(&g, p, alpha, w, spec)?;
    if params.normalized {
        integral *= p * alpha / (2.0 * PI);
    }
    let head: f64 = derivatives_at_zero(f, params.k)
        .iter()
        .map(|d| d.norm().powf(p))
        .sum();
    Ok(head + integral)
}

pub fn fock_norm(f: &EntireFn, params: &FockParams, w: &Weight, spec: &QuadSpec) -> Result<f64> {
    Ok(fock_norm_pow(f, params, w, spec)?.powf(1.0 / params.p))
}

/// Function argument for the projection: exact, or a sampled callable with
/// an envelope for its modulus.
#[derive(Clone, Copy)]
pub enum ProjInput<'a> {
    Entire(&'a EntireFn),
    Sampled {
        f: &'a (dyn Fn(CPoint) -> Complex64 + Sync),
        meta: &'a IntegrandMeta,
    },
}

impl<'a> From<&'a EntireFn> for ProjInput<'a> {
    fn from(f: &'a EntireFn) -> Self {
        ProjInput::Entire(f)
    }
}

impl ProjInput<'_> {
    fn envelope(&self) -> Envelope {
        match self {
            ProjInput::Entire(f) => f.envelope(1.0),
            ProjInput::Sampled { meta, .. } => meta.envelope,
        }
    }

    fn singular_points(&self) -> Vec<CPoint> {
        match self {
            ProjInput::Entire(_) => Vec::new(),
            ProjInput::Sampled { meta, .. } => meta.singular_points.clone(),
        }
    }

    /// `(v, s)` with value `v e^s`.
    fn eval_scaled(&self, z: CPoint) -> (Complex64, f64) {
        match self {
            ProjInput::Entire(f) => f.eval_scaled(z),
            ProjInput::Sampled { f, .. } => (f(z), 0.0),
        }
    }
}

/// `(alpha/pi) int conj(zeta)^k g(zeta) e^{alpha conj(zeta) z - alpha |zeta|^2} dA`,
/// with `|.|` applied to `g` and the kernel in positive mode.
fn projection_integral(
    g: ProjInput<'_>,
    alpha: f64,
    conj_power: usize,
    z: CPoint,
    positive: bool,
    spec: &QuadSpec,
) -> Result<Complex64> {
    ensure_usage!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive, got {alpha}");
    let genv = g.envelope();
    ensure_usage!(
        genv.gauss > -alpha,
        "function grows like exp({}|z|^2), too fast for P_{alpha}",
        -genv.gauss
    );
    let env = genv
        .times(Envelope {
            gauss: alpha,
            lin: z.conj() * alpha,
            exp_rate: 0.0,
            poly: conj_power as f64,
        });
    let shift = env.ln_peak();
    let meta = IntegrandMeta::new(env, g.singular_points());
    let k = conj_power as i32;
    let v: Complex64 = if positive {
        Complex64::new(
            integrate_plane(
                |u: CPoint| {
                    let (v, s) = g.eval_scaled(u);
                    let e = s + alpha * (u.conj() * z).re - alpha * u.norm_sqr() - shift;
                    v.norm() * u.norm().powi(k) * e.exp()
                },
                &meta,
                spec,
            )?
            .value,
            0.0,
        )
    } else {
        integrate_plane(
            |u: CPoint| {
                let (v, s) = g.eval_scaled(u);
                let e = u.conj() * z * alpha + (s - alpha * u.norm_sqr() - shift);
                v * u.conj().powi(k) * e.exp()
            },
            &meta,
            spec,
        )?
        .value
    };
    Ok(v * (alpha / PI * shift.exp()))
}

/// `P_alpha(g)(z)`, or `P+_alpha(|g|)(z)` (returned as a real part) when
/// `positive_mode` is set.
pub fn project<'a>(
    g: impl Into<ProjInput<'a>>,
    alpha: f64,
    z: CPoint,
    positive_mode: bool,
    spec: &QuadSpec,
) -> Result<Complex64> {
    projection_integral(g.into(), alpha, 0, z, positive_mode, spec)
}

/// `alpha^k P_alpha(conj(zeta)^k g)(z)`, which equals `g^{(k)}(z)` for entire `g`.
pub fn project_derivative<'a>(
    g: impl Into<ProjInput<'a>>,
    alpha: f64,
    k: usize,
    z: CPoint,
    spec: &QuadSpec,
) -> Result<Complex64> {
    Ok(projection_integral(g.into(), alpha, k, z, false, spec)? * alpha.powi(k as i32))
}

/// `alpha^2 / (2 alpha - beta)`.
pub fn gamma_of(alpha: f64, beta: f64) -> f64 {
    alpha * alpha / (2.0 * alpha - beta)
}

/// Positive projection next to its Gaussian growth bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthBound {
    pub positive_projection: f64,
    /// `(alpha/pi) e^{gamma |z|^2/2} int |g| e^{-beta |zeta|^2/2} dA`.
    pub bound: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Compares `P+_alpha(|g|)(z)` with its growth bound; `beta` defaults to
/// `alpha + 0.1`.
pub fn growth_bound(g: &EntireFn, alpha: f64, beta: Option<f64>, z: CPoint, spec: &QuadSpec) -> Result<GrowthBound> {
    let beta = beta.unwrap_or(alpha + 0.1);
    ensure_usage!(
        beta > 0.0 && beta < 2.0 * alpha,
        "beta must lie in (0, 2 alpha), got {beta} for alpha = {alpha}"
    );
    let gamma = gamma_of(alpha, beta);
    let positive_projection = project(g, alpha, z, true, spec)?.re;
    let f1 = lp_integral(g, 1.0, beta, &Weight::one(), spec)?;
    Ok(GrowthBound {
        positive_projection,
        bound: alpha / PI * (gamma * z.norm_sqr() / 2.0).exp() * f1,
        beta,
        gamma,
    })
}

/// Both sides of the Littlewood–Paley equivalence of order `params.k`.
pub fn lp_ratio(f: &EntireFn, params: &FockParams, w: &Weight, spec: &QuadSpec) -> Result<RatioReport> {
    params.validate()?;
    ensure_usage!(params.k >= 1, "Littlewood–Paley order must be at least 1");
    ensure_usage!(!f.is_zero(), "Littlewood–Paley ratio needs a nonzero function");
    let (p, alpha, k) = (params.p, params.alpha, params.k);
    let lhs = lp_integral(f, p, alpha, w, spec)?;
    let wk = derive_weight(w, Derive::Distort(k as f64 * p))?;
    let head: f64 = derivatives_at_zero(f, k).iter().map(|d| d.norm().powf(p)).sum();
    let rhs = head + lp_integral(&diff_antidiff(f, k as i32), p, alpha, &wk, spec)?;
    Ok(RatioReport {
        case: format!("{f}"),
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// `||K_a||^p` against `e^{p alpha |a|^2/2} w(D(a,1))`.
pub fn kernel_norm_check(a: CPoint, params: &FockParams, w: &Weight, spec: &QuadSpec) -> Result<RatioReport> {
    params.validate()?;
    let (p, alpha) = (params.p, params.alpha);
    let ka = EntireFn::kernel(alpha, a);
    let (v, shift) = lp_integral_scaled(&ka, p, alpha, w, spec)?;
    let growth = p * alpha * a.norm_sqr() / 2.0;
    let mass = weight_measure(w, &Region::disc(a, 1.0)?, spec)?;
    Ok(RatioReport {
        case: format!("K_{{{}}}", crate::weights::format_complex(a)),
        lhs: v * shift.exp(),
        rhs: growth.exp() * mass,
        ratio: v * (shift - growth).exp() / mass,
    })
}

/// `f(z) - T_{2k-1}(f)(z)` next to the quadrature value of the remainder
/// integral, and their distance.
pub fn remainder_check(
    f: &EntireFn,
    k: usize,
    alpha: f64,
    z: CPoint,
    spec: &QuadSpec,
) -> Result<(Complex64, Complex64, f64)> {
    ensure_usage!(k >= 1, "remainder order must be at least 1");
    ensure_usage!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive, got {alpha}");
    let t = f.taylor_poly(2 * k - 1);
    let rest = f.sub(&t);
    let lhs = rest.eval(z);
    let h = diff_antidiff(&rest, k as i32);
    if h.is_zero() {
        return Ok((lhs, Complex64::new(0.0, 0.0), lhs.norm()));
    }
    // h(w) / w^k as a power series near 0.
    const SERIES_TERMS: usize = 60;
    const SERIES_RADIUS: f64 = 0.5;
    let c = f.taylor(2 * k + SERIES_TERMS);
    let mut series: Vec<Complex64> = (0..=SERIES_TERMS)
        .map(|m| {
            let ratio: f64 = ((m + k + 1)..=(m + 2 * k)).map(|j| j as f64).product();
            c[m + 2 * k] * ratio
        })
        .collect();
    let size = |m: usize, s: &Complex64| s.norm() * SERIES_RADIUS.powi(m as i32);
    let top = series.iter().enumerate().map(|(m, s)| size(m, s)).fold(0.0, f64::max);
    let keep = series
        .iter()
        .enumerate()
        .rposition(|(m, s)| size(m, s) > 1e-18 * top)
        .map_or(0, |m| m + 1);
    series.truncate(keep);
    let env = h.envelope(1.0).times(Envelope {
        gauss: alpha,
        lin: z.conj() * alpha,
        exp_rate: 0.0,
        poly: 0.0,
    });
    let shift = env.ln_peak();
    let meta = IntegrandMeta::new(env, vec![CPoint::new(0.0, 0.0)]);
    let ki = k as i32;
    let r = integrate_plane(
        |w: CPoint| {
            let r = w.norm();
            if r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let e = w.conj() * z * alpha + (-alpha * w.norm_sqr() - shift);
            let g = if r < SERIES_RADIUS {
                let q = series.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, s| acc * w + s);
                q * (w / r).powi(2 * ki)
            } else {
                h.eval(w) / w.conj().powi(ki)
            };
            g * e.exp()
        },
        &meta,
        spec,
    )?;
    let rhs = r.value * (alpha.powi(1 - ki) / PI * shift.exp());
    Ok((lhs, rhs, (lhs - rhs).norm()))
}

/// Both sides of the local mean-value bound with unit constant; the margin
/// is `rhs / lhs`, infinite when `f(z) = 0`.
pub fn pointwise_bound_check(
    f: &EntireFn,
    p: f64,
    alpha: f64,
    w: &Weight,
    t: f64,
    z: CPoint,
    spec: &QuadSpec,
) -> Result<(f64, f64, f64)> {
    ensure_usage!(p > 0.0 && p.is_finite(), "p must be positive, got {p}");
    ensure_usage!(alpha >= 0.0 && alpha.is_finite(), "alpha must be nonnegative, got {alpha}");
    ensure_usage!(t > 0.0 && t.is_finite(), "radius must be positive, got {t}");
    let ln_lhs = p * f.ln_abs(z) - p * alpha / 2.0 * z.norm_sqr();
    let shift = if ln_lhs.is_finite() { ln_lhs } else { 0.0 };
    let disc = Region::disc(z, t)?;
    let integral = integrate_region(
        |u: CPoint| {
            let e = p * f.ln_abs(u) - p * alpha / 2.0 * u.norm_sqr() + w.ln_eval(u) - shift;
            if e == f64::NEG_INFINITY {
                0.0
            } else {
                e.exp()
            }
        },
        &disc,
        w.singular_points(),
        spec,
    )?
    .value;
    let mass = weight_measure(w, &disc, spec)?;
    let scaled_rhs = integral / mass;
    let lhs = ln_lhs.exp();
    let rhs = scaled_rhs * shift.exp();
    let margin = if lhs == 0.0 { f64::INFINITY } else { scaled_rhs / (ln_lhs - shift).exp() };
    Ok((lhs, rhs, margin))
}

/// The declared Littlewood–Paley test family for a given `alpha`:
/// `z^m` for `m <= 8`, kernels at `0.5, 1, 2, 1+i`, and four seeded random
/// polynomials of degree 5.
pub fn lp_test_family(alpha: f64, seed: u64) -> Vec<(String, EntireFn)> {
    let mut out: Vec<(String, EntireFn)> = (0..=8)
        .map(|m| (format!("z^{m}"), EntireFn::monomial(m)))
        .collect();
    for a in [
        CPoint::new(0.5, 0.0),
        CPoint::new(1.0, 0.0),
        CPoint::new(2.0, 0.0),
        CPoint::new(1.0, 1.0),
    ] {
        out.push((
            format!("K_{{{}}}", crate::weights::format_complex(a)),
            EntireFn::kernel(alpha, a),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..4 {
        let coeffs = (0..6)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        out.push((format!("rand5#{i}"), EntireFn::poly(coeffs)));
    }
    out
}

/// [`lp_ratio`] over a family, labelled by the family names.
pub fn lp_ratios(
    family: &[(String, EntireFn)],
    params: &FockParams,
    w: &Weight,
    spec: &QuadSpec,
) -> Result<Vec<RatioReport>> {
    family
        .par_iter()
        .map(|(name, f)| {
            let mut r = lp_ratio(f, params, w, spec)?;
            r.case = name.clone();
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn spec() -> QuadSpec {
        QuadSpec::default()
    }

    #[test]
    fn norm_examples() {
        let one = EntireFn::constant(c(1.0, 0.0));
        let w = Weight::one();
        let n = fock_norm(&one, &FockParams::new(2.0, 2.0).unwrap(), &w, &spec()).unwrap();
        assert!(rel(n, (PI / 2.0).sqrt()) < 1e-10);
        for (p, alpha) in [(1.0, 0.5), (2.0, 3.0), (3.5, 1.0)] {
            let params = FockParams::new(p, alpha).unwrap().normalized(true);
            let n = fock_norm(&one, &params, &w, &spec()).unwrap();
            assert!(rel(n, 1.0) < 1e-10, "{p} {alpha}: {n}");
        }
        let a = c(1.0, -0.5);
        let (p, alpha) = (2.0, 1.5);
        let ka = EntireFn::kernel(alpha, a);
        let n = fock_norm(&ka, &FockParams::new(p, alpha).unwrap(), &w, &spec()).unwrap();
        let oracle = ((p * alpha * a.norm_sqr() / 2.0).exp() * 2.0 * PI / (p * alpha)).powf(1.0 / p);
        assert!(rel(n, oracle) < 1e-10);
    }

    #[test]
    fn fock_sobolev_adds_head() {
        // f = 1 + z, order 1: |f(0)|^p + int |1|^p e^{-p alpha |z|^2/2}.
        let f = EntireFn::poly(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let params = FockParams::new(2.0, 2.0).unwrap().with_order(1);
        let n = fock_norm_pow(&f, &params, &Weight::one(), &spec()).unwrap();
        assert!(rel(n, 1.0 + PI / 2.0) < 1e-10);
    }

    #[test]
    fn projection_examples() {
        let one = EntireFn::constant(c(1.0, 0.0));
        let z = c(0.7, -1.2);
        let v = project(&one, 1.5, z, false, &spec()).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-9);
        let d = project_derivative(&one, 2.0, 1, z, &spec()).unwrap();
        assert!(d.norm() < 1e-9);
        for z in [c(0.0, 0.0), c(1.0, 1.0), c(-2.0, 0.5)] {
            let v = project(&one, 1.0, z, true, &spec()).unwrap();
            assert!(rel(v.re, (z.norm_sqr() / 4.0).exp()) < 1e-9);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn projection_derivative_identity() {
        let g = EntireFn::kernel(1.0, c(0.5, 0.5)).add(&EntireFn::monomial(3));
        let z = c(0.4, -0.3);
        for k in 1..=3 {
            let v = project_derivative(&g, 1.0, k, z, &spec()).unwrap();
            let exact = diff_antidiff(&g, k as i32).eval(z);
            assert!((v - exact).norm() < 1e-8 * (1.0 + exact.norm()), "{k}");
        }
    }

    #[test]
    fn growth_bound_holds() {
        let g = EntireFn::kernel(1.0, c(1.0, 0.0));
        for z in [c(0.0, 0.0), c(1.5, -1.0)] {
            let b = growth_bound(&g, 1.0, None, z, &spec()).unwrap();
            assert!(b.positive_projection <= b.bound);
            assert!((b.gamma - 1.0 / 0.9).abs() < 1e-15);
        }
        assert!(growth_bound(&g, 1.0, Some(2.0), c(0.0, 0.0), &spec())
            .unwrap_err()
            .is_usage());
    }

    #[test]
    fn too_fast_growth_is_usage_error() {
        let meta = IntegrandMeta::new(Envelope::gaussian(-1.0), vec![]);
        let f = |z: CPoint| Complex64::new(z.norm_sqr().exp(), 0.0);
        let g = ProjInput::Sampled { f: &f, meta: &meta };
        assert!(project(g, 1.0, c(0.0, 0.0), false, &spec()).unwrap_err().is_usage());
    }

    #[test]
    fn lp_examples() {
        let w = Weight::one();
        let params = FockParams::new(2.0, 2.0).unwrap().with_order(1);
        let r = lp_ratio(&EntireFn::constant(c(1.0, 0.0)), &params, &w, &spec()).unwrap();
        assert!(rel(r.lhs, PI / 2.0) < 1e-10);
        assert_eq!(r.rhs, 1.0);
        assert!(rel(r.ratio, PI / 2.0) < 1e-10);
        let r = lp_ratio(&EntireFn::monomial(1), &params, &w, &spec()).unwrap();
        assert!(rel(r.lhs, PI / 4.0) < 1e-10);
        // radial oracle by composite Simpson on [0, 8]
        let n = 20000;
        let hstep = 8.0 / n as f64;
        let g = |r: f64| r * (-2.0 * r * r).exp() / (1.0 + r).powi(2);
        let mut s = g(0.0) + g(8.0);
        for i in 1..n {
            s += g(i as f64 * hstep) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let oracle = 2.0 * PI * s * hstep / 3.0;
        assert!(rel(r.rhs, oracle) < 1e-9, "{} {oracle}", r.rhs);
        assert!(lp_ratio(&EntireFn::zero(), &params, &w, &spec()).unwrap_err().is_usage());
        assert!(lp_ratio(&EntireFn::monomial(1), &params.with_order(0), &w, &spec())
            .unwrap_err()
            .is_usage());
    }

    #[test]
    fn kernel_norm_examples() {
        let w = Weight::one();
        let params = FockParams::new(2.0, 2.0).unwrap();
        let r = kernel_norm_check(c(0.0, 0.0), &params, &w, &spec()).unwrap();
        assert!(rel(r.lhs, PI / 2.0) < 1e-10);
        assert!(rel(r.rhs, PI) < 1e-10);
        assert!(rel(r.ratio, 0.5) < 1e-10);
        let params = FockParams::new(1.0, 1.0).unwrap();
        let r = kernel_norm_check(c(3.0, 4.0), &params, &w, &spec()).unwrap();
        assert!(rel(r.ratio, 2.0) < 1e-9, "{}", r.ratio);
    }

    #[test]
    fn remainder_examples() {
        let (lhs, rhs, err) = remainder_check(&EntireFn::monomial(2), 1, 1.0, c(1.0, 0.0), &spec()).unwrap();
        assert!((lhs - c(1.0, 0.0)).norm() < 1e-15);
        assert!((rhs - c(1.0, 0.0)).norm() < 1e-6, "{rhs}");
        assert!(err < 1e-6);
        let lin = EntireFn::poly(vec![c(2.0, 1.0), c(-1.0, 3.0)]);
        let (lhs, rhs, err) = remainder_check(&lin, 1, 1.0, c(0.3, 0.2), &spec()).unwrap();
        assert_eq!((lhs, rhs, err), (c(0.0, 0.0), c(0.0, 0.0), 0.0));
        let ka = EntireFn::kernel(1.0, c(1.0, 0.5));
        for z in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)] {
            let (_, _, err) = remainder_check(&ka, 1, 1.0, z, &spec()).unwrap();
            assert!(err < 1e-6, "{z}: {err}");
        }
        let (_, _, err) = remainder_check(&ka, 2, 2.0, c(1.0, -1.0), &spec()).unwrap();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn pointwise_examples() {
        let w = Weight::one();
        let one = EntireFn::constant(c(1.0, 0.0));
        let (lhs, rhs, margin) = pointwise_bound_check(&one, 2.0, 0.0, &w, 1.0, c(0.5, 0.5), &spec()).unwrap();
        assert!(rel(lhs, 1.0) < 1e-15 && rel(rhs, 1.0) < 1e-10 && rel(margin, 1.0) < 1e-10);
        let (lhs, _, margin) =
            pointwise_bound_check(&EntireFn::monomial(1), 2.0, 1.0, &w, 1.0, c(0.0, 0.0), &spec()).unwrap();
        assert_eq!(lhs, 0.0);
        assert_eq!(margin, f64::INFINITY);
        let k1 = EntireFn::kernel(2.0, c(1.0, 0.0));
        let (_, _, m1) = pointwise_bound_check(&k1, 2.0, 2.0, &w, 1.0, c(1.0, 0.0), &spec()).unwrap();
        let (_, _, m2) =
            pointwise_bound_check(&k1, 2.0, 2.0, &w, 1.0, c(1.0, 0.0), &spec().with_rel_tol(1e-12)).unwrap();
        assert!(m1 > 0.0 && rel(m1, m2) < 1e-8);
    }

    #[test]
    fn family_is_deterministic() {
        let a = lp_test_family(1.0, 7);
        let b = lp_test_family(1.0, 7);
        assert_eq!(a.len(), 17);
        assert_eq!(a, b);
        assert_ne!(a[13].1, lp_test_family(1.0, 8)[13].1);
    }
}
