//! Positive measures, Carleson conditions for weighted Fock–Sobolev spaces,
//! and pointwise multipliers between weighted Fock spaces.
//!
//! Measure mini-language:
//!
//! ```text
//! atoms:(x+yi:m;...)
//! density:weight=<weight spec>,gauss=G          w(z) e^{G|z|^2} dA
//! mu_g:g=<fn spec>,q=Q,beta=B,eta=<weight spec> |g|^Q e^{-Q B|z|^2/2} eta dA
//! ```

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_usage, usage, Error, NumericalFailure, Result};
use crate::fockcore::{lp_integral_scaled, parse_entire, EntireFn};
use crate::quadcore::{integrate_plane, integrate_region, lattice_points, CPoint, Envelope, IntegrandMeta, QuadSpec, Region};
use crate::weights::{derive_weight, format_complex, parse_complex, parse_weight, weight_measure, Derive, Weight};

/// Spacing of the unit-disc centre grids used by the reducers.
pub const GRID_SPACING: f64 = 0.5;

/// Absolutely continuous part of a measure.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    /// `weight(z) e^{gauss |z|^2}`.
    Weighted { weight: Weight, gauss: f64 },
    /// `|g|^q e^{-q beta |z|^2/2} eta(z)`.
    MuG { g: EntireFn, q: f64, beta: f64, eta: Weight },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub factor: f64,
    pub kind: DensityKind,
}

impl Density {
    fn ln_eval(&self, z: CPoint) -> f64 {
        let v = match &self.kind {
            DensityKind::Weighted { weight, gauss } => weight.ln_eval(z) + gauss * z.norm_sqr(),
            DensityKind::MuG { g, q, beta, eta } => {
                let lg = g.ln_abs(z);
                if lg == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                q * lg - q * beta / 2.0 * z.norm_sqr() + eta.ln_eval(z)
            }
        };
        v + self.factor.ln()
    }

    fn envelope(&self) -> Envelope {
        match &self.kind {
            DensityKind::Weighted { weight, gauss } => weight.envelope().times(Envelope::gaussian(-gauss)),
            DensityKind::MuG { g, q, beta, eta } => g
                .envelope(*q)
                .times(Envelope::gaussian(q * beta / 2.0))
                .times(eta.envelope()),
        }
    }

    fn singular_points(&self) -> Vec<CPoint> {
        match &self.kind {
            DensityKind::Weighted { weight, .. } => weight.singular_points().to_vec(),
            DensityKind::MuG { eta, .. } => eta.singular_points().to_vec(),
        }
    }

    fn label(&self) -> String {
        let body = match &self.kind {
            DensityKind::Weighted { weight, gauss } => format!("density:weight={},gauss={gauss}", weight.label()),
            DensityKind::MuG { g, q, beta, eta } => {
                format!("mu_g:g=[{g}],q={q},beta={beta},eta={}", eta.label())
            }
        };
        if self.factor == 1.0 {
            body
        } else {
            format!("{}*{body}", self.factor)
        }
    }
}

/// A positive measure: finitely many atoms plus finitely many densities.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PositiveMeasure {
    atoms: Vec<(CPoint, f64)>,
    densities: Vec<Density>,
}

impl PositiveMeasure {
    pub fn zero() -> PositiveMeasure {
        PositiveMeasure::default()
    }

    pub fn atoms(atoms: Vec<(CPoint, f64)>) -> Result<PositiveMeasure> {
        for &(z, m) in &atoms {
            ensure_usage!(z.re.is_finite() && z.im.is_finite(), "atom location must be finite");
            ensure_usage!(m > 0.0 && m.is_finite(), "atom mass must be positive, got {m}");
        }
        Ok(PositiveMeasure {
            atoms,
            densities: Vec::new(),
        })
    }

    pub fn atom(z: CPoint, mass: f64) -> Result<PositiveMeasure> {
        PositiveMeasure::atoms(vec![(z, mass)])
    }

    /// `weight(z) e^{gauss |z|^2} dA`; the product must decay like a Gaussian.
    pub fn density(weight: Weight, gauss: f64) -> Result<PositiveMeasure> {
        ensure_usage!(gauss.is_finite(), "density exponent must be finite");
        let d = Density {
            factor: 1.0,
            kind: DensityKind::Weighted { weight, gauss },
        };
        ensure_usage!(
            d.envelope().gauss > 0.0,
            "density {} has infinite total mass",
            d.label()
        );
        Ok(PositiveMeasure {
            atoms: Vec::new(),
            densities: vec![d],
        })
    }

    /// `|g|^q e^{-q beta |z|^2/2} eta dA`, the measure attached to a multiplier `g`.
    pub fn mu_g(g: EntireFn, q: f64, beta: f64, eta: Weight) -> Result<PositiveMeasure> {
        ensure_usage!(q > 0.0 && q.is_finite(), "q must be positive, got {q}");
        ensure_usage!(beta > 0.0 && beta.is_finite(), "beta must be positive, got {beta}");
        Ok(PositiveMeasure {
            atoms: Vec::new(),
            densities: vec![Density {
                factor: 1.0,
                kind: DensityKind::MuG { g, q, beta, eta },
            }],
        })
    }

    pub fn add(&self, other: &PositiveMeasure) -> PositiveMeasure {
        let mut out = self.clone();
        out.atoms.extend(other.atoms.iter().copied());
        out.densities.extend(other.densities.iter().cloned());
        out
    }

    pub fn scale(&self, c: f64) -> Result<PositiveMeasure> {
        ensure_usage!(c > 0.0 && c.is_finite(), "measure scale must be positive, got {c}");
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.1 *= c;
        }
        for d in &mut out.densities {
            d.factor *= c;
        }
        Ok(out)
    }

    pub fn atom_list(&self) -> &[(CPoint, f64)] {
        &self.atoms
    }

    pub fn densities(&self) -> &[Density] {
        &self.densities
    }

    pub fn is_atomic(&self) -> bool {
        self.densities.is_empty()
    }

    /// `int e^{ln_f} dmu` over the plane, or over the open disc `disc`.
    fn integrate_ln<F>(&self, ln_f: F, env_f: Envelope, disc: Option<(CPoint, f64)>, spec: &QuadSpec) -> Result<f64>
    where
        F: Fn(CPoint) -> f64 + Sync,
    {
        let mut total = 0.0;
        for &(z, m) in &self.atoms {
            if disc.is_none_or(|(c, r)| (z - c).norm() < r) {
                total += m * ln_f(z).exp();
            }
        }
        for d in &self.densities {
            let env = env_f.times(d.envelope());
            let shift = match disc {
                Some((c, _)) => {
                    let s = ln_f(c) + d.ln_eval(c);
                    if s.is_finite() {
                        s
                    } else {
                        env.ln_peak()
                    }
                }
                None => env.ln_peak(),
            };
            let integrand = |z: CPoint| {
                let e = ln_f(z) + d.ln_eval(z) - shift;
                if e == f64::NEG_INFINITY {
                    0.0
                } else {
                    e.exp()
                }
            };
            let v = match disc {
                Some((c, r)) => integrate_region(integrand, &Region::disc(c, r)?, &d.singular_points(), spec)?.value,
                None => {
                    if env.gauss <= 0.0 {
                        return Err(Error::Numerical(NumericalFailure {
                            message: format!("integral against {} diverges", d.label()),
                            estimate: f64::INFINITY,
                            error_bound: f64::INFINITY,
                            trace: Vec::new(),
                            diverging: true,
                        }));
                    }
                    let meta = IntegrandMeta::new(env, d.singular_points());
                    integrate_plane(integrand, &meta, spec)?.value
                }
            };
            total += v * shift.exp();
        }
        Ok(total)
    }
}

impl fmt::Display for PositiveMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.atoms.is_empty() {
            let a: Vec<String> = self
                .atoms
                .iter()
                .map(|(z, m)| format!("{}:{m}", format_complex(*z)))
                .collect();
            parts.push(format!("atoms:({})", a.join(";")));
        }
        parts.extend(self.densities.iter().map(Density::label));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Splits `key=value` lists at commas that start a known key, so values may
/// themselves contain commas.
fn split_keyed<'a>(s: &'a str, keys: &[&str]) -> Result<Vec<(&'a str, &'a str)>> {
    let mut cuts = vec![0];
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                let rest = &s[i + 1..];
                if keys.iter().any(|k| rest.trim_start().starts_with(&format!("{k}="))) {
                    cuts.push(i + 1);
                }
            }
            _ => {}
        }
    }
    cuts.push(s.len() + 1);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let piece = &s[w[0]..w[1] - 1];
        let (k, v) = piece
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value, got {piece:?}")))?;
        let k = k.trim();
        ensure_usage!(keys.contains(&k), "unknown measure parameter {k:?}");
        ensure_usage!(!out.iter().any(|(o, _)| *o == k), "duplicate measure parameter {k:?}");
        out.push((k, v.trim()));
    }
    Ok(out)
}

fn real(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| usage(format!("parameter {key}={v:?} is not a real number")))?;
    ensure_usage!(x.is_finite(), "parameter {key} must be finite");
    Ok(x)
}

/// Parses the measure mini-language.
pub fn parse_measure(spec: &str) -> Result<PositiveMeasure> {
    let spec = spec.trim();
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("measure spec {spec:?} needs a kind prefix")))?;
    match kind.trim() {
        "atoms" => {
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| usage("atoms must be written as (z:m;...)"))?;
            let atoms = inner
                .split(';')
                .map(|a| {
                    let (z, m) = a
                        .rsplit_once(':')
                        .ok_or_else(|| usage(format!("atom {a:?} must be z:m")))?;
                    Ok((parse_complex(z)?, real("mass", m.trim())?))
                })
                .collect::<Result<Vec<_>>>()?;
            PositiveMeasure::atoms(atoms)
        }
        "density" => {
            let kv = split_keyed(rest, &["weight", "gauss"])?;
            let mut weight = None;
            let mut gauss = 0.0;
            for (k, v) in kv {
                match k {
                    "weight" => weight = Some(parse_weight(v)?),
                    _ => gauss = real(k, v)?,
                }
            }
            PositiveMeasure::density(weight.unwrap_or_else(Weight::one), gauss)
        }
        "mu_g" => {
            let kv = split_keyed(rest, &["g", "q", "beta", "eta"])?;
            let (mut g, mut q, mut beta, mut eta) = (None, None, None, Weight::one());
            for (k, v) in kv {
                match k {
                    "g" => g = Some(parse_entire(v)?),
                    "q" => q = Some(real(k, v)?),
                    "beta" => beta = Some(real(k, v)?),
                    _ => eta = parse_weight(v)?,
                }
            }
            PositiveMeasure::mu_g(
                g.ok_or_else(|| usage("mu_g needs g"))?,
                q.ok_or_else(|| usage("mu_g needs q"))?,
                beta.ok_or_else(|| usage("mu_g needs beta"))?,
                eta,
            )
        }
        other => Err(usage(format!("unknown measure kind {other:?}"))),
    }
}

/// `||f||_{L^q(mu)}`.
pub fn measure_norm(f: &EntireFn, mu: &PositiveMeasure, q: f64, spec: &QuadSpec) -> Result<f64> {
    Ok(measure_norm_pow(f, mu, q, spec)?.powf(1.0 / q))
}

/// `||f||^q_{L^q(mu)}`.
pub fn measure_norm_pow(f: &EntireFn, mu: &PositiveMeasure, q: f64, spec: &QuadSpec) -> Result<f64> {
    ensure_usage!(q > 0.0 && q.is_finite(), "q must be positive, got {q}");
    if f.is_zero() {
        return Ok(0.0);
    }
    mu.integrate_ln(|z| q * f.ln_abs(z), f.envelope(q), None, spec)
}

/// `omega_{np} = omega / (1+|z|)^{np}`.
fn distorted(w: &Weight, n: i32, p: f64) -> Result<Weight> {
    if n == 0 {
        Ok(w.clone())
    } else {
        derive_weight(w, Derive::Distort(n as f64 * p))
    }
}

fn check_exponents(p: f64, q: f64, alpha: f64) -> Result<()> {
    ensure_usage!(p > 0.0 && p.is_finite(), "p must be positive, got {p}");
    ensure_usage!(q > 0.0 && q.is_finite(), "q must be positive, got {q}");
    ensure_usage!(alpha > 0.0 && alpha.is_finite(), "alpha must be positive, got {alpha}");
    Ok(())
}

fn unit_disc_mass(w: &Weight, u: CPoint, spec: &QuadSpec) -> Result<f64> {
    weight_measure(w, &Region::disc(u, 1.0)?, spec)
}

/// `int_{D(u,1)} e^{q alpha |z|^2/2} dmu`.
fn carleson_numerator(mu: &PositiveMeasure, q: f64, alpha: f64, u: CPoint, spec: &QuadSpec) -> Result<f64> {
    mu.integrate_ln(
        |z| q * alpha / 2.0 * z.norm_sqr(),
        Envelope::gaussian(-q * alpha / 2.0),
        Some((u, 1.0)),
        spec,
    )
}

/// `G(eval_at)` when `p <= q`, `H(eval_at)` when `q < p`, both built on
/// `omega_{np}`.
#[allow(clippy::too_many_arguments)]
pub fn carleson_condition(
    mu: &PositiveMeasure,
    p: f64,
    q: f64,
    alpha: f64,
    w: &Weight,
    n: i32,
    eval_at: CPoint,
    spec: &QuadSpec,
) -> Result<f64> {
    check_exponents(p, q, alpha)?;
    let wn = distorted(w, n, p)?;
    condition_at(mu, p, q, alpha, &wn, eval_at, spec)
}

fn condition_at(mu: &PositiveMeasure, p: f64, q: f64, alpha: f64, wn: &Weight, u: CPoint, spec: &QuadSpec) -> Result<f64> {
    let num = carleson_numerator(mu, q, alpha, u, spec)?;
    if num == 0.0 {
        return Ok(0.0);
    }
    let den = unit_disc_mass(wn, u, spec)?;
    Ok(if p <= q { num / den.powf(q / p) } else { num / den })
}

/// Canonical grid of unit-disc centres of spacing [`GRID_SPACING`] in `|u| <= radius`.
pub fn condition_grid(radius: f64) -> Result<Vec<CPoint>> {
    lattice_points(GRID_SPACING, radius)
}

/// `(sup, argmax)` of `G` over [`condition_grid`].
#[allow(clippy::too_many_arguments)]
pub fn g_sup(
    mu: &PositiveMeasure,
    p: f64,
    q: f64,
    alpha: f64,
    w: &Weight,
    n: i32,
    grid_radius: f64,
    spec: &QuadSpec,
) -> Result<(f64, CPoint)> {
    check_exponents(p, q, alpha)?;
    ensure_usage!(p <= q, "G is the p <= q condition");
    let wn = distorted(w, n, p)?;
    let pts = condition_grid(grid_radius)?;
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&u| condition_at(mu, p, q, alpha, &wn, u, spec))
        .collect::<Result<_>>()?;
    Ok(first_max(&pts, &vals))
}

fn first_max(pts: &[CPoint], vals: &[f64]) -> (f64, CPoint) {
    let mut best = (f64::NEG_INFINITY, CPoint::new(0.0, 0.0));
    for (z, v) in pts.iter().zip(vals) {
        if *v > best.0 {
            best = (*v, *z);
        }
    }
    best
}

/// Bilinear interpolant of grid samples on `[-r, r]^2`.
struct GridField {
    r: f64,
    n: usize,
    vals: Vec<f64>,
}

impl GridField {
    fn sample<F>(r: f64, f: F) -> Result<GridField>
    where
        F: Fn(CPoint) -> Result<f64> + Sync,
    {
        let n = (2.0 * r / GRID_SPACING).round() as usize + 1;
        let pts: Vec<CPoint> = (0..n * n)
            .map(|i| CPoint::new(-r + (i % n) as f64 * GRID_SPACING, -r + (i / n) as f64 * GRID_SPACING))
            .collect();
        let vals = pts.par_iter().map(|&z| f(z)).collect::<Result<_>>()?;
        Ok(GridField { r, n, vals })
    }

    fn eval(&self, z: CPoint) -> f64 {
        let last = (self.n - 1) as f64;
        let x = ((z.re + self.r) / GRID_SPACING).clamp(0.0, last);
        let y = ((z.im + self.r) / GRID_SPACING).clamp(0.0, last);
        let (i, j) = ((x.floor() as usize).min(self.n - 2), (y.floor() as usize).min(self.n - 2));
        let (fx, fy) = (x - i as f64, y - j as f64);
        let v = |a: usize, b: usize| self.vals[b * self.n + a];
        (1.0 - fy) * ((1.0 - fx) * v(i, j) + fx * v(i + 1, j)) + fy * ((1.0 - fx) * v(i, j + 1) + fx * v(i + 1, j + 1))
    }
}

/// `(int_{Q} F^s w dA)^{1/s}` for the interpolant `F` of `f` on the grid,
/// over the grid-aligned square `Q = [-r, r]^2`.
fn interpolated_norm<F>(f: F, s: f64, w: &Weight, r: f64, spec: &QuadSpec) -> Result<f64>
where
    F: Fn(CPoint) -> Result<f64> + Sync,
{
    let r = (r / GRID_SPACING).ceil().max(1.0) * GRID_SPACING;
    let field = GridField::sample(r, f)?;
    let spec = (*spec).with_base_tile(GRID_SPACING);
    let v = integrate_region(
        |z: CPoint| field.eval(z).max(0.0).powf(s) * w.eval(z),
        &Region::square(CPoint::new(0.0, 0.0), 2.0 * r)?,
        w.singular_points(),
        &spec,
    )?
    .value;
    Ok(v.powf(1.0 / s))
}

/// `||H||_{L^{p/(p-q)}(C, omega_{np})}` for `q < p`.
///
/// Atomic measures whose unit discs are disjoint are integrated exactly
/// over those discs; otherwise `H` is sampled on the grid,
/// interpolated and integrated over `[-R, R]^2`.
#[allow(clippy::too_many_arguments)]
pub fn h_norm(
    mu: &PositiveMeasure,
    p: f64,
    q: f64,
    alpha: f64,
    w: &Weight,
    n: i32,
    grid_radius: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    check_exponents(p, q, alpha)?;
    ensure_usage!(q < p, "H is the q < p condition");
    let wn = distorted(w, n, p)?;
    let s = p / (p - q);
    if !mu.is_atomic() {
        return interpolated_norm(|u| condition_at(mu, p, q, alpha, &wn, u, spec), s, &wn, grid_radius, spec);
    }
    let atoms = mu.atom_list();
    let separated = atoms
        .iter()
        .enumerate()
        .all(|(i, a)| atoms[i + 1..].iter().all(|b| (a.0 - b.0).norm() >= 2.0));
    if !separated {
        return interpolated_norm(|u| condition_at(mu, p, q, alpha, &wn, u, spec), s, &wn, grid_radius, spec);
    }
    let mut total = 0.0;
    for &(a, m) in atoms {
        let num = m * (q * alpha / 2.0 * a.norm_sqr()).exp();
        let failure = std::sync::Mutex::new(None);
        let v = integrate_region(
            |u: CPoint| match unit_disc_mass(&wn, u, spec) {
                Ok(mass) => (num / mass).powf(s) * wn.eval(u),
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    0.0
                }
            },
            &Region::disc(a, 1.0)?,
            wn.singular_points(),
            spec,
        )?
        .value;
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        total += v;
    }
    Ok(total.powf(1.0 / s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CarlesonCase {
    #[serde(rename = "p<=q")]
    PLeQ,
    #[serde(rename = "q<p")]
    QLtP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    UnboundedEvidence,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "bounded",
            Verdict::UnboundedEvidence => "unbounded_evidence",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Both columns at one grid radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlesonRow {
    pub radius: f64,
    pub condition: f64,
    pub empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonReport {
    pub case: CarlesonCase,
    /// Condition value at the largest radius.
    pub condition_value: f64,
    /// Kernel-test norm at the largest radius.
    pub empirical_norm: f64,
    /// `max_{k < -n} ||z^k||^q_{L^q(mu)}`, 0 for `n >= 0`.
    pub c_mu_n: f64,
    /// `max_{k <= 16} ||z^k||_{L^q(mu)}` when `n < 0`.
    pub moment_sup: Option<f64>,
    pub verdict: Verdict,
    pub trace: Vec<CarlesonRow>,
    /// Both columns at the largest radius with the tolerance tightened 10x.
    pub refined_condition: f64,
    pub refined_empirical: f64,
}

/// Default grid radii of [`carleson_diagnose`].
pub const DIAGNOSE_RADII: [f64; 3] = [2.0, 4.0, 6.0];

/// Growth at or below this factor across the radii counts as bounded.
const FLAT_GROWTH: f64 = 1.25;
/// Growth at or above this factor in both columns is unbounded evidence.
const STEEP_GROWTH: f64 = 2.0;
/// Largest refinement drift accepted for a bounded verdict.
const MAX_DRIFT: f64 = 0.05;

/// Kernel-test ratio `||K_a||^q_{L^q(mu)} / ||K_a||^q_{F^p_{alpha, w}}`.
fn kernel_ratio(mu: &PositiveMeasure, p: f64, q: f64, alpha: f64, wn: &Weight, a: CPoint, spec: &QuadSpec) -> Result<f64> {
    let ka = EntireFn::kernel(alpha, a);
    let num = measure_norm_pow(&ka, mu, q, spec)?;
    let (v, shift) = lp_integral_scaled(&ka, p, alpha, wn, spec)?;
    // ||K_a||^q_F = (v e^shift)^{q/p}
    Ok(num * (-shift * q / p).exp() / v.powf(q / p))
}

#[allow(clippy::too_many_arguments)]
fn columns(
    mu: &PositiveMeasure,
    p: f64,
    q: f64,
    alpha: f64,
    wn: &Weight,
    radii: &[f64],
    spec: &QuadSpec,
) -> Result<Vec<CarlesonRow>> {
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let kernels = lattice_points(1.0, rmax)?;
    let ratios: Vec<f64> = kernels
        .par_iter()
        .map(|&a| kernel_ratio(mu, p, q, alpha, wn, a, spec))
        .collect::<Result<_>>()?;
    let restricted_sup = |pts: &[CPoint], vals: &[f64], r: f64| {
        pts.iter()
            .zip(vals)
            .filter(|(z, _)| z.norm() <= r * (1.0 + 1e-12))
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    };
    let mut rows = Vec::new();
    if p <= q {
        let pts = condition_grid(rmax)?;
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|&u| condition_at(mu, p, q, alpha, wn, u, spec))
            .collect::<Result<_>>()?;
        for &r in radii {
            rows.push(CarlesonRow {
                radius: r,
                condition: restricted_sup(&pts, &vals, r),
                empirical: restricted_sup(&kernels, &ratios, r),
            });
        }
    } else {
        for &r in radii {
            let condition = h_norm(mu, p, q, alpha, wn, 0, r, spec)?;
            rows.push(CarlesonRow {
                radius: r,
                condition,
                empirical: restricted_sup(&kernels, &ratios, r),
            });
        }
    }
    Ok(rows)
}

/// Condition value, kernel-test norm, Taylor constants and a three-valued
/// verdict over the grid radii [`DIAGNOSE_RADII`].
#[allow(clippy::too_many_arguments)]
pub fn carleson_diagnose(
    mu: &PositiveMeasure,
    p: f64,
    q: f64,
    alpha: f64,
    w: &Weight,
    n: i32,
    spec: &QuadSpec,
) -> Result<CarlesonReport> {
    carleson_diagnose_with(mu, p, q, alpha, w, n, &DIAGNOSE_RADII, spec)
}

#[allow(clippy::too_many_arguments)]
pub fn carleson_diagnose_with(
    mu: &PositiveMeasure,
    p: f64,
    q: f64,
    alpha: f64,
    w: &Weight,
    n: i32,
    radii: &[f64],
    spec: &QuadSpec,
) -> Result<CarlesonReport> {
    check_exponents(p, q, alpha)?;
    ensure_usage!(radii.len() >= 2, "need at least two grid radii");
    ensure_usage!(
        radii.windows(2).all(|w| w[0] < w[1]) && radii[0] > 0.0,
        "grid radii must be positive and increasing"
    );
    let wn = distorted(w, n, p)?;
    let trace = columns(mu, p, q, alpha, &wn, radii, spec)?;
    let last = *trace.last().unwrap();
    let rmax = [last.radius];
    let fine = (*spec).with_rel_tol(spec.rel_tol / 10.0);
    let refined = columns(mu, p, q, alpha, &wn, &rmax, &fine)?[0];
    let (c_mu_n, moment_sup) = if n < 0 {
        let moments: Vec<f64> = (0..=16)
            .map(|k| measure_norm(&EntireFn::monomial(k), mu, q, spec))
            .collect::<Result<_>>()?;
        let c = moments[..(-n) as usize].iter().map(|m| m.powf(q)).fold(0.0, f64::max);
        (c, Some(moments.iter().copied().fold(0.0, f64::max)))
    } else {
        (0.0, None)
    };
    let first = trace[0];
    let growth = |a: f64, b: f64| if a > 0.0 { b / a } else if b > 0.0 { f64::INFINITY } else { 1.0 };
    let gc = growth(first.condition, last.condition);
    let ge = growth(first.empirical, last.empirical);
    let drift = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() };
    let stable = drift(last.condition, refined.condition) < MAX_DRIFT && drift(last.empirical, refined.empirical) < MAX_DRIFT;
    let monotone = trace
        .windows(2)
        .all(|w| w[1].condition >= w[0].condition && w[1].empirical >= w[0].empirical);
    let finite = trace.iter().all(|r| r.condition.is_finite() && r.empirical.is_finite());
    let verdict = if finite && gc <= FLAT_GROWTH && ge <= FLAT_GROWTH && stable {
        Verdict::Bounded
    } else if gc >= STEEP_GROWTH && ge >= STEEP_GROWTH && monotone {
        Verdict::UnboundedEvidence
    } else {
        Verdict::Inconclusive
    };
    Ok(CarlesonReport {
        case: if p <= q { CarlesonCase::PLeQ } else { CarlesonCase::QLtP },
        condition_value: last.condition,
        empirical_norm: last.empirical,
        c_mu_n,
        moment_sup,
        verdict,
        trace,
        refined_condition: refined.condition,
        refined_empirical: refined.empirical,
    })
}

/// `G(u) = (1/w(D(u,1))) int_{D(u,1)} |g|^q e^{-q(beta-alpha)|z|^2/2} eta dA`
/// at `u = eval_at`.
#[allow(clippy::too_many_arguments)]
pub fn multiplier_condition(
    g: &EntireFn,
    p: f64,
    q: f64,
    alpha: f64,
    beta: f64,
    w: &Weight,
    eta: &Weight,
    eval_at: CPoint,
    spec: &QuadSpec,
) -> Result<f64> {
    check_exponents(p, q, alpha)?;
    ensure_usage!(beta > 0.0 && beta.is_finite(), "beta must be positive, got {beta}");
    multiplier_g(g, q, alpha, beta, w, eta, eval_at, spec)
}

#[allow(clippy::too_many_arguments)]
fn multiplier_g(g: &EntireFn, q: f64, alpha: f64, beta: f64, w: &Weight, eta: &Weight, u: CPoint, spec: &QuadSpec) -> Result<f64> {
    if g.is_zero() {
        return Ok(0.0);
    }
    let ln_f = |z: CPoint| {
        let lg = g.ln_abs(z);
        if lg == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            q * lg - q * (beta - alpha) / 2.0 * z.norm_sqr() + eta.ln_eval(z)
        }
    };
    let shift = {
        let s = ln_f(u);
        if s.is_finite() {
            s
        } else {
            0.0
        }
    };
    let mut sing = eta.singular_points().to_vec();
    if g.eval(CPoint::new(0.0, 0.0)) == Complex64::new(0.0, 0.0) {
        sing.push(CPoint::new(0.0, 0.0));
    }
    let disc = Region::disc(u, 1.0)?;
    let num = integrate_region(
        |z: CPoint| {
            let e = ln_f(z) - shift;
            if e == f64::NEG_INFINITY {
                0.0
            } else {
                e.exp()
            }
        },
        &disc,
        &sing,
        spec,
    )?
    .value;
    Ok(num * shift.exp() / weight_measure(w, &disc, spec)?)
}

/// For `p <= q`, the sup over the grid of `G(u) / w(D(u,1))^{(q-p)/p}`;
/// for `q < p`, `||G||_{L^{p/(p-q)}(C, w)}` from the grid interpolant.
#[allow(clippy::too_many_arguments)]
pub fn multiplier_reducer(
    g: &EntireFn,
    p: f64,
    q: f64,
    alpha: f64,
    beta: f64,
    w: &Weight,
    eta: &Weight,
    grid_radius: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    check_exponents(p, q, alpha)?;
    ensure_usage!(beta > 0.0 && beta.is_finite(), "beta must be positive, got {beta}");
    if p <= q {
        let pts = condition_grid(grid_radius)?;
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|&u| {
                let gu = multiplier_g(g, q, alpha, beta, w, eta, u, spec)?;
                if q == p {
                    Ok(gu)
                } else {
                    Ok(gu / unit_disc_mass(w, u, spec)?.powf((q - p) / p))
                }
            })
            .collect::<Result<_>>()?;
        Ok(first_max(&pts, &vals).0)
    } else {
        interpolated_norm(
            |u| multiplier_g(g, q, alpha, beta, w, eta, u, spec),
            p / (p - q),
            w,
            grid_radius,
            spec,
        )
    }
}

/// `sup_a ||g K_a||_{F^q_{beta, eta}} / ||K_a||_{F^p_{alpha, w}}` over the
/// kernels `K_a = e^{alpha conj(a) z}` with `a` on the unit lattice in
/// `|a| <= kernel_radius`.
#[allow(clippy::too_many_arguments)]
pub fn multiplier_empirical_norm(
    g: &EntireFn,
    p: f64,
    q: f64,
    alpha: f64,
    beta: f64,
    w: &Weight,
    eta: &Weight,
    kernel_radius: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    check_exponents(p, q, alpha)?;
    ensure_usage!(beta > 0.0 && beta.is_finite(), "beta must be positive, got {beta}");
    let pts = lattice_points(1.0, kernel_radius)?;
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&a| {
            let ka = EntireFn::kernel(alpha, a);
            let (vn, sn) = lp_integral_scaled(&g.mul(&ka), q, beta, eta, spec)?;
            let (vd, sd) = lp_integral_scaled(&ka, p, alpha, w, spec)?;
            Ok(vn.powf(1.0 / q) / vd.powf(1.0 / p) * (sn / q - sd / p).exp())
        })
        .collect::<Result<_>>()?;
    Ok(first_max(&pts, &vals).0)
}

/// `||g K_{a, alpha-delta}||_{F^q_{beta, w}} / ||K_{a, alpha-delta}||_{F^p_{alpha, w}}`
/// with `delta = (alpha - beta)/4`, for `beta < alpha`.
#[allow(clippy::too_many_arguments)]
pub fn falsifier_ratio(
    g: &EntireFn,
    p: f64,
    q: f64,
    alpha: f64,
    beta: f64,
    w: &Weight,
    a: CPoint,
    spec: &QuadSpec,
) -> Result<f64> {
    check_exponents(p, q, alpha)?;
    ensure_usage!(beta > 0.0 && beta < alpha, "the falsifier needs 0 < beta < alpha");
    let delta = (alpha - beta) / 4.0;
    let f = EntireFn::kernel(alpha - delta, a);
    let (vn, sn) = lp_integral_scaled(&g.mul(&f), q, beta, w, spec)?;
    let (vd, sd) = lp_integral_scaled(&f, p, alpha, w, spec)?;
    Ok(vn.powf(1.0 / q) / vd.powf(1.0 / p) * (sn / q - sd / p).exp())
}

/// Description of the multiplier space between two weighted Fock spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultVerdict {
    ZeroOnly,
    ConstantsOnly,
    /// `|g(u)| e^{(alpha-beta)|u|^2/2} <~ w(D(u,1))^exponent`.
    GrowthCondition { exponent: f64 },
    /// `F^infty_c`.
    FInfty { c: f64 },
    /// `int |g|^exponent e^{-exponent gauss |z|^2/2} w dA < infinity`.
    IntegrabilityCondition { exponent: f64, gauss: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultClass {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub verdict: MultVerdict,
    pub condition: String,
}

/// Classifies `Mult(F^p_{alpha,w}, F^q_{beta,w})`.
pub fn mult_classify(p: f64, q: f64, alpha: f64, beta: f64) -> Result<MultClass> {
    check_exponents(p, q, alpha)?;
    ensure_usage!(beta > 0.0 && beta.is_finite(), "beta must be positive, got {beta}");
    let (verdict, condition) = if beta < alpha {
        (MultVerdict::ZeroOnly, "g = 0".to_string())
    } else if p == q && alpha == beta {
        (MultVerdict::ConstantsOnly, "g is constant".to_string())
    } else if p == q {
        let c = beta - alpha;
        (MultVerdict::FInfty { c }, format!("sup |g(u)| e^(-{c}|u|^2/2) < inf"))
    } else if q > p {
        let e = (q - p) / (p * q);
        (
            MultVerdict::GrowthCondition { exponent: e },
            format!("|g(u)| e^({}|u|^2/2) <~ w(D(u,1))^{e}", alpha - beta),
        )
    } else {
        let s = p * q / (p - q);
        let c = beta - alpha;
        (
            MultVerdict::IntegrabilityCondition { exponent: s, gauss: c },
            format!("int |g|^{s} e^(-{s}*{c}|z|^2/2) w dA < inf"),
        )
    };
    Ok(MultClass {
        p,
        q,
        alpha,
        beta,
        verdict,
        condition,
    })
}

impl MultClass {
    /// Evaluates the class condition for `g` on the grid of radius
    /// `grid_radius` (integrability: over the disc of that radius). Zero or
    /// a value that stays put as the radius grows indicates membership.
    pub fn check(&self, g: &EntireFn, w: &Weight, grid_radius: f64, spec: &QuadSpec) -> Result<f64> {
        let pts = condition_grid(grid_radius)?;
        let g0 = g.eval(CPoint::new(0.0, 0.0));
        let sup = |f: &(dyn Fn(CPoint) -> Result<f64> + Sync)| -> Result<f64> {
            let vals: Vec<f64> = pts.par_iter().map(|&u| f(u)).collect::<Result<_>>()?;
            Ok(first_max(&pts, &vals).0)
        };
        match self.verdict {
            MultVerdict::ZeroOnly => sup(&|u| Ok(g.eval(u).norm())),
            MultVerdict::ConstantsOnly => sup(&|u| Ok((g.eval(u) - g0).norm())),
            MultVerdict::FInfty { c } => sup(&|u| Ok((g.ln_abs(u) - c * u.norm_sqr() / 2.0).exp())),
            MultVerdict::GrowthCondition { exponent } => sup(&|u| {
                let m = unit_disc_mass(w, u, spec)?;
                Ok((g.ln_abs(u) + (self.alpha - self.beta) * u.norm_sqr() / 2.0).exp() / m.powf(exponent))
            }),
            MultVerdict::IntegrabilityCondition { exponent, gauss } => {
                if g.is_zero() {
                    return Ok(0.0);
                }
                let mut sing = w.singular_points().to_vec();
                if g0 == Complex64::new(0.0, 0.0) {
                    sing.push(CPoint::new(0.0, 0.0));
                }
                Ok(integrate_region(
                    |z: CPoint| {
                        let e = exponent * g.ln_abs(z) - exponent * gauss * z.norm_sqr() / 2.0 + w.ln_eval(z);
                        if e == f64::NEG_INFINITY {
                            0.0
                        } else {
                            e.exp()
                        }
                    },
                    &Region::disc(CPoint::new(0.0, 0.0), grid_radius)?,
                    &sing,
                    spec,
                )?
                .value)
            }
        }
    }
}
