//! Weight-class diagnostics: restricted A_p constants, Berezin transforms,
//! the Kerman-Torchinsky property and lattice comparability.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_usage, usage, Result};
use crate::quadcore::{
    compensated_sum, integrate_plane, CPoint, Envelope, IntegrandMeta, QuadSpec, Region,
};
use crate::weights::{derive_weight, weight_measure, Derive, Weight};

/// Outcome of a restricted A_p search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApReport {
    pub p: f64,
    pub r: f64,
    /// `f64::INFINITY` when the dual weight is not locally integrable.
    pub constant_estimate: f64,
    pub infinite: bool,
    pub argmax_square: Region,
    pub search_radius: f64,
    /// `(grid spacing, running supremum)` per search pass.
    pub refinement_trace: Vec<(f64, f64)>,
    pub squares_evaluated: usize,
}

/// Average of `w` over `region`, or `None` when the integral diverges.
fn average(w: &Weight, region: &Region, spec: &QuadSpec) -> Result<Option<f64>> {
    match weight_measure(w, region, spec) {
        Ok(m) => Ok(Some(m / region.area())),
        Err(e) if e.is_divergence() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Minimum of `w` over the centres of a 64x64 grid of sub-squares.
pub fn sampled_min(w: &Weight, region: &Region) -> f64 {
    let (c, side) = match *region {
        Region::Square { center, side } => (center, side),
        Region::Disc { center, radius } => (center, 2.0 * radius),
    };
    let h = side / 64.0;
    let mut m = f64::INFINITY;
    for j in 0..64 {
        for i in 0..64 {
            let z = c + CPoint::new(
                -0.5 * side + (i as f64 + 0.5) * h,
                -0.5 * side + (j as f64 + 0.5) * h,
            );
            if region.contains(z) {
                m = m.min(w.eval(z));
            }
        }
    }
    m
}

/// The A_p quotient of `w` on one region: `avg(w) * avg(w')^{p-1}`, or
/// `avg(w) / min(w)` for `p = 1`. Infinite when the dual weight diverges.
pub fn ap_quotient(w: &Weight, p: f64, region: &Region, spec: &QuadSpec) -> Result<f64> {
    ensure_usage!(p >= 1.0 && p.is_finite(), "p must be at least 1, got {p}");
    let Some(avg) = average(w, region, spec)? else {
        return Ok(f64::INFINITY);
    };
    if p == 1.0 {
        let m = sampled_min(w, region);
        return Ok(if m > 0.0 { avg / m } else { f64::INFINITY });
    }
    let dual = derive_weight(w, Derive::Dual(p))?;
    match average(&dual, region, spec)? {
        Some(d) => Ok(avg * d.powf(p - 1.0)),
        None => Ok(f64::INFINITY),
    }
}

/// Full Muckenhoupt quotient on the disc `D(center, radius)`.
pub fn disc_quotient(
    w: &Weight,
    p: f64,
    center: CPoint,
    radius: f64,
    spec: &QuadSpec,
) -> Result<f64> {
    ap_quotient(w, p, &Region::disc(center, radius)?, spec)
}

fn grid_centers(window: CPoint, spacing: f64, radius: f64) -> Vec<CPoint> {
    let k = (radius / spacing).floor() as i64;
    let mut out = Vec::new();
    for j in -k..=k {
        for i in -k..=k {
            let d = CPoint::new(i as f64 * spacing, j as f64 * spacing);
            if d.norm() <= radius * (1.0 + 1e-12) {
                out.push(window + d);
            }
        }
    }
    out
}

/// First maximum in canonical order.
fn argmax(points: &[CPoint], vals: &[f64]) -> (CPoint, f64) {
    let mut k = 0;
    for (i, v) in vals.iter().enumerate() {
        if *v > vals[k] {
            k = i;
        }
    }
    (points[k], vals[k])
}

/// Supremum of the A_p quotient over squares of side `r` centred in
/// `|z0| <= search_radius`.
pub fn ap_constant(
    w: &Weight,
    p: f64,
    r: f64,
    search_radius: f64,
    spec: &QuadSpec,
) -> Result<ApReport> {
    ap_constant_in(w, p, r, CPoint::new(0.0, 0.0), search_radius, spec)
}

/// [`ap_constant`] with the search window centred at `window`.
pub fn ap_constant_in(
    w: &Weight,
    p: f64,
    r: f64,
    window: CPoint,
    search_radius: f64,
    spec: &QuadSpec,
) -> Result<ApReport> {
    ensure_usage!(p >= 1.0 && p.is_finite(), "p must be at least 1, got {p}");
    ensure_usage!(r > 0.0 && r.is_finite(), "square side must be positive, got {r}");
    ensure_usage!(
        search_radius >= r && search_radius.is_finite(),
        "search radius {search_radius} must be at least r = {r}"
    );
    spec.validate()?;
    let eval = |cs: &[CPoint]| -> Result<Vec<f64>> {
        cs.par_iter()
            .map(|&c| ap_quotient(w, p, &Region::Square { center: c, side: r }, spec))
            .collect()
    };
    let coarse = grid_centers(window, r / 4.0, search_radius);
    let vals = eval(&coarse)?;
    let (mut best_c, mut best) = argmax(&coarse, &vals);
    let mut trace = vec![(r / 4.0, best)];
    let mut count = coarse.len();

    if best.is_finite() {
        let h = r / 8.0;
        let fine: Vec<CPoint> = (-1..=1)
            .flat_map(|j| (-1..=1).map(move |i| (i, j)))
            .filter(|&(i, j)| i != 0 || j != 0)
            .map(|(i, j)| best_c + CPoint::new(i as f64 * h, j as f64 * h))
            .filter(|c| (c - window).norm() <= search_radius * (1.0 + 1e-12))
            .collect();
        if !fine.is_empty() {
            let fv = eval(&fine)?;
            count += fine.len();
            let (fc, fb) = argmax(&fine, &fv);
            if fb > best {
                best = fb;
                best_c = fc;
            }
        }
        trace.push((h, best));
    }
    Ok(ApReport {
        p,
        r,
        constant_estimate: best,
        infinite: best.is_infinite(),
        argmax_square: Region::Square {
            center: best_c,
            side: r,
        },
        search_radius,
        refinement_trace: trace,
        squares_evaluated: count,
    })
}

/// `(alpha/pi) int exp(-alpha|z-u|^2) w(u) dA(u)`.
pub fn berezin(w: &Weight, alpha: f64, z: CPoint, spec: &QuadSpec) -> Result<f64> {
    ensure_usage!(
        alpha > 0.0 && alpha.is_finite(),
        "alpha must be positive, got {alpha}"
    );
    let env = Envelope::gaussian_at(alpha, z).times(w.envelope());
    ensure_usage!(
        env.gauss > 0.0,
        "weight {} grows too fast for the Berezin transform at alpha = {alpha}",
        w.label()
    );
    let meta = IntegrandMeta::new(env, w.singular_points().to_vec());
    let v = if w.envelope().gauss != 0.0 {
        integrate_plane(
            |u: CPoint| (w.ln_eval(u) - alpha * (u - z).norm_sqr()).exp(),
            &meta,
            spec,
        )?
    } else {
        integrate_plane(
            |u: CPoint| w.eval(u) * (-alpha * (u - z).norm_sqr()).exp(),
            &meta,
            spec,
        )?
    };
    Ok(alpha / PI * v.value)
}

/// Berezin-side supremum with its growth evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupReport {
    pub value: f64,
    pub argmax: CPoint,
    /// `(grid radius, supremum over that radius)`; a final entry with
    /// radius `-1` holds the supremum after local refinement at spacing 1/16.
    pub trace: Vec<(f64, f64)>,
    pub points_evaluated: usize,
}

/// `sup_z B_alpha w(z) (B_gamma w'(z))^{p-1}` for `p > 1`, or
/// `sup_z B_alpha w(z) / w(z)` for `p = 1`, over the grid of spacing 1/4 in
/// `|z| <= grid_radius`.
pub fn berezin_sup_condition(
    w: &Weight,
    p: f64,
    alpha: f64,
    gamma: f64,
    grid_radius: f64,
    spec: &QuadSpec,
) -> Result<SupReport> {
    ensure_usage!(p >= 1.0 && p.is_finite(), "p must be at least 1, got {p}");
    ensure_usage!(
        gamma > 0.0 && gamma.is_finite(),
        "gamma must be positive, got {gamma}"
    );
    ensure_usage!(
        grid_radius > 0.0 && grid_radius.is_finite(),
        "grid radius must be positive, got {grid_radius}"
    );
    let dual = if p > 1.0 {
        Some(derive_weight(w, Derive::Dual(p))?)
    } else {
        None
    };
    let quantity = |z: CPoint| -> Result<f64> {
        let b = berezin(w, alpha, z, spec)?;
        match &dual {
            Some(d) => Ok(b * berezin(d, gamma, z, spec)?.powf(p - 1.0)),
            None => Ok(b / w.eval(z)),
        }
    };
    let pts = grid_centers(CPoint::new(0.0, 0.0), 0.25, grid_radius);
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&z| quantity(z))
        .collect::<Result<_>>()?;
    let mut trace = Vec::new();
    for radius in [grid_radius / 4.0, grid_radius / 2.0, grid_radius] {
        let s = pts
            .iter()
            .zip(&vals)
            .filter(|(z, _)| z.norm() <= radius * (1.0 + 1e-12))
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        trace.push((radius, s));
    }
    let (mut best_z, mut best) = argmax(&pts, &vals);
    let mut count = pts.len();
    if best.is_finite() {
        let local: Vec<CPoint> = (-3..=3)
            .flat_map(|j| (-3..=3).map(move |i| (i, j)))
            .filter(|&(i, j)| i % 4 != 0 || j % 4 != 0)
            .map(|(i, j)| best_z + CPoint::new(i as f64, j as f64) / 16.0)
            .filter(|z| z.norm() <= grid_radius * (1.0 + 1e-12))
            .collect();
        let lv: Vec<f64> = local
            .par_iter()
            .map(|&z| quantity(z))
            .collect::<Result<_>>()?;
        count += local.len();
        if !local.is_empty() {
            let (lz, lb) = argmax(&local, &lv);
            if lb > best {
                best = lb;
                best_z = lz;
            }
        }
    }
    trace.push((-1.0, best));
    Ok(SupReport {
        value: best,
        argmax: best_z,
        trace,
        points_evaluated: count,
    })
}

/// Largest growth of the KT ratio along a nested chain of sets that still
/// counts as feasible.
pub const KT_MAX_GROWTH: f64 = 1.1;

/// Result of a Kerman-Torchinsky search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KTReport {
    pub r: f64,
    /// Largest feasible exponent on the grid `k/20`, if any.
    pub delta: Option<f64>,
    /// Smallest constant that works for every tested pair at `delta`.
    pub c_r: Option<f64>,
    pub witness_set: String,
    /// `(delta, worst ratio over all pairs, largest growth factor)`.
    pub scan: Vec<(f64, f64, f64)>,
    pub pairs_tested: usize,
}

/// One tested pair `(E, Q)`. `template` names the shape of `E` relative to
/// `Q`, so equal templates in different squares are congruent sets; `chain`
/// places `E` in a nested sequence of shrinking sets inside one square.
#[derive(Debug, Clone)]
struct KtPair {
    area_ratio: f64,
    mass_ratio: f64,
    square: usize,
    template: String,
    chains: Vec<(String, usize)>,
}

impl KtPair {
    fn rho(&self, delta: f64) -> f64 {
        self.area_ratio / self.mass_ratio.powf(delta)
    }
}

fn subsets_of(
    w: &Weight,
    qi: usize,
    center: CPoint,
    r: f64,
    unions: &[Vec<usize>],
    spec: &QuadSpec,
) -> Result<Vec<KtPair>> {
    let h = r / 8.0;
    let corner = center - CPoint::new(0.5 * r, 0.5 * r);
    let cells: Vec<Region> = (0..64)
        .map(|k| Region::Square {
            center: corner
                + CPoint::new(((k % 8) as f64 + 0.5) * h, ((k / 8) as f64 + 0.5) * h),
            side: h,
        })
        .collect();
    let cell_mass: Vec<f64> = cells
        .par_iter()
        .map(|c| weight_measure(w, c, spec))
        .collect::<Result<_>>()?;
    let total = compensated_sum(cell_mass.iter().copied());
    let pair = |area: f64, mass: f64, template: String, chains: Vec<(String, usize)>| KtPair {
        area_ratio: area / (r * r),
        mass_ratio: mass / total,
        square: qi,
        template,
        chains,
    };
    let mut out = vec![pair(r * r, total, "E = Q".into(), vec![])];
    for n in 1..=3usize {
        let m = 1usize << n;
        let step = 8 / m;
        let side = r / m as f64;
        for j in 0..m {
            for i in 0..m {
                let mass = compensated_sum((0..step * step).map(|t| {
                    cell_mass[(j * step + t / step) * 8 + i * step + t % step]
                }));
                // Every level-3 cell below this one starts a chain through it.
                let chains = (0..step * step)
                    .map(|t| {
                        let leaf = (j * step + t / step) * 8 + i * step + t % step;
                        (format!("dyadic chain to cell {leaf}"), n - 1)
                    })
                    .collect();
                out.push(pair(
                    side * side,
                    mass,
                    format!("dyadic level-{n} cell ({i},{j})"),
                    chains,
                ));
            }
        }
    }
    let square = Region::Square { center, side: r };
    let mut centers: Vec<(CPoint, String)> = (0..25)
        .map(|k| {
            let (i, j) = ((k % 5) as f64 - 2.0, (k / 5) as f64 - 2.0);
            (
                center + CPoint::new(i * 0.2 * r, j * 0.2 * r),
                format!("offset ({i},{j})"),
            )
        })
        .collect();
    for (k, s) in w.singular_points().iter().enumerate() {
        if square.contains(*s) {
            centers.push((*s, format!("singular point #{k}")));
        }
    }
    let mut discs = Vec::new();
    for (c, name) in &centers {
        let mut pos = 0;
        for j in 1..=6 {
            let rad = r * 0.5f64.powi(j);
            let d = *c - center;
            if d.re.abs() + rad <= 0.5 * r && d.im.abs() + rad <= 0.5 * r {
                discs.push((
                    Region::Disc {
                        center: *c,
                        radius: rad,
                    },
                    format!("disc at {name}, radius r/2^{j}"),
                    (format!("disc chain at {name}"), pos),
                ));
                pos += 1;
            }
        }
    }
    let disc_mass: Vec<f64> = discs
        .par_iter()
        .map(|(d, _, _)| weight_measure(w, d, spec))
        .collect::<Result<_>>()?;
    for ((d, t, chain), m) in discs.into_iter().zip(disc_mass) {
        out.push(pair(d.area(), m, t, vec![chain]));
    }
    for (u, set) in unions.iter().enumerate() {
        let mass = compensated_sum(set.iter().map(|&c| cell_mass[c]));
        out.push(pair(
            set.len() as f64 * h * h,
            mass,
            format!("union #{u} of {} level-3 cells", set.len()),
            vec![],
        ));
    }
    Ok(out)
}

/// Largest growth factor of the KT ratio at `delta`, with the pair where it
/// is attained.
///
/// Each nested chain of shrinking sets inside a square is compared against
/// its coarse first half. Different squares are never compared with each
/// other: the ratio may differ between squares by a bounded factor.
fn growth(pairs: &[KtPair], delta: f64) -> (f64, usize) {
    use std::collections::BTreeMap;
    let mut by_chain: BTreeMap<(usize, &str), Vec<(usize, f64, usize)>> = BTreeMap::new();
    for (k, p) in pairs.iter().enumerate() {
        let rho = p.rho(delta);
        for (name, pos) in &p.chains {
            by_chain
                .entry((p.square, name))
                .or_default()
                .push((*pos, rho, k));
        }
    }
    let mut worst = (1.0, 0);
    for mut chain in by_chain.into_values() {
        chain.sort_by_key(|c| c.0);
        let coarse = chain.len().div_ceil(2);
        let reference = chain[..coarse].iter().map(|c| c.1).fold(0.0, f64::max);
        let (_, all, k) = chain
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("chains are nonempty");
        if all / reference > worst.0 {
            worst = (all / reference, k);
        }
    }
    worst
}

/// Searches `delta` over `k/20` for the KT inequality on the given squares.
///
/// No finite family can certify a supremum over all measurable sets, so a
/// `delta` counts as feasible when the ratio `(|E|/|Q|) / (w(E)/w(Q))^delta`
/// stops growing: it may not exceed its reference value by more than 10%
/// along any direction tested (see `growth`). The seed fixes the random
/// unions of level-3 cells, which are the same in every square.
pub fn kt_check(
    w: &Weight,
    r: f64,
    squares: &[Region],
    seed: u64,
    spec: &QuadSpec,
) -> Result<KTReport> {
    ensure_usage!(!squares.is_empty(), "kt_check needs at least one square");
    ensure_usage!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..64).collect();
    let unions: Vec<Vec<usize>> = (0..32)
        .map(|_| {
            let k = rng.gen_range(1..64);
            idx.shuffle(&mut rng);
            let mut set = idx[..k].to_vec();
            set.sort_unstable();
            set
        })
        .collect();
    let mut pairs = Vec::new();
    for (qi, q) in squares.iter().enumerate() {
        let Region::Square { center, side } = *q else {
            return Err(usage("kt_check takes squares only"));
        };
        ensure_usage!(
            (side - r).abs() <= 1e-12 * r,
            "square {q} does not have side r = {r}"
        );
        pairs.extend(subsets_of(w, qi, center, r, &unions, spec)?);
    }
    let mut scan = Vec::new();
    let mut best = None;
    let mut first_failure = None;
    for k in 1..20 {
        let d = k as f64 / 20.0;
        let sup = pairs.iter().map(|p| p.rho(d)).fold(0.0, f64::max);
        let (g, at) = growth(&pairs, d);
        scan.push((d, sup, g));
        if sup.is_finite() && g <= KT_MAX_GROWTH {
            best = Some(d);
        } else if first_failure.is_none() {
            first_failure = Some(at);
        }
    }
    let describe = |p: &KtPair| format!("{} in {}", p.template, squares[p.square]);
    let (c_r, witness) = match best {
        Some(d) => {
            let worst = pairs
                .iter()
                .max_by(|a, b| a.rho(d).total_cmp(&b.rho(d)))
                .expect("pairs are nonempty");
            (Some(worst.rho(d)), describe(worst))
        }
        None => (None, describe(&pairs[first_failure.unwrap_or(0)])),
    };
    Ok(KTReport {
        r,
        delta: best,
        c_r,
        witness_set: witness,
        scan,
        pairs_tested: pairs.len(),
    })
}

/// `w(Q_r(nu)) / w(Q_r(nu'))` and the per-unit-distance factor
/// `ratio^{1/|nu - nu'|}` (1 when the points coincide).
pub fn lattice_comparability(
    w: &Weight,
    r: f64,
    nu: CPoint,
    nu_prime: CPoint,
    spec: &QuadSpec,
) -> Result<(f64, f64)> {
    ensure_usage!(r > 0.0 && r.is_finite(), "r must be positive, got {r}");
    for z in [nu, nu_prime] {
        let k = z / r;
        ensure_usage!(
            (k.re - k.re.round()).abs() < 1e-9 && (k.im - k.im.round()).abs() < 1e-9,
            "{z} is not a point of the lattice r Z^2 with r = {r}"
        );
    }
    let a = weight_measure(w, &Region::square(nu, r)?, spec)?;
    let b = weight_measure(w, &Region::square(nu_prime, r)?, spec)?;
    let ratio = a / b;
    let dist = (nu - nu_prime).norm();
    let m = if dist == 0.0 {
        1.0
    } else {
        ratio.powf(1.0 / dist)
    };
    Ok((ratio, m))
}

/// Disc doubling ratio `w(D(a, N t)) / w(D(a, t))`.
pub fn disc_doubling(w: &Weight, a: CPoint, t: f64, n: f64, spec: &QuadSpec) -> Result<f64> {
    ensure_usage!(
        n >= 1.0 && n.is_finite(),
        "doubling factor must be at least 1, got {n}"
    );
    let big = weight_measure(w, &Region::disc(a, n * t)?, spec)?;
    let small = weight_measure(w, &Region::disc(a, t)?, spec)?;
    Ok(big / small)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::parse_weight;

    fn w(s: &str) -> Weight {
        parse_weight(s).unwrap()
    }

    fn c(re: f64, im: f64) -> CPoint {
        CPoint::new(re, im)
    }

    #[test]
    fn constant_weight_quotients_are_one() {
        let spec = QuadSpec::default();
        for p in [1.0, 2.0, 3.0] {
            let rep = ap_constant(&Weight::one(), p, 1.0, 1.0, &spec).unwrap();
            assert!((rep.constant_estimate - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exp_re_quotient_is_translation_free() {
        let spec = QuadSpec::default();
        let oracle = (2.0 * 0.5f64.sinh()).powi(2);
        for z in [c(0.0, 0.0), c(3.0, -1.0)] {
            let sq = Region::square(z, 1.0).unwrap();
            let q = ap_quotient(&w("exp_re:gamma=1"), 2.0, &sq, &spec).unwrap();
            assert!((q - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn non_integrable_dual_gives_infinite_flag() {
        // |z|^2 at p = 2 has dual |z|^{-2}.
        let spec = QuadSpec::default();
        let rep = ap_constant(&w("power_pure:delta=2"), 2.0, 1.0, 1.0, &spec).unwrap();
        assert!(rep.infinite);
        assert!(rep.constant_estimate.is_infinite());
    }

    #[test]
    fn trace_is_nondecreasing() {
        let spec = QuadSpec::default();
        let rep = ap_constant(&w("power:gamma=2"), 2.0, 1.0, 2.0, &spec).unwrap();
        let t = &rep.refinement_trace;
        assert_eq!(t.len(), 2);
        assert!(t[1].1 >= t[0].1);
        assert!(rep.constant_estimate >= 1.0 - 1e-9);
    }

    #[test]
    fn berezin_examples() {
        let spec = QuadSpec::default();
        let z = c(0.7, -1.2);
        assert!((berezin(&Weight::one(), 2.0, z, &spec).unwrap() - 1.0).abs() < 1e-9);
        let b = berezin(&w("power_pure:delta=2"), 1.0, z, &spec).unwrap();
        assert!((b - (z.norm_sqr() + 1.0)).abs() < 1e-9);
        let e = berezin(&w("exp_re:gamma=1"), 1.0, z, &spec).unwrap();
        assert!((e / (z.re.exp() * 0.25f64.exp()) - 1.0).abs() < 1e-9);
        // (1/pi) int e^{-|z-u|^2 + |u|^2/2} dA(u) = 2 e^{|z|^2}.
        let g = berezin(&w("gauss:gamma=0.5"), 1.0, z, &spec).unwrap();
        assert!((g / (2.0 * z.norm_sqr().exp()) - 1.0).abs() < 1e-9);
        assert!(berezin(&w("gauss:gamma=1"), 1.0, z, &spec)
            .unwrap_err()
            .is_usage());
    }

    #[test]
    fn lattice_and_doubling() {
        let spec = QuadSpec::default();
        let one = Weight::one();
        let (ratio, m) = lattice_comparability(&one, 1.0, c(0.0, 0.0), c(2.0, 1.0), &spec).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12 && (m - 1.0).abs() < 1e-12);
        let e = w("exp_re:gamma=1");
        let (ratio, m) = lattice_comparability(&e, 1.0, c(0.0, 0.0), c(3.0, 0.0), &spec).unwrap();
        assert!((ratio - (-3.0f64).exp()).abs() < 1e-12);
        assert!((m - (-1.0f64).exp()).abs() < 1e-12);
        assert!(lattice_comparability(&one, 1.0, c(0.5, 0.0), c(0.0, 0.0), &spec).is_err());
        let d = disc_doubling(&one, c(1.0, 1.0), 1.0, 2.0, &spec).unwrap();
        assert!((d - 4.0).abs() < 1e-12);
    }

    #[test]
    fn kt_constant_weight() {
        let sq = vec![Region::square(c(0.0, 0.0), 1.0).unwrap()];
        let rep = kt_check(&Weight::one(), 1.0, &sq, 0, &QuadSpec::default()).unwrap();
        assert_eq!(rep.delta, Some(0.95));
        assert!((rep.c_r.unwrap() - 1.0).abs() < 1e-9);
    }
}
