//! Deterministic adaptive quadrature over the plane and over squares and discs.
//!
//! Plane integrals are truncated to a square around the centre of the
//! integrand's Gaussian envelope, tiled, and refined adaptively. Declared
//! singular points get graded polar patches so that integrable point
//! singularities (powers and logarithms of `|z - a|`) converge.

mod engine;
pub(crate) mod gauss;
mod sum;
mod tail;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_usage, Result};
use engine::{integrate_cells, Cell, Patch};

pub use sum::{compensated_sum, CompensatedSum, QuadValue};
pub use tail::truncation_radius;

/// A point of the complex plane.
pub type CPoint = Complex64;

/// Quadrature policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Side of the initial tiles.
    pub base_tile: f64,
    /// Maximum number of refinement levels.
    pub max_refine: usize,
    /// Added to the truncation radius of plane integrals.
    pub truncation_margin: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-15,
            base_tile: 0.5,
            max_refine: 12,
            truncation_margin: 0.5,
        }
    }
}

impl QuadSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_base_tile(mut self, base_tile: f64) -> Self {
        self.base_tile = base_tile;
        self
    }

    pub fn with_max_refine(mut self, max_refine: usize) -> Self {
        self.max_refine = max_refine;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_usage!(
            self.rel_tol > 0.0 && self.rel_tol < 1.0,
            "rel_tol must lie in (0, 1), got {}",
            self.rel_tol
        );
        ensure_usage!(
            self.abs_tol > 0.0 && self.abs_tol < 1.0,
            "abs_tol must lie in (0, 1), got {}",
            self.abs_tol
        );
        ensure_usage!(
            self.base_tile > 0.0 && self.base_tile.is_finite(),
            "base_tile must be positive, got {}",
            self.base_tile
        );
        ensure_usage!(self.max_refine >= 1, "max_refine must be at least 1");
        ensure_usage!(
            self.truncation_margin > 0.0 && self.truncation_margin.is_finite(),
            "truncation_margin must be positive, got {}",
            self.truncation_margin
        );
        Ok(())
    }

    /// Canonical text form, used to tag reports.
    pub fn fingerprint(&self) -> String {
        format!(
            "rel_tol={:e};abs_tol={:e};base_tile={:e};max_refine={};truncation_margin={:e}",
            self.rel_tol, self.abs_tol, self.base_tile, self.max_refine, self.truncation_margin
        )
    }
}

/// Output of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<V> {
    pub value: V,
    /// Estimated absolute error.
    pub error: f64,
    /// Refinement levels used.
    pub levels: usize,
    pub evaluations: usize,
}

/// Growth descriptor `(1+|z|)^poly * exp(exp_rate*|z| + Re(lin*z) - gauss*|z|^2)`.
///
/// Products of envelopes add their fields and a power scales them, so weights,
/// kernels and norms can compose their envelopes exactly.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Envelope {
    pub gauss: f64,
    pub lin: CPoint,
    pub exp_rate: f64,
    pub poly: f64,
}

impl Envelope {
    pub fn gaussian(rate: f64) -> Self {
        Envelope {
            gauss: rate,
            ..Default::default()
        }
    }

    /// Envelope of `exp(-rate*|z - c|^2)` up to a constant.
    pub fn gaussian_at(rate: f64, c: CPoint) -> Self {
        Envelope {
            gauss: rate,
            lin: c.conj() * (2.0 * rate),
            ..Default::default()
        }
    }

    pub fn poly(degree: f64) -> Self {
        Envelope {
            poly: degree,
            ..Default::default()
        }
    }

    pub fn times(self, other: Envelope) -> Self {
        Envelope {
            gauss: self.gauss + other.gauss,
            lin: self.lin + other.lin,
            exp_rate: self.exp_rate + other.exp_rate,
            poly: self.poly + other.poly,
        }
    }

    pub fn pow(self, p: f64) -> Self {
        Envelope {
            gauss: self.gauss * p,
            lin: self.lin * p,
            exp_rate: self.exp_rate * p,
            poly: self.poly * p,
        }
    }

    /// `ln` of the envelope at its centre, or 0 when that is not finite.
    pub(crate) fn ln_peak(&self) -> f64 {
        let c = self.center();
        let r = c.norm();
        let v = self.poly * (1.0 + r).ln() + self.exp_rate * r + (self.lin * c).re - self.gauss * r * r;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }

    /// Centre of the Gaussian factor; the origin when there is none.
    pub fn center(&self) -> CPoint {
        if self.gauss > 0.0 {
            self.lin.conj() / (2.0 * self.gauss)
        } else {
            CPoint::new(0.0, 0.0)
        }
    }
}

/// Envelope plus the points where the integrand may be singular.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntegrandMeta {
    pub envelope: Envelope,
    pub singular_points: Vec<CPoint>,
}

impl IntegrandMeta {
    pub fn gaussian(decay_rate: f64, poly_degree: f64) -> Self {
        IntegrandMeta {
            envelope: Envelope {
                gauss: decay_rate,
                poly: poly_degree,
                ..Default::default()
            },
            singular_points: Vec::new(),
        }
    }

    pub fn new(envelope: Envelope, singular_points: Vec<CPoint>) -> Self {
        IntegrandMeta {
            envelope,
            singular_points,
        }
    }

    pub fn with_singular_points(mut self, points: impl IntoIterator<Item = CPoint>) -> Self {
        self.singular_points.extend(points);
        self
    }

    pub fn gaussian_decay_rate(&self) -> f64 {
        self.envelope.gauss
    }

    pub fn poly_growth_degree(&self) -> f64 {
        self.envelope.poly
    }
}

/// A square `Q_side(center)` or a disc `D(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Square { center: CPoint, side: f64 },
    Disc { center: CPoint, radius: f64 },
}

impl Region {
    pub fn square(center: CPoint, side: f64) -> Result<Region> {
        ensure_usage!(
            side > 0.0 && side.is_finite(),
            "square side must be positive, got {side}"
        );
        ensure_usage!(is_finite(center), "region center must be finite");
        Ok(Region::Square { center, side })
    }

    pub fn disc(center: CPoint, radius: f64) -> Result<Region> {
        ensure_usage!(
            radius > 0.0 && radius.is_finite(),
            "disc radius must be positive, got {radius}"
        );
        ensure_usage!(is_finite(center), "region center must be finite");
        Ok(Region::Disc { center, radius })
    }

    pub fn center(&self) -> CPoint {
        match *self {
            Region::Square { center, .. } | Region::Disc { center, .. } => center,
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Square { side, .. } => side * side,
            Region::Disc { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn contains(&self, z: CPoint) -> bool {
        match *self {
            Region::Square { center, side } => {
                let d = z - center;
                d.re.abs() <= 0.5 * side && d.im.abs() <= 0.5 * side
            }
            Region::Disc { center, radius } => (z - center).norm() <= radius,
        }
    }

    pub fn translated(&self, a: CPoint) -> Region {
        match *self {
            Region::Square { center, side } => Region::Square {
                center: center + a,
                side,
            },
            Region::Disc { center, radius } => Region::Disc {
                center: center + a,
                radius,
            },
        }
    }

    /// Radius of the smallest disc about the centre containing the region.
    pub fn outer_radius(&self) -> f64 {
        match *self {
            Region::Square { side, .. } => side * std::f64::consts::FRAC_1_SQRT_2,
            Region::Disc { radius, .. } => radius,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Region::Square { center, side } => {
                write!(f, "Q_{side}({}{:+}i)", center.re, center.im)
            }
            Region::Disc { center, radius } => {
                write!(f, "D({}{:+}i,{radius})", center.re, center.im)
            }
        }
    }
}

fn is_finite(z: CPoint) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Integral of `f` over the plane.
///
/// The envelope in `meta` must carry a positive Gaussian decay; the integrand
/// is treated as negligible where the envelope's relative radial tail drops
/// below `rel_tol / 100`.
pub fn integrate_plane<V, F>(f: F, meta: &IntegrandMeta, spec: &QuadSpec) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: Fn(CPoint) -> V + Sync,
{
    spec.validate()?;
    let env = &meta.envelope;
    ensure_usage!(
        env.gauss > 0.0 && env.gauss.is_finite(),
        "plane integral needs a positive Gaussian decay rate, got {}",
        env.gauss
    );
    let center = env.center();
    let reach = tail::relative_radius(env.gauss, env.exp_rate, env.poly.max(0.0), 1e-2 * spec.rel_tol)
        + spec.truncation_margin;
    let mut patches = Vec::new();
    let mut cells = Vec::new();
    let n = ((2.0 * reach) / spec.base_tile).ceil().max(1.0) as usize;
    let side = 2.0 * reach / n as f64;
    let sing = dedup_points(&meta.singular_points);
    for j in 0..n {
        for i in 0..n {
            let x0 = center.re - reach + i as f64 * side;
            let y0 = center.im - reach + j as f64 * side;
            tile_rect(x0, y0, side, side, &sing, &mut patches, &mut cells, 0);
        }
    }
    integrate_cells(&f, &patches, cells, spec)
}

/// Integral of `f` over a square or a disc, with graded patches at the
/// `singular_points` that fall inside.
pub fn integrate_region<V, F>(
    f: F,
    region: &Region,
    singular_points: &[CPoint],
    spec: &QuadSpec,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: Fn(CPoint) -> V + Sync,
{
    spec.validate()?;
    let sing: Vec<CPoint> = dedup_points(singular_points)
        .into_iter()
        .filter(|&p| {
            let slack = 1e-12 * region.outer_radius();
            match *region {
                Region::Square { center, side } => {
                    let d = p - center;
                    d.re.abs() <= 0.5 * side + slack && d.im.abs() <= 0.5 * side + slack
                }
                Region::Disc { center, radius } => (p - center).norm() <= radius + slack,
            }
        })
        .collect();
    let mut patches = Vec::new();
    let mut cells = Vec::new();
    match *region {
        Region::Square { center, side } => {
            let n = (side / spec.base_tile).ceil().max(1.0) as usize;
            let h = side / n as f64;
            let x0 = center.re - 0.5 * side;
            let y0 = center.im - 0.5 * side;
            for j in 0..n {
                for i in 0..n {
                    let xi = x0 + i as f64 * h;
                    let yj = y0 + j as f64 * h;
                    tile_rect(xi, yj, h, h, &sing, &mut patches, &mut cells, 0);
                }
            }
        }
        Region::Disc { center, radius } => {
            let nt = (radius / spec.base_tile).ceil().clamp(1.0, 64.0) as usize;
            let ns = (std::f64::consts::TAU * radius / spec.base_tile)
                .ceil()
                .clamp(4.0, 256.0) as usize;
            match sing.first() {
                None => {
                    patches.push(Patch::Disc { center, radius });
                    cells.extend(Cell::grid(0, ns, nt));
                }
                Some(&apex) => {
                    // Further singular points are left to the adaptive refinement.
                    patches.push(Patch::DiscAbout {
                        center,
                        radius,
                        apex,
                    });
                    cells.extend(Cell::grid(0, ns, 1));
                }
            }
        }
    }
    integrate_cells(&f, &patches, cells, spec)
}

fn dedup_points(points: &[CPoint]) -> Vec<CPoint> {
    let mut out: Vec<CPoint> = Vec::with_capacity(points.len());
    for &p in points {
        if is_finite(p) && !out.iter().any(|q| (p - *q).norm() <= 1e-12 * (1.0 + p.norm())) {
            out.push(p);
        }
    }
    out
}

/// Adds the rectangle to the patch list: plain when no singular point lies in
/// it, fanned into wedges around a single one, subdivided otherwise.
#[allow(clippy::too_many_arguments)]
fn tile_rect(
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    sing: &[CPoint],
    patches: &mut Vec<Patch>,
    cells: &mut Vec<Cell>,
    depth: usize,
) {
    let tol = 1e-12 * (w + h);
    let inside: Vec<CPoint> = sing
        .iter()
        .copied()
        .filter(|p| {
            p.re >= x0 - tol && p.re <= x0 + w + tol && p.im >= y0 - tol && p.im <= y0 + h + tol
        })
        .collect();
    if inside.is_empty() {
        cells.push(Cell::whole(patches.len()));
        patches.push(Patch::Rect { x0, y0, w, h });
    } else if inside.len() == 1 || depth >= 40 {
        let apex = inside[0];
        let corners = [
            CPoint::new(x0, y0),
            CPoint::new(x0 + w, y0),
            CPoint::new(x0 + w, y0 + h),
            CPoint::new(x0, y0 + h),
        ];
        for k in 0..4 {
            let wedge = Patch::wedge(apex, corners[k], corners[(k + 1) % 4]);
            if let Patch::Wedge { twice_area, .. } = wedge {
                if twice_area > 1e-12 * w * h {
                    cells.push(Cell::whole(patches.len()));
                    patches.push(wedge);
                }
            }
        }
    } else {
        let (hw, hh) = (0.5 * w, 0.5 * h);
        for (dx, dy) in [(0.0, 0.0), (hw, 0.0), (0.0, hh), (hw, hh)] {
            tile_rect(x0 + dx, y0 + dy, hw, hh, &inside, patches, cells, depth + 1);
        }
    }
}

/// Points of `spacing * Z^2` with modulus at most `radius`, ordered
/// lexicographically in `(k1, k2)`.
pub fn lattice_points(spacing: f64, radius: f64) -> Result<Vec<CPoint>> {
    ensure_usage!(
        spacing > 0.0 && spacing.is_finite(),
        "lattice spacing must be positive, got {spacing}"
    );
    ensure_usage!(
        radius >= 0.0 && radius.is_finite(),
        "lattice radius must be nonnegative, got {radius}"
    );
    let kmax = (radius / spacing).floor() as i64;
    let limit = radius * (1.0 + 1e-12);
    let mut out = Vec::new();
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            let z = CPoint::new(spacing * k1 as f64, spacing * k2 as f64);
            if z.norm() <= limit {
                out.push(z);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadSpec {
        QuadSpec::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gaussian_integrals() {
        let meta = IntegrandMeta::gaussian(1.0, 0.0);
        let r = integrate_plane(|z: CPoint| (-z.norm_sqr()).exp(), &meta, &spec()).unwrap();
        assert!(rel(r.value, PI) < 1e-10, "{}", r.value);

        let meta2 = IntegrandMeta::gaussian(1.0, 2.0);
        let r = integrate_plane(|z: CPoint| z.norm_sqr() * (-z.norm_sqr()).exp(), &meta2, &spec())
            .unwrap();
        assert!(rel(r.value, PI) < 1e-10, "{}", r.value);
    }

    #[test]
    fn shifted_gaussian_uses_envelope_center() {
        let c = CPoint::new(1.0, 1.0);
        let meta = IntegrandMeta::new(Envelope::gaussian_at(2.0, c), vec![]);
        assert!((meta.envelope.center() - c).norm() < 1e-15);
        let r = integrate_plane(|z: CPoint| (-2.0 * (z - c).norm_sqr()).exp(), &meta, &spec())
            .unwrap();
        assert!(rel(r.value, PI / 2.0) < 1e-10);
    }

    #[test]
    fn far_gaussian_is_found() {
        let c = CPoint::new(30.0, -40.0);
        let meta = IntegrandMeta::new(Envelope::gaussian_at(1.0, c), vec![]);
        let r = integrate_plane(|z: CPoint| (-(z - c).norm_sqr()).exp(), &meta, &spec()).unwrap();
        assert!(rel(r.value, PI) < 1e-10);
    }

    #[test]
    fn region_areas_and_moments() {
        let d = Region::disc(CPoint::new(0.0, 0.0), 1.0).unwrap();
        let q = Region::square(CPoint::new(0.0, 0.0), 2.0).unwrap();
        let one = |_: CPoint| 1.0;
        assert!(rel(integrate_region(one, &d, &[], &spec()).unwrap().value, PI) < 1e-12);
        assert!(rel(integrate_region(one, &q, &[], &spec()).unwrap().value, 4.0) < 1e-12);
        let m = integrate_region(|z: CPoint| z.norm_sqr(), &d, &[], &spec()).unwrap();
        assert!(rel(m.value, PI / 2.0) < 1e-12);
    }

    #[test]
    fn log_singularity_in_square() {
        let q = Region::square(CPoint::new(0.0, 0.0), 1.0).unwrap();
        let f = |z: CPoint| -z.norm().ln();
        let a = integrate_region(f, &q, &[CPoint::new(0.0, 0.0)], &spec()).unwrap();
        // Eight congruent triangles 0 <= y <= x <= 1/2:
        // int_0^{pi/4} int_0^{1/(2 cos t)} -log(rho) rho drho dt.
        let g = |t: f64| {
            let r: f64 = 0.5 / t.cos();
            r * r / 4.0 - r * r * r.ln() / 2.0
        };
        let gl = gauss::gauss_legendre(40);
        let oracle: f64 = 8.0
            * gl.nodes
                .iter()
                .zip(&gl.weights)
                .map(|(x, w)| w * PI / 4.0 * g(x * PI / 4.0))
                .sum::<f64>();
        assert!((a.value - oracle).abs() <= a.error, "{} vs {} (error {})", a.value, oracle, a.error);
        assert!(rel(a.value, oracle) < 1e-8, "{} vs {}", a.value, oracle);
    }

    #[test]
    fn strong_singularity_on_corner() {
        // |z|^{-2} (log 1/|z|)^{-2} on D(0, 1/e): 2 pi * int_0^{1/e} dr / (r log^2 r) = 2 pi.
        let d = Region::disc(CPoint::new(0.0, 0.0), (-1.0f64).exp()).unwrap();
        let f = |z: CPoint| {
            let r = z.norm();
            1.0 / (r * r * r.ln().powi(2))
        };
        let a = integrate_region(f, &d, &[CPoint::new(0.0, 0.0)], &spec().with_rel_tol(1e-6))
            .unwrap();
        assert!(rel(a.value, 2.0 * PI) < 1e-5, "{}", a.value);
    }

    #[test]
    fn singular_point_off_center_in_disc() {
        let d = Region::disc(CPoint::new(0.3, -0.2), 1.0).unwrap();
        let a = CPoint::new(0.0, 0.0);
        let r = integrate_region(|z: CPoint| 1.0 / (z - a).norm(), &d, &[a], &spec()).unwrap();
        // Singular point on a tile corner of an equivalent square tiling.
        let q = Region::square(CPoint::new(0.0, 0.0), 2.0).unwrap();
        let s = integrate_region(|z: CPoint| 1.0 / z.norm(), &q, &[a], &spec()).unwrap();
        // int over [-1,1]^2 of 1/|z| = 8 asinh(1).
        let exact = 8.0 * 1f64.asinh();
        assert!((s.value - exact).abs() <= s.error, "{} (error {})", s.value, s.error);
        assert!(rel(s.value, exact) < 1e-7, "{}", s.value);
        // int over a unit disc of 1/|z - a| with |a - c| = d < 1: 2 pi * E-type integral;
        // compare against a plain polar integration about a.
        let c = CPoint::new(0.3, -0.2);
        let dd = c.norm();
        let gl = gauss::gauss_legendre(60);
        let oracle: f64 = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(x, w)| {
                let th = x * std::f64::consts::TAU;
                let proj = dd * th.cos();
                let rho = proj + (proj * proj - dd * dd + 1.0).sqrt();
                w * std::f64::consts::TAU * rho
            })
            .sum();
        assert!((r.value - oracle).abs() <= r.error, "{} vs {} (error {})", r.value, oracle, r.error);
        assert!(rel(r.value, oracle) < 1e-7, "{} vs {}", r.value, oracle);
    }

    #[test]
    fn complex_valued_integrand() {
        let meta = IntegrandMeta::gaussian(1.0, 2.0);
        let r: QuadResult<Complex64> =
            integrate_plane(|z: CPoint| z * z.conj() * (-z.norm_sqr()).exp() * Complex64::i(), &meta, &spec())
                .unwrap();
        assert!((r.value - Complex64::new(0.0, PI)).norm() < 1e-9);
    }

    #[test]
    fn zero_decay_is_usage_error() {
        let meta = IntegrandMeta::gaussian(0.0, 0.0);
        let e = integrate_plane(|_: CPoint| 1.0, &meta, &spec()).unwrap_err();
        assert!(e.is_usage());
    }

    #[test]
    fn unbounded_integrand_is_flagged_diverging() {
        let q = Region::square(CPoint::new(0.0, 0.0), 1.0).unwrap();
        let f = |z: CPoint| 1.0 / z.norm_sqr();
        let e = integrate_region(f, &q, &[CPoint::new(0.0, 0.0)], &spec()).unwrap_err();
        assert!(e.is_divergence(), "{e:?}");
    }

    #[test]
    fn lattice_examples() {
        let pts = lattice_points(1.0, 1.5).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], CPoint::new(-1.0, -1.0));
        assert_eq!(pts[1], CPoint::new(-1.0, 0.0));
        assert_eq!(lattice_points(2.0, 1.0).unwrap(), vec![CPoint::new(0.0, 0.0)]);
        let n = lattice_points(1.0, 100.0).unwrap().len() as f64;
        let area = PI * 1e4;
        // Gauss circle: |N - pi R^2| is far below the perimeter 2 pi R.
        assert!((n - area).abs() <= 2.0 * PI * 100.0, "{n}");
        assert!(n >= 0.99 * area && n <= 1.01 * area);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadSpec::default().validate().is_ok());
        assert!(QuadSpec::default().with_rel_tol(0.0).validate().is_err());
        assert!(QuadSpec::default().with_max_refine(0).validate().is_err());
        assert!(Region::square(CPoint::new(0.0, 0.0), -1.0).is_err());
    }
}
