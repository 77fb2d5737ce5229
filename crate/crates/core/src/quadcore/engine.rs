//! Level-synchronous adaptive cubature over mapped parameter cells.
//!
//! Every cell is a rectangle in the parameter square of some [`Patch`]. A cell
//! is scored by comparing its tensor Gauss-Legendre value with the sum over its
//! four children; the children sum is kept as the cell value. Each level splits
//! the cells whose score exceeds an equal share of the error budget. Leaves stay
//! in canonical order (a split cell is replaced in place by its children, in
//! fixed child order) and all reductions run sequentially over that order, so
//! the result does not depend on how many rayon workers evaluated the cells.
//!
//! Cells touching a singular point stop splitting in the graded radial
//! direction at [`MIN_APEX_WIDTH`]. Their radial error cannot be reduced, so it
//! is estimated separately and added to the reported error without entering
//! the refinement test.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::gauss::{cell_rule, check_rule, ORDER};
use super::sum::{CompensatedSum, QuadValue};
use super::{CPoint, QuadResult, QuadSpec};
use crate::error::{Error, NumericalFailure, Result};

/// Below this many new cells per level evaluation stays on the calling thread.
const PAR_THRESHOLD: usize = 64;
const MAX_LEAVES: usize = 4_000_000;

/// A parametrisation of part of the plane by the unit square `(s, t)`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Patch {
    /// Axis-parallel rectangle `[x0, x0 + w] x [y0, y0 + h]`.
    Rect { x0: f64, y0: f64, w: f64, h: f64 },
    /// Triangle `(apex, p1, p2)` in polar form around `apex`, with the radial
    /// coordinate graded so that integrable point singularities at the apex
    /// (including logarithmic ones) become bounded.
    Wedge {
        apex: CPoint,
        p1: CPoint,
        p2: CPoint,
        twice_area: f64,
    },
    /// Plain polar disc.
    Disc { center: CPoint, radius: f64 },
    /// Disc in graded polar form around an interior point `apex`.
    DiscAbout {
        center: CPoint,
        radius: f64,
        apex: CPoint,
    },
}

/// Graded cells touching the apex are never narrower than this in `t`, which
/// keeps every node at distance above `e^{-230}` from the singular point.
const MIN_APEX_WIDTH: f64 = 0.125;

/// Radial grading `phi(t) = exp(1 - 1/t)` and its derivative.
#[inline]
fn graded(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    let phi = (1.0 - 1.0 / t).exp();
    (phi, phi / (t * t))
}

impl Patch {
    pub(crate) fn wedge(apex: CPoint, p1: CPoint, p2: CPoint) -> Patch {
        let a = p1 - apex;
        let b = p2 - p1;
        let twice_area = (a.re * b.im - a.im * b.re).abs();
        Patch::Wedge {
            apex,
            p1,
            p2,
            twice_area,
        }
    }

    fn is_graded(&self) -> bool {
        matches!(self, Patch::Wedge { .. } | Patch::DiscAbout { .. })
    }

    /// Point and area Jacobian at parameter `(s, t)`; `None` where the
    /// Jacobian vanishes (or underflows).
    #[inline]
    fn map(&self, s: f64, t: f64) -> Option<(CPoint, f64)> {
        match *self {
            Patch::Rect { x0, y0, w, h } => Some((CPoint::new(x0 + s * w, y0 + t * h), w * h)),
            Patch::Wedge {
                apex,
                p1,
                p2,
                twice_area,
            } => {
                let (phi, dphi) = graded(t);
                let jac = twice_area * phi * dphi;
                if jac <= 0.0 {
                    return None;
                }
                let edge = p1 + (p2 - p1) * s;
                Some((apex + (edge - apex) * phi, jac))
            }
            Patch::Disc { center, radius } => {
                let rho = radius * t;
                let jac = TAU * radius * rho;
                if jac <= 0.0 {
                    return None;
                }
                Some((center + CPoint::from_polar(rho, TAU * s), jac))
            }
            Patch::DiscAbout {
                center,
                radius,
                apex,
            } => {
                let (phi, dphi) = graded(t);
                let dir = CPoint::from_polar(1.0, TAU * s);
                let d = apex - center;
                let proj = d.re * dir.re + d.im * dir.im;
                let disc = (proj * proj - d.norm_sqr() + radius * radius).max(0.0);
                let rho_max = -proj + disc.sqrt();
                let jac = TAU * rho_max * rho_max * phi * dphi;
                if jac <= 0.0 {
                    return None;
                }
                Some((apex + dir * (rho_max * phi), jac))
            }
        }
    }
}

/// Parameter rectangle `[s0, s1] x [t0, t1]` of patch number `patch`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cell {
    pub patch: usize,
    pub s0: f64,
    pub s1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Cell {
    pub(crate) fn whole(patch: usize) -> Cell {
        Cell {
            patch,
            s0: 0.0,
            s1: 1.0,
            t0: 0.0,
            t1: 1.0,
        }
    }

    /// `ns x nt` uniform split of the unit parameter square, `s` fastest.
    pub(crate) fn grid(patch: usize, ns: usize, nt: usize) -> Vec<Cell> {
        let mut out = Vec::with_capacity(ns * nt);
        for j in 0..nt {
            for i in 0..ns {
                out.push(Cell {
                    patch,
                    s0: i as f64 / ns as f64,
                    s1: (i + 1) as f64 / ns as f64,
                    t0: j as f64 / nt as f64,
                    t1: (j + 1) as f64 / nt as f64,
                });
            }
        }
        out
    }

    /// Quadrants, or four strips in `s` for the innermost graded cells.
    fn children(&self, patches: &[Patch]) -> [Cell; 4] {
        let c = |s0, s1, t0, t1| Cell {
            patch: self.patch,
            s0,
            s1,
            t0,
            t1,
        };
        if self.t0 == 0.0
            && self.t1 <= MIN_APEX_WIDTH
            && patches[self.patch].is_graded()
        {
            let ds = 0.25 * (self.s1 - self.s0);
            let s = |k: f64| self.s0 + k * ds;
            return [
                c(self.s0, s(1.0), self.t0, self.t1),
                c(s(1.0), s(2.0), self.t0, self.t1),
                c(s(2.0), s(3.0), self.t0, self.t1),
                c(s(3.0), self.s1, self.t0, self.t1),
            ];
        }
        let sm = 0.5 * (self.s0 + self.s1);
        let tm = 0.5 * (self.t0 + self.t1);
        [
            c(self.s0, sm, self.t0, tm),
            c(sm, self.s1, self.t0, tm),
            c(self.s0, sm, tm, self.t1),
            c(sm, self.s1, tm, self.t1),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
struct Leaf<V> {
    cell: Cell,
    coarse: V,
    kids: [V; 4],
    kid_abs: [f64; 4],
    blowup: bool,
    t_err: f64,
}

impl<V: QuadValue> Leaf<V> {
    fn refined(&self) -> V {
        self.kids[0] + self.kids[1] + self.kids[2] + self.kids[3]
    }
    fn err(&self) -> f64 {
        (self.refined() - self.coarse).magnitude()
    }
    fn abs(&self) -> f64 {
        self.kid_abs.iter().sum()
    }
}

fn cell_value<V, F>(f: &F, patch: &Patch, cell: &Cell) -> (V, f64)
where
    V: QuadValue,
    F: Fn(CPoint) -> V + Sync,
{
    let rule = cell_rule();
    let ds = cell.s1 - cell.s0;
    let dt = cell.t1 - cell.t0;
    let mut acc = V::default();
    let mut abs = 0.0;
    for i in 0..ORDER {
        let s = cell.s0 + ds * rule.nodes[i];
        for j in 0..ORDER {
            let t = cell.t0 + dt * rule.nodes[j];
            if let Some((z, jac)) = patch.map(s, t) {
                let w = rule.weights[i] * rule.weights[j] * jac * ds * dt;
                let v = f(z);
                acc = acc + v * w;
                abs += v.magnitude() * w;
            }
        }
    }
    (acc, abs)
}

/// Probe of an innermost graded cell, which is never split in `t`.
///
/// Returns whether the radial density increases strictly toward the apex
/// across every node row, and an estimate of the `t` quadrature error from
/// the cell rule against the rule one order lower. The grading turns any
/// integrable point singularity into a density that vanishes or stays
/// bounded at `t = 0`, so a density growing on all rows marks a
/// non-integrable one.
fn apex_probe<V, F>(f: &F, patch: &Patch, cell: &Cell) -> (bool, f64)
where
    V: QuadValue,
    F: Fn(CPoint) -> V + Sync,
{
    if cell.t0 != 0.0 || cell.t1 > MIN_APEX_WIDTH || !patch.is_graded() {
        return (false, 0.0);
    }
    let rule = cell_rule();
    let ds = cell.s1 - cell.s0;
    let dt = cell.t1 - cell.t0;
    let row = |t: f64| {
        let mut v = V::default();
        let mut a = 0.0;
        for i in 0..ORDER {
            let s = cell.s0 + ds * rule.nodes[i];
            if let Some((z, jac)) = patch.map(s, t) {
                let fz = f(z);
                v = v + fz * (rule.weights[i] * jac);
                a += rule.weights[i] * jac * fz.magnitude();
            }
        }
        (v, a)
    };
    let fine: Vec<(V, f64)> = rule.nodes.iter().map(|&x| row(cell.t0 + dt * x)).collect();
    let check = check_rule();
    let mut hi = V::default();
    for (w, r) in rule.weights.iter().zip(&fine) {
        hi = hi + r.0 * *w;
    }
    let mut lo = V::default();
    for (w, x) in check.weights.iter().zip(&check.nodes) {
        lo = lo + row(cell.t0 + dt * x).0 * *w;
    }
    let blowup = fine.windows(2).all(|w| w[0].1 > w[1].1);
    (blowup, (hi - lo).magnitude() * ds * dt)
}

fn make_leaf<V, F>(f: &F, patches: &[Patch], cell: Cell, coarse: Option<V>) -> Leaf<V>
where
    V: QuadValue,
    F: Fn(CPoint) -> V + Sync,
{
    let patch = &patches[cell.patch];
    let coarse = coarse.unwrap_or_else(|| cell_value(f, patch, &cell).0);
    let mut kids = [V::default(); 4];
    let mut kid_abs = [0.0; 4];
    for (k, child) in cell.children(patches).iter().enumerate() {
        let (v, a) = cell_value(f, patch, child);
        kids[k] = v;
        kid_abs[k] = a;
    }
    let (blowup, t_err) = apex_probe(f, patch, &cell);
    Leaf {
        cell,
        coarse,
        kids,
        kid_abs,
        blowup,
        t_err,
    }
}

fn evaluate<V, F>(f: &F, patches: &[Patch], stubs: Vec<(Cell, Option<V>)>) -> Vec<Leaf<V>>
where
    V: QuadValue,
    F: Fn(CPoint) -> V + Sync,
{
    if stubs.len() >= PAR_THRESHOLD {
        stubs
            .into_par_iter()
            .map(|(c, v)| make_leaf(f, patches, c, v))
            .collect()
    } else {
        stubs
            .into_iter()
            .map(|(c, v)| make_leaf(f, patches, c, v))
            .collect()
    }
}

/// Adaptive integration of `f` over the union of `initial` cells.
pub(crate) fn integrate_cells<V, F>(
    f: &F,
    patches: &[Patch],
    initial: Vec<Cell>,
    spec: &QuadSpec,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: Fn(CPoint) -> V + Sync,
{
    let per_cell = 5 * ORDER * ORDER;
    let mut evaluations = initial.len() * per_cell;
    let mut leaves = evaluate(f, patches, initial.into_iter().map(|c| (c, None)).collect());
    let mut trace = Vec::new();

    for level in 0..=spec.max_refine {
        let mut total = CompensatedSum::new();
        let mut err = 0.0;
        let mut abs = 0.0;
        let mut finite = true;
        for leaf in &leaves {
            let r = leaf.refined();
            finite &= r.is_finite() && leaf.coarse.is_finite();
            total.add(r);
            err += leaf.err();
            abs += leaf.abs();
        }
        let value: V = total.value();
        trace.push(value.magnitude());
        let fail = |message: &str, trace: Vec<f64>, force_div: bool| {
            let n = trace.len();
            let diverging =
                force_div || (n >= 3 && trace[n - 1] >= 2.0 * trace[n - 3].max(f64::MIN_POSITIVE));
            Error::Numerical(NumericalFailure {
                message: message.to_string(),
                estimate: value.magnitude(),
                error_bound: err,
                trace,
                diverging,
            })
        };
        if !finite || !err.is_finite() {
            return Err(fail("non-finite integrand values", trace, true));
        }
        if leaves.iter().any(|l| l.blowup) {
            return Err(fail("integrand is not integrable at a singular point", trace, true));
        }
        let target = spec
            .abs_tol
            .max(spec.rel_tol * value.magnitude())
            .max(64.0 * f64::EPSILON * abs);
        if err <= target {
            return Ok(QuadResult {
                value,
                error: err + leaves.iter().map(|l| l.t_err).sum::<f64>(),
                levels: level,
                evaluations,
            });
        }
        if level == spec.max_refine {
            return Err(fail("adaptive refinement limit reached", trace, false));
        }
        let threshold = target / leaves.len() as f64;
        let n_split = leaves.iter().filter(|l| l.err() > threshold).count();
        if leaves.len() + 3 * n_split > MAX_LEAVES {
            return Err(fail("cell budget exhausted", trace, false));
        }

        // Rebuild in canonical order: split cells are replaced by their children.
        let mut next: Vec<Option<Leaf<V>>> = Vec::with_capacity(leaves.len() + 3 * n_split);
        let mut stubs = Vec::with_capacity(4 * n_split);
        for leaf in leaves {
            if leaf.err() > threshold {
                for (child, v) in leaf.cell.children(patches).into_iter().zip(leaf.kids) {
                    stubs.push((child, Some(v)));
                    next.push(None);
                }
            } else {
                next.push(Some(leaf));
            }
        }
        evaluations += stubs.len() * 4 * ORDER * ORDER;
        let mut fresh = evaluate(f, patches, stubs).into_iter();
        leaves = next
            .into_iter()
            .map(|slot| slot.unwrap_or_else(|| fresh.next().expect("one fresh leaf per stub")))
            .collect();
    }
    unreachable!("loop returns on the last level")
}
