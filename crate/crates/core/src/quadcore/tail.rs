//! Radial tail integrals of `(1+rho)^d * exp(a*rho - beta*rho^2)` and the
//! truncation radii they imply.

use super::gauss::cell_rule;
use crate::error::{ensure_usage, Result};

/// Tabulated `int_R^inf g` for `g(rho) = rho (1+rho)^d exp(a rho - beta rho^2)`,
/// scaled by `exp(-log_peak)`.
struct RadialTail {
    beta: f64,
    a: f64,
    d: f64,
    log_peak: f64,
    h: f64,
    /// `cum[k]` is the scaled tail from `k*h`.
    cum: Vec<f64>,
}

impl RadialTail {
    fn log_g(&self, rho: f64) -> f64 {
        self.d * rho.ln_1p() + self.a * rho - self.beta * rho * rho + rho.ln()
    }

    fn new(beta: f64, a: f64, d: f64, drop: f64) -> Self {
        let mut t = RadialTail {
            beta,
            a,
            d,
            log_peak: 0.0,
            h: 0.0,
            cum: Vec::new(),
        };
        // Stationary point of log g is a root of a quadratic-ish function;
        // a coarse scan followed by golden-section search is plenty.
        let scale = 1.0 / beta.sqrt();
        let mut hi = scale + a.max(0.0) / beta + d.abs() * scale;
        while t.log_g(2.0 * hi) > t.log_g(hi) {
            hi *= 2.0;
        }
        hi *= 2.0;
        let (mut lo, mut up) = (0.0, hi);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let m1 = up - phi * (up - lo);
            let m2 = lo + phi * (up - lo);
            if t.log_g(m1) < t.log_g(m2) {
                lo = m1;
            } else {
                up = m2;
            }
        }
        let peak = 0.5 * (lo + up);
        t.log_peak = t.log_g(peak);
        // Far enough out that the remaining mass is below exp(-drop) relative.
        let mut end = peak + scale;
        while t.log_g(end) > t.log_peak - drop {
            end += scale;
        }
        end += 2.0 * scale;
        let panels = ((end / (0.1 * scale)).ceil() as usize).clamp(64, 20_000);
        t.h = end / panels as f64;
        let mut cum = vec![0.0; panels + 1];
        for k in (0..panels).rev() {
            cum[k] = cum[k + 1] + t.piece(k as f64 * t.h, (k + 1) as f64 * t.h);
        }
        t.cum = cum;
        t
    }

    fn piece(&self, x0: f64, x1: f64) -> f64 {
        let rule = cell_rule();
        let w = x1 - x0;
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, wt)| {
                let rho = x0 + w * x;
                wt * w * (self.log_g(rho) - self.log_peak).exp()
            })
            .sum()
    }

    fn end(&self) -> f64 {
        self.h * (self.cum.len() - 1) as f64
    }

    fn scaled_tail(&self, r: f64) -> f64 {
        if r >= self.end() {
            return 0.0;
        }
        let k = ((r / self.h).floor() as usize).min(self.cum.len() - 2);
        self.cum[k + 1] + self.piece(r, (k + 1) as f64 * self.h)
    }

    /// Smallest `R` with `scaled_tail(R) <= target`, by bisection.
    fn solve(&self, target: f64) -> f64 {
        if self.cum[0] <= target {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, self.end());
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.scaled_tail(mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Radius beyond which the tail of `(1+rho)^d exp(a rho - beta rho^2) rho drho`
/// is at most `rel` times the whole integral.
pub(crate) fn relative_radius(beta: f64, a: f64, d: f64, rel: f64) -> f64 {
    let t = RadialTail::new(beta, a, d, 60.0 - rel.ln());
    t.solve(rel * t.cum[0])
}

/// Smallest `R` with `int_{|z|>R} (1+|z|)^poly_degree exp(-decay_rate |z|^2) dA < tol`.
pub fn truncation_radius(decay_rate: f64, poly_degree: f64, tol: f64) -> Result<f64> {
    ensure_usage!(
        decay_rate > 0.0 && decay_rate.is_finite(),
        "decay rate must be positive, got {decay_rate}"
    );
    ensure_usage!(
        poly_degree >= 0.0 && poly_degree.is_finite(),
        "polynomial degree must be nonnegative, got {poly_degree}"
    );
    ensure_usage!(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1), got {tol}");
    let probe = RadialTail::new(decay_rate, 0.0, poly_degree, 60.0);
    let log_target = (tol / std::f64::consts::TAU).ln() - probe.log_peak;
    let t = RadialTail::new(decay_rate, 0.0, poly_degree, 60.0 - log_target.min(0.0));
    Ok(t.solve(log_target.exp()))
}
