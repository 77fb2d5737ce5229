//! Exact exponential polynomials `sum_j p_j(z) e^{b_j z}`.
//!
//! Polynomials and reproducing kernels `c e^{alpha conj(a) z}` both live in
//! this class, which is closed under sums, products, differentiation and
//! antidifferentiation from 0, so every derivative and Taylor coefficient
//! used by the experiments is exact.

use std::fmt;

use num_complex::Complex64;

use crate::error::{ensure_usage, usage, Result};
use crate::quadcore::{CPoint, Envelope};
use crate::weights::{format_complex, parse_complex};

#[derive(Debug, Clone, PartialEq)]
struct ExpTerm {
    b: Complex64,
    /// Polynomial coefficients, constant term first, no trailing zeros.
    coeffs: Vec<Complex64>,
}

/// An entire function `sum_j p_j(z) e^{b_j z}` in canonical form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntireFn {
    terms: Vec<ExpTerm>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(zero(), |acc, c| acc * z + c)
}

impl EntireFn {
    fn from_terms(mut terms: Vec<ExpTerm>) -> EntireFn {
        terms.sort_by(|x, y| {
            x.b.re
                .total_cmp(&y.b.re)
                .then(x.b.im.total_cmp(&y.b.im))
        });
        let mut out: Vec<ExpTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.b == t.b => {
                    if last.coeffs.len() < t.coeffs.len() {
                        last.coeffs.resize(t.coeffs.len(), zero());
                    }
                    for (a, c) in last.coeffs.iter_mut().zip(&t.coeffs) {
                        *a += c;
                    }
                }
                _ => out.push(t),
            }
        }
        for t in &mut out {
            while t.coeffs.last() == Some(&zero()) {
                t.coeffs.pop();
            }
        }
        out.retain(|t| !t.coeffs.is_empty());
        EntireFn { terms: out }
    }

    pub fn zero() -> EntireFn {
        EntireFn::default()
    }

    pub fn constant(c: Complex64) -> EntireFn {
        EntireFn::poly(vec![c])
    }

    pub fn poly(coeffs: Vec<Complex64>) -> EntireFn {
        EntireFn::exp_poly(zero(), coeffs)
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> EntireFn {
        let mut c = vec![zero(); m + 1];
        c[m] = Complex64::new(1.0, 0.0);
        EntireFn::poly(c)
    }

    /// `p(z) e^{b z}`.
    pub fn exp_poly(b: Complex64, coeffs: Vec<Complex64>) -> EntireFn {
        EntireFn::from_terms(vec![ExpTerm { b, coeffs }])
    }

    /// The reproducing kernel `K_a(z) = e^{alpha conj(a) z}`.
    pub fn kernel(alpha: f64, a: CPoint) -> EntireFn {
        EntireFn::exp_poly(a.conj() * alpha, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest polynomial degree among the terms.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.coeffs.len() - 1)
            .max()
            .unwrap_or(0)
    }

    /// Exponents `b_j`, in canonical order.
    pub fn exponents(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.b).collect()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.b == zero())
    }

    pub fn add(&self, other: &EntireFn) -> EntireFn {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        EntireFn::from_terms(t)
    }

    pub fn sub(&self, other: &EntireFn) -> EntireFn {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> EntireFn {
        EntireFn::from_terms(
            self.terms
                .iter()
                .map(|t| ExpTerm {
                    b: t.b,
                    coeffs: t.coeffs.iter().map(|x| x * c).collect(),
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &EntireFn) -> EntireFn {
        let mut out = Vec::new();
        for x in &self.terms {
            for y in &other.terms {
                let mut c = vec![zero(); x.coeffs.len() + y.coeffs.len() - 1];
                for (i, a) in x.coeffs.iter().enumerate() {
                    for (j, b) in y.coeffs.iter().enumerate() {
                        c[i + j] += a * b;
                    }
                }
                out.push(ExpTerm { b: x.b + y.b, coeffs: c });
            }
        }
        EntireFn::from_terms(out)
    }

    pub fn eval(&self, z: CPoint) -> Complex64 {
        self.terms
            .iter()
            .map(|t| horner(&t.coeffs, z) * (t.b * z).exp())
            .sum()
    }

    /// Mean exponent, used to factor out the dominant growth.
    fn mean_exponent(&self) -> Complex64 {
        if self.terms.is_empty() {
            return zero();
        }
        self.terms.iter().map(|t| t.b).sum::<Complex64>() / self.terms.len() as f64
    }

    /// `(v, s)` with `f(z) = v e^{s}`, where `s = Re(b_mean z)` absorbs the
    /// exponential size so that `|f|^p` can be formed in log space.
    pub fn eval_scaled(&self, z: CPoint) -> (Complex64, f64) {
        let m = self.mean_exponent();
        let s = (m * z).re;
        let v = self
            .terms
            .iter()
            .map(|t| {
                let e = (t.b - m) * z;
                horner(&t.coeffs, z) * Complex64::from_polar(e.re.exp(), e.im + (m * z).im)
            })
            .sum();
        (v, s)
    }

    /// `ln |f(z)|`.
    pub fn ln_abs(&self, z: CPoint) -> f64 {
        let (v, s) = self.eval_scaled(z);
        v.norm().ln() + s
    }

    pub fn derivative(&self) -> EntireFn {
        EntireFn::from_terms(
            self.terms
                .iter()
                .map(|t| {
                    let n = t.coeffs.len();
                    let mut c: Vec<Complex64> = t.coeffs.iter().map(|x| x * t.b).collect();
                    for k in 1..n {
                        c[k - 1] += t.coeffs[k] * k as f64;
                    }
                    ExpTerm { b: t.b, coeffs: c }
                })
                .collect(),
        )
    }

    /// `int_0^z f`.
    pub fn antiderivative(&self) -> EntireFn {
        let mut out = Vec::new();
        let mut constant = zero();
        for t in &self.terms {
            let n = t.coeffs.len();
            if t.b == zero() {
                let mut c = vec![zero(); n + 1];
                for k in 0..n {
                    c[k + 1] = t.coeffs[k] / (k + 1) as f64;
                }
                out.push(ExpTerm { b: t.b, coeffs: c });
            } else {
                // q' + b q = p, solved from the top coefficient down.
                let mut q = vec![zero(); n];
                for k in (0..n).rev() {
                    let next = if k + 1 < n { q[k + 1] * (k + 1) as f64 } else { zero() };
                    q[k] = (t.coeffs[k] - next) / t.b;
                }
                constant -= q[0];
                out.push(ExpTerm { b: t.b, coeffs: q });
            }
        }
        out.push(ExpTerm {
            b: zero(),
            coeffs: vec![constant],
        });
        EntireFn::from_terms(out)
    }

    /// Taylor coefficients at 0 of orders `0..=m`.
    pub fn taylor(&self, m: usize) -> Vec<Complex64> {
        let mut out = vec![zero(); m + 1];
        for t in &self.terms {
            // b^j / j!
            let mut pw = vec![Complex64::new(1.0, 0.0); m + 1];
            for j in 1..=m {
                pw[j] = pw[j - 1] * t.b / j as f64;
            }
            for (k, c) in t.coeffs.iter().enumerate().take(m + 1) {
                for j in 0..=(m - k) {
                    out[k + j] += c * pw[j];
                }
            }
        }
        out
    }

    /// Taylor polynomial `T_m(f)`.
    pub fn taylor_poly(&self, m: usize) -> EntireFn {
        EntireFn::poly(self.taylor(m))
    }

    /// Envelope of `|f|^p`.
    pub fn envelope(&self, p: f64) -> Envelope {
        let m = self.mean_exponent();
        let spread = self
            .terms
            .iter()
            .map(|t| (t.b - m).norm())
            .fold(0.0, f64::max);
        Envelope {
            gauss: 0.0,
            lin: m * p,
            exp_rate: spread * p,
            poly: self.degree() as f64 * p,
        }
    }
}

/// `D^{(n)} f`: the `n`-th derivative for `n >= 0`, the `|n|`-fold
/// antiderivative from 0 for `n < 0`.
pub fn diff_antidiff(f: &EntireFn, n: i32) -> EntireFn {
    let mut g = f.clone();
    if n >= 0 {
        for _ in 0..n {
            g = g.derivative();
        }
    } else {
        for _ in 0..(-n) {
            g = g.antiderivative();
        }
    }
    g
}

impl fmt::Display for EntireFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let poly: Vec<String> = t
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != zero())
                .map(|(k, c)| match k {
                    0 => format!("({})", format_complex(*c)),
                    1 => format!("({})z", format_complex(*c)),
                    _ => format!("({})z^{k}", format_complex(*c)),
                })
                .collect();
            if t.b == zero() {
                write!(f, "{}", poly.join(" + "))?;
            } else {
                write!(f, "[{}]e^{{({})z}}", poly.join(" + "), format_complex(t.b))?;
            }
        }
        Ok(())
    }
}

fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses the function mini-language:
/// `poly:c0,c1,...`, `kernel:alpha=A,a=X+Yi`, `monomial:m`, `sum:(spec;spec)`.
pub fn parse_entire(spec: &str) -> Result<EntireFn> {
    let spec = spec.trim();
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("function spec {spec:?} needs a kind prefix")))?;
    match kind.trim() {
        "poly" => {
            let coeffs = rest
                .split(',')
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            Ok(EntireFn::poly(coeffs))
        }
        "monomial" => {
            let m: usize = rest
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad monomial degree {rest:?}")))?;
            ensure_usage!(m <= 64, "monomial degree {m} is too large");
            Ok(EntireFn::monomial(m))
        }
        "kernel" => {
            let mut alpha = None;
            let mut a = None;
            for kv in rest.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| usage(format!("expected key=value, got {kv:?}")))?;
                match k.trim() {
                    "alpha" => {
                        alpha = Some(
                            v.trim()
                                .parse::<f64>()
                                .map_err(|_| usage(format!("bad alpha {v:?}")))?,
                        )
                    }
                    "a" => a = Some(parse_complex(v)?),
                    other => return Err(usage(format!("kernel has no parameter {other:?}"))),
                }
            }
            let alpha = alpha.ok_or_else(|| usage("kernel needs alpha"))?;
            ensure_usage!(alpha > 0.0 && alpha.is_finite(), "kernel alpha must be positive");
            Ok(EntireFn::kernel(alpha, a.ok_or_else(|| usage("kernel needs a"))?))
        }
        "sum" => {
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| usage("sum terms must be written as (spec;spec)"))?;
            let mut acc = EntireFn::zero();
            for part in split_top(inner, ';') {
                acc = acc.add(&parse_entire(part)?);
            }
            Ok(acc)
        }
        other => Err(usage(format!("unknown function kind {other:?}"))),
    }
}
