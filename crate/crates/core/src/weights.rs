//! Weight catalog, the weight mini-language, and weight transforms.
//!
//! A [`Weight`] is an immutable expression tree. Its label is the canonical
//! mini-language form, so `parse_weight(w.label())` rebuilds the same weight.
//!
//! ```text
//! constant | constant:c=C
//! power:gamma=G              (1+|z|)^G
//! shifted_power:gamma=G,z0=Z (1+|z+Z|)^G
//! exp_abs:gamma=G,z0=Z       e^{G|z+Z|}
//! exp_re:gamma=G             e^{G Re z}
//! gauss:gamma=G              e^{G|z|^2}
//! muck:p=P                   (1+|z|^2)^{P-1}
//! power_pure:delta=D         |z|^{2(D-1)}
//! log_neg                    |z|^-2 (log 1/|z|)^-2, frozen for |z| >= 1/e
//! log_pos                    |z|^2 (log 1/|z|)^2, frozen for |z| >= 1/e
//! product:(SPEC;SPEC;...)
//! SPEC|distort:G  SPEC|translate:Z  SPEC|dual:P
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{ensure_usage, usage, Result};
use crate::quadcore::{integrate_region, CPoint, Envelope, IntegrandMeta, QuadSpec, Region};

const INV_E: f64 = 0.36787944117144233;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Constant(f64),
    Power(f64),
    ShiftedPower { gamma: f64, z0: CPoint },
    ExpAbs { gamma: f64, z0: CPoint },
    ExpRe(f64),
    Gauss(f64),
    Muck(f64),
    PowerPure(f64),
    LogNeg,
    LogPos,
    Product(Vec<Weight>),
    Distort(Weight, f64),
    Translate(Weight, CPoint),
    Dual(Weight, f64),
}

/// Transform applied by [`derive_weight`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derive {
    /// `w(z) / (1+|z|)^gamma`.
    Distort(f64),
    /// `w(a + u)`.
    Translate(CPoint),
    /// `w^{-p'/p} = w^{-1/(p-1)}`.
    Dual(f64),
}

/// Exponent pair `(p, p')`; `p' = inf` for `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApParams {
    pub p: f64,
    pub p_conj: f64,
}

impl ApParams {
    pub fn new(p: f64) -> Result<ApParams> {
        ensure_usage!(p >= 1.0 && p.is_finite(), "p must be at least 1, got {p}");
        let p_conj = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        Ok(ApParams { p, p_conj })
    }
}

/// A nonnegative weight on the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    node: Arc<Node>,
    meta: Arc<IntegrandMeta>,
    label: Arc<str>,
}

impl Weight {
    fn build(node: Node) -> Weight {
        let meta = node_meta(&node);
        let label = node_label(&node);
        Weight {
            node: Arc::new(node),
            meta: Arc::new(meta),
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Result<Weight> {
        ensure_usage!(c > 0.0 && c.is_finite(), "constant weight must be positive, got {c}");
        Ok(Weight::build(Node::Constant(c)))
    }

    pub fn one() -> Weight {
        Weight::build(Node::Constant(1.0))
    }

    pub fn product(factors: Vec<Weight>) -> Result<Weight> {
        ensure_usage!(!factors.is_empty(), "product needs at least one factor");
        Ok(Weight::build(Node::Product(factors)))
    }

    pub fn eval(&self, z: CPoint) -> f64 {
        match &*self.node {
            Node::Constant(c) => *c,
            Node::Power(g) => (1.0 + z.norm()).powf(*g),
            Node::ShiftedPower { gamma, z0 } => (1.0 + (z + z0).norm()).powf(*gamma),
            Node::ExpAbs { gamma, z0 } => (gamma * (z + z0).norm()).exp(),
            Node::ExpRe(g) => (g * z.re).exp(),
            Node::Gauss(g) => (g * z.norm_sqr()).exp(),
            Node::Muck(p) => (1.0 + z.norm_sqr()).powf(p - 1.0),
            Node::PowerPure(d) => z.norm_sqr().powf(d - 1.0),
            Node::LogNeg => {
                let r = z.norm().min(INV_E);
                let l = r.ln();
                1.0 / (r * r * l * l)
            }
            Node::LogPos => {
                let r = z.norm().min(INV_E);
                let l = r.ln();
                r * r * l * l
            }
            Node::Product(fs) => fs.iter().map(|w| w.eval(z)).product(),
            Node::Distort(w, g) => w.eval(z) / (1.0 + z.norm()).powf(*g),
            Node::Translate(w, a) => w.eval(z + a),
            Node::Dual(w, p) => w.eval(z).powf(-1.0 / (p - 1.0)),
        }
    }

    /// `ln w(z)`, usable where `w` itself over- or underflows.
    pub fn ln_eval(&self, z: CPoint) -> f64 {
        match &*self.node {
            Node::Constant(c) => c.ln(),
            Node::Power(g) => g * z.norm().ln_1p(),
            Node::ShiftedPower { gamma, z0 } => gamma * (z + z0).norm().ln_1p(),
            Node::ExpAbs { gamma, z0 } => gamma * (z + z0).norm(),
            Node::ExpRe(g) => g * z.re,
            Node::Gauss(g) => g * z.norm_sqr(),
            Node::Muck(p) => (p - 1.0) * z.norm_sqr().ln_1p(),
            Node::PowerPure(d) => (d - 1.0) * z.norm_sqr().ln(),
            Node::LogNeg | Node::LogPos => {
                let r = z.norm().min(INV_E);
                let v = 2.0 * r.ln() + 2.0 * (-r.ln()).ln();
                if matches!(*self.node, Node::LogPos) {
                    v
                } else {
                    -v
                }
            }
            Node::Product(fs) => fs.iter().map(|w| w.ln_eval(z)).sum(),
            Node::Distort(w, g) => w.ln_eval(z) - g * z.norm().ln_1p(),
            Node::Translate(w, a) => w.ln_eval(z + a),
            Node::Dual(w, p) => -w.ln_eval(z) / (p - 1.0),
        }
    }

    pub fn meta(&self) -> &IntegrandMeta {
        &self.meta
    }

    pub fn envelope(&self) -> Envelope {
        self.meta.envelope
    }

    pub fn singular_points(&self) -> &[CPoint] {
        &self.meta.singular_points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// True when the weight is a positive constant.
    pub fn is_constant(&self) -> bool {
        match &*self.node {
            Node::Constant(_) => true,
            Node::Product(fs) => fs.iter().all(Weight::is_constant),
            Node::Translate(w, _) | Node::Dual(w, _) => w.is_constant(),
            Node::Distort(w, g) => *g == 0.0 && w.is_constant(),
            Node::Power(g) | Node::Gauss(g) | Node::ExpRe(g) => *g == 0.0,
            Node::ShiftedPower { gamma, .. } | Node::ExpAbs { gamma, .. } => *gamma == 0.0,
            Node::Muck(p) => *p == 1.0,
            Node::PowerPure(d) => *d == 1.0,
            Node::LogNeg | Node::LogPos => false,
        }
    }

    pub fn derive(&self, mode: Derive) -> Result<Weight> {
        derive_weight(self, mode)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// `X+Yi` form with shortest round-trip reals.
pub fn format_complex(z: CPoint) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Parses `X+Yi`, `X-Yi`, `X`, `Yi` and `i`.
pub fn parse_complex(s: &str) -> Result<CPoint> {
    let s = s.trim();
    let bad = || usage(format!("cannot parse complex number {s:?}"));
    ensure_usage!(!s.is_empty(), "empty complex number");
    let Some(body) = s.strip_suffix('i') else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        return Ok(CPoint::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coef = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse().map_err(|_| bad()),
        }
    };
    let z = match split {
        Some(k) => CPoint::new(body[..k].parse().map_err(|_| bad())?, coef(&body[k..])?),
        None => CPoint::new(0.0, coef(body)?),
    };
    ensure_usage!(z.re.is_finite() && z.im.is_finite(), "complex number {s:?} is not finite");
    Ok(z)
}

fn node_meta(node: &Node) -> IntegrandMeta {
    let zero = CPoint::new(0.0, 0.0);
    let env = |e: Envelope, pts: Vec<CPoint>| IntegrandMeta::new(e, pts);
    match node {
        Node::Constant(_) => IntegrandMeta::default(),
        Node::Power(g) => env(Envelope::poly(*g), vec![zero]),
        Node::ShiftedPower { gamma, z0 } => env(Envelope::poly(*gamma), vec![-z0]),
        Node::ExpAbs { gamma, z0 } => env(
            Envelope {
                exp_rate: *gamma,
                ..Default::default()
            },
            vec![-z0],
        ),
        Node::ExpRe(g) => env(
            Envelope {
                lin: CPoint::new(*g, 0.0),
                ..Default::default()
            },
            vec![],
        ),
        Node::Gauss(g) => env(Envelope::gaussian(-g), vec![]),
        Node::Muck(p) => env(Envelope::poly(2.0 * (p - 1.0)), vec![]),
        Node::PowerPure(d) => env(Envelope::poly(2.0 * (d - 1.0)), vec![zero]),
        Node::LogNeg | Node::LogPos => env(Envelope::default(), vec![zero]),
        Node::Product(fs) => {
            let mut e = Envelope::default();
            let mut pts = Vec::new();
            for w in fs {
                e = e.times(w.envelope());
                pts.extend_from_slice(w.singular_points());
            }
            env(e, pts)
        }
        Node::Distort(w, g) => {
            let mut pts = w.singular_points().to_vec();
            pts.push(zero);
            env(w.envelope().times(Envelope::poly(-g)), pts)
        }
        Node::Translate(w, a) => {
            let e = w.envelope();
            let shifted = Envelope {
                lin: e.lin - a.conj() * (2.0 * e.gauss),
                ..e
            };
            env(shifted, w.singular_points().iter().map(|s| s - a).collect())
        }
        Node::Dual(w, p) => env(w.envelope().pow(-1.0 / (p - 1.0)), w.singular_points().to_vec()),
    }
}

fn node_label(node: &Node) -> String {
    match node {
        Node::Constant(c) if *c == 1.0 => "constant".into(),
        Node::Constant(c) => format!("constant:c={c}"),
        Node::Power(g) => format!("power:gamma={g}"),
        Node::ShiftedPower { gamma, z0 } => {
            format!("shifted_power:gamma={gamma},z0={}", format_complex(*z0))
        }
        Node::ExpAbs { gamma, z0 } => format!("exp_abs:gamma={gamma},z0={}", format_complex(*z0)),
        Node::ExpRe(g) => format!("exp_re:gamma={g}"),
        Node::Gauss(g) => format!("gauss:gamma={g}"),
        Node::Muck(p) => format!("muck:p={p}"),
        Node::PowerPure(d) => format!("power_pure:delta={d}"),
        Node::LogNeg => "log_neg".into(),
        Node::LogPos => "log_pos".into(),
        Node::Product(fs) => {
            let parts: Vec<&str> = fs.iter().map(Weight::label).collect();
            format!("product:({})", parts.join(";"))
        }
        Node::Distort(w, g) => format!("{}|distort:{g}", w.label()),
        Node::Translate(w, a) => format!("{}|translate:{}", w.label(), format_complex(*a)),
        Node::Dual(w, p) => format!("{}|dual:{p}", w.label()),
    }
}

/// Applies a distortion, translation or dual transform.
pub fn derive_weight(w: &Weight, mode: Derive) -> Result<Weight> {
    let node = match mode {
        Derive::Distort(g) => {
            ensure_usage!(g.is_finite(), "distortion exponent must be finite");
            Node::Distort(w.clone(), g)
        }
        Derive::Translate(a) => {
            ensure_usage!(a.re.is_finite() && a.im.is_finite(), "translation must be finite");
            Node::Translate(w.clone(), a)
        }
        Derive::Dual(p) => {
            ensure_usage!(p > 1.0 && p.is_finite(), "dual weight needs p > 1, got {p}");
            Node::Dual(w.clone(), p)
        }
    };
    Ok(Weight::build(node))
}

fn real_param(params: &BTreeMap<String, String>, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key) {
        Some(v) => {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| usage(format!("parameter {key}={v:?} is not a real number")))?;
            ensure_usage!(x.is_finite(), "parameter {key} must be finite");
            Ok(x)
        }
        None => default.ok_or_else(|| usage(format!("missing parameter {key}"))),
    }
}

fn complex_param(params: &BTreeMap<String, String>, key: &str) -> Result<CPoint> {
    params
        .get(key)
        .map(|v| parse_complex(v))
        .unwrap_or(Ok(CPoint::new(0.0, 0.0)))
}

/// Builds a catalog weight from a family name and its parameters.
///
/// `product` takes its factors from the `factors` parameter, a `;`-separated
/// list of weight specs.
pub fn make_weight(family: &str, params: &BTreeMap<String, String>) -> Result<Weight> {
    let allowed: &[&str] = match family {
        "constant" => &["c"],
        "power" | "exp_re" | "gauss" => &["gamma"],
        "shifted_power" | "exp_abs" | "exponential_abs" => &["gamma", "z0"],
        "muck" | "muckenhoupt_violating" => &["p"],
        "power_pure" => &["delta"],
        "log_neg" | "log_negative" | "log_pos" | "log_positive" => &[],
        "product" => &["factors"],
        _ => return Err(usage(format!("unknown weight family {family:?}"))),
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(usage(format!("weight family {family} has no parameter {k:?}")));
    }
    let node = match family {
        "constant" => return Weight::constant(real_param(params, "c", Some(1.0))?),
        "power" => Node::Power(real_param(params, "gamma", None)?),
        "exp_re" => Node::ExpRe(real_param(params, "gamma", None)?),
        "gauss" => Node::Gauss(real_param(params, "gamma", None)?),
        "shifted_power" => Node::ShiftedPower {
            gamma: real_param(params, "gamma", None)?,
            z0: complex_param(params, "z0")?,
        },
        "exp_abs" | "exponential_abs" => Node::ExpAbs {
            gamma: real_param(params, "gamma", None)?,
            z0: complex_param(params, "z0")?,
        },
        "muck" | "muckenhoupt_violating" => {
            let p = real_param(params, "p", None)?;
            ensure_usage!(p >= 1.0, "muck weight needs p >= 1, got {p}");
            Node::Muck(p)
        }
        "power_pure" => {
            let d = real_param(params, "delta", None)?;
            ensure_usage!(d > 0.0, "power_pure needs delta > 0 to be locally integrable, got {d}");
            Node::PowerPure(d)
        }
        "log_neg" | "log_negative" => Node::LogNeg,
        "log_pos" | "log_positive" => Node::LogPos,
        "product" => {
            let list = params
                .get("factors")
                .ok_or_else(|| usage("product needs factors"))?;
            let factors = split_top(list, ';')
                .into_iter()
                .map(parse_weight)
                .collect::<Result<Vec<_>>>()?;
            return Weight::product(factors);
        }
        _ => unreachable!(),
    };
    Ok(Weight::build(node))
}

/// Splits on `sep` outside parentheses.
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
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses the weight mini-language.
pub fn parse_weight(spec: &str) -> Result<Weight> {
    let spec = spec.trim();
    ensure_usage!(!spec.is_empty(), "empty weight spec");
    let mut depth = 0i32;
    for c in spec.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        ensure_usage!(depth >= 0, "unbalanced parentheses in weight spec {spec:?}");
    }
    ensure_usage!(depth == 0, "unbalanced parentheses in weight spec {spec:?}");

    let mut pieces = split_top(spec, '|').into_iter();
    let base = pieces.next().unwrap_or_default().trim();
    let mut w = parse_base(base)?;
    for t in pieces {
        let (name, arg) = t
            .trim()
            .split_once(':')
            .ok_or_else(|| usage(format!("transform {t:?} needs an argument")))?;
        let real = || -> Result<f64> {
            arg.trim()
                .parse()
                .map_err(|_| usage(format!("bad transform argument {arg:?}")))
        };
        let mode = match name.trim() {
            "distort" => Derive::Distort(real()?),
            "translate" => Derive::Translate(parse_complex(arg)?),
            "dual" => Derive::Dual(real()?),
            other => return Err(usage(format!("unknown weight transform {other:?}"))),
        };
        w = derive_weight(&w, mode)?;
    }
    Ok(w)
}

fn parse_base(s: &str) -> Result<Weight> {
    let (family, rest) = match s.split_once(':') {
        Some((f, r)) => (f.trim(), r.trim()),
        None => (s, ""),
    };
    let mut params = BTreeMap::new();
    if family == "product" {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| usage("product factors must be written as (spec;spec)"))?;
        params.insert("factors".to_string(), inner.to_string());
    } else if !rest.is_empty() {
        for kv in rest.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("expected key=value, got {kv:?}")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    make_weight(family, &params)
}

/// `w(E)` for a square or disc `E`.
pub fn weight_measure(w: &Weight, region: &Region, spec: &QuadSpec) -> Result<f64> {
    Ok(integrate_region(|z| w.eval(z), region, w.singular_points(), spec)?.value)
}
