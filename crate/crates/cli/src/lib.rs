//! Batch experiment runner for `focklab`.
//!
//! An [`ExperimentConfig`] names one experiment and carries its objects (in
//! the weight, function and measure mini-languages), numeric parameters and
//! quadrature policy. [`run_experiment`] evaluates every case of the
//! experiment and [`write_report`] stores a JSON report and a CSV table next
//! to each other, each written to a temporary file and renamed into place.

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use focklab::apclass::{ap_constant, berezin, berezin_sup_condition, kt_check, lattice_comparability};
use focklab::carleson_mult::{
    carleson_diagnose_with, mult_classify, multiplier_empirical_norm, multiplier_reducer, parse_measure,
    PositiveMeasure, DIAGNOSE_RADII,
};
use focklab::fockcore::{
    fock_norm, kernel_norm_check, lp_ratio, lp_test_family, parse_entire, remainder_check, EntireFn,
    FockParams,
};
use focklab::quadcore::{CPoint, QuadSpec, Region};
use focklab::weights::{format_complex, parse_complex, parse_weight, Weight};
use focklab::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Errors that stop a run before any report is written.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or arguments (exit code 2).
    Usage(String),
    /// Reading the config or writing a report failed.
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn lib_usage(e: Error) -> CliError {
    match e {
        Error::Usage(m) => CliError::Usage(m),
        other => CliError::Usage(other.to_string()),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for the reports; the working directory when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// File stem of the reports; the experiment name when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

/// One experiment run. Points and square centres use the complex number
/// syntax of the mini-languages (`1.5-2i`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squares: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_radii: Option<Vec<f64>>,
    #[serde(default)]
    pub quad: QuadSpec,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, CliError> {
        toml::from_str(text).map_err(|e| usage(format!("bad config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialise to TOML")
    }

    /// Checks the experiment name, required parameters, positivity and the
    /// object specs.
    pub fn validate(&self) -> Result<(), CliError> {
        let info = experiment_info(&self.experiment)?;
        for key in info.required {
            if !self.has(key) {
                return Err(usage(format!("experiment {} needs `{key}`", info.name)));
            }
        }
        for (key, v) in [
            ("p", self.p),
            ("q", self.q),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("r", self.r),
            ("search_radius", self.search_radius),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(usage(format!("`{key}` must be positive, got {v}")));
                }
            }
        }
        if let Some(radii) = &self.grid_radii {
            if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                return Err(usage("`grid_radii` must be a nonempty list of positive radii"));
            }
        }
        self.quad.validate().map_err(lib_usage)?;
        if let Some(s) = &self.weight {
            parse_weight(s).map_err(lib_usage)?;
        }
        if let Some(s) = &self.eta {
            parse_weight(s).map_err(lib_usage)?;
        }
        if let Some(s) = &self.function {
            parse_entire(s).map_err(lib_usage)?;
        }
        if let Some(s) = &self.measure {
            parse_measure(s).map_err(lib_usage)?;
        }
        for s in self.points.iter().chain(&self.squares).flatten() {
            parse_complex(s).map_err(lib_usage)?;
        }
        if self.experiment == "lattice-ratio" && self.points.as_ref().is_some_and(|p| p.len() < 2) {
            return Err(usage("lattice-ratio needs at least two points"));
        }
        Ok(())
    }

    fn has(&self, key: &str) -> bool {
        match key {
            "weight" => self.weight.is_some(),
            "function" => self.function.is_some(),
            "measure" => self.measure.is_some(),
            "eta" => self.eta.is_some(),
            "p" => self.p.is_some(),
            "q" => self.q.is_some(),
            "alpha" => self.alpha.is_some(),
            "beta" => self.beta.is_some(),
            "gamma" => self.gamma.is_some(),
            "r" => self.r.is_some(),
            "n" => self.n.is_some(),
            "k" => self.k.is_some(),
            "points" => self.points.is_some(),
            "squares" => self.squares.is_some(),
            "search_radius" => self.search_radius.is_some(),
            "grid_radii" => self.grid_radii.is_some(),
            _ => false,
        }
    }
}

/// Manifest entry of one experiment.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub required: &'static [&'static str],
    pub optional: &'static [&'static str],
    /// A complete TOML config.
    pub example: &'static str,
}

pub const EXPERIMENTS: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "ap-constant",
        summary: "sup of the A_p quotient over squares of side r centred within search_radius",
        required: &["weight", "p", "r"],
        optional: &["search_radius (2)"],
        example: "experiment = \"ap-constant\"\nweight = \"constant\"\np = 2.0\nr = 1.0\n",
    },
    ExperimentInfo {
        name: "berezin",
        summary: "Berezin transform of the weight at each point",
        required: &["weight", "alpha", "points"],
        optional: &[],
        example: "experiment = \"berezin\"\nweight = \"exp_abs:gamma=1\"\nalpha = 1.0\npoints = [\"0\", \"2+1i\"]\n",
    },
    ExperimentInfo {
        name: "berezin-sup",
        summary: "sup of the Berezin A_p condition over a grid of spacing 1/4",
        required: &["weight", "p", "alpha"],
        optional: &["gamma (alpha)", "search_radius (5)"],
        example: "experiment = \"berezin-sup\"\nweight = \"power:gamma=2\"\np = 2.0\nalpha = 1.0\nsearch_radius = 2.0\n",
    },
    ExperimentInfo {
        name: "kt-check",
        summary: "largest Kerman-Torchinsky exponent delta found feasible on squares of side r",
        required: &["weight", "r"],
        optional: &["squares ([\"0\"])", "seed (0)"],
        example: "experiment = \"kt-check\"\nweight = \"exp_re:gamma=1\"\nr = 1.0\nsquares = [\"0\", \"3-2i\"]\n",
    },
    ExperimentInfo {
        name: "lattice-ratio",
        summary: "mass ratio of lattice squares Q_r(points[0]) against Q_r(points[j])",
        required: &["weight", "r", "points"],
        optional: &[],
        example: "experiment = \"lattice-ratio\"\nweight = \"exp_abs:gamma=1\"\nr = 1.0\npoints = [\"0\", \"3\", \"2+2i\"]\n",
    },
    ExperimentInfo {
        name: "fock-norm",
        summary: "weighted Fock norm, or Fock-Sobolev norm of order k",
        required: &["function", "weight", "p", "alpha"],
        optional: &["k (0)", "normalized (false)"],
        example: "experiment = \"fock-norm\"\nfunction = \"poly:1\"\nweight = \"constant\"\np = 2.0\nalpha = 2.0\n",
    },
    ExperimentInfo {
        name: "lp-ratio",
        summary: "Littlewood-Paley ratio for one function, or the seeded test family",
        required: &["weight", "p", "alpha", "k"],
        optional: &["function (test family)", "seed (0)"],
        example: "experiment = \"lp-ratio\"\nfunction = \"monomial:3\"\nweight = \"power:gamma=2\"\np = 2.0\nalpha = 1.0\nk = 1\n",
    },
    ExperimentInfo {
        name: "kernel-norm",
        summary: "kernel norm against e^{p alpha |a|^2/2} w(D(a,1)) at each point a",
        required: &["weight", "p", "alpha", "points"],
        optional: &[],
        example: "experiment = \"kernel-norm\"\nweight = \"power:gamma=-3\"\np = 1.0\nalpha = 1.0\npoints = [\"0\", \"2\", \"3+4i\"]\n",
    },
    ExperimentInfo {
        name: "remainder",
        summary: "representation remainder R_2k against f - T_{2k-1} f at each point",
        required: &["function", "k", "alpha", "points"],
        optional: &[],
        example: "experiment = \"remainder\"\nfunction = \"kernel:alpha=1,a=1\"\nk = 1\nalpha = 1.0\npoints = [\"0\", \"1\", \"1+1i\"]\n",
    },
    ExperimentInfo {
        name: "carleson",
        summary: "Carleson condition value, kernel-test norm and verdict over growing grids",
        required: &["measure", "weight", "p", "q", "alpha"],
        optional: &["n (0)", "grid_radii ([2, 4, 6])"],
        example: "experiment = \"carleson\"\nmeasure = \"density:weight=constant,gauss=-1\"\nweight = \"constant\"\np = 2.0\nq = 2.0\nalpha = 1.0\ngrid_radii = [1.0, 2.0]\n",
    },
    ExperimentInfo {
        name: "multiplier",
        summary: "multiplier condition reducer per grid radius and the kernel-test multiplier norm",
        required: &["function", "weight", "p", "q", "alpha", "beta"],
        optional: &["eta (weight)", "grid_radii ([2, 4, 6])"],
        example: "experiment = \"multiplier\"\nfunction = \"poly:1.5\"\nweight = \"constant\"\np = 2.0\nq = 2.0\nalpha = 1.0\nbeta = 1.0\ngrid_radii = [1.0, 2.0]\n",
    },
    ExperimentInfo {
        name: "classify",
        summary: "multiplier class for (p, q, alpha, beta); checks a function against it when given",
        required: &["p", "q", "alpha", "beta"],
        optional: &["function", "weight (constant)", "search_radius (4)"],
        example: "experiment = \"classify\"\np = 1.0\nq = 2.0\nalpha = 1.0\nbeta = 1.0\n",
    },
];

pub fn experiment_info(name: &str) -> Result<&'static ExperimentInfo, CliError> {
    EXPERIMENTS.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = EXPERIMENTS.iter().map(|e| e.name).collect();
        usage(format!("unknown experiment `{name}` (known: {})", names.join(", ")))
    })
}

const WEIGHT_GRAMMAR: &str = "\
constant | constant:c=C
power:gamma=G                (1+|z|)^G
shifted_power:gamma=G,z0=Z   (1+|z+Z|)^G
exp_abs:gamma=G,z0=Z         e^{G|z+Z|}
exp_re:gamma=G               e^{G Re z}
gauss:gamma=G                e^{G|z|^2}
muck:p=P                     (1+|z|^2)^{P-1}
power_pure:delta=D           |z|^{2(D-1)}
log_neg                      |z|^-2 (log 1/|z|)^-2 near 0
log_pos                      |z|^2 (log 1/|z|)^2 near 0
product:(SPEC;SPEC;...)
SPEC|distort:G   SPEC|translate:Z   SPEC|dual:P";

const FUNCTION_GRAMMAR: &str = "\
poly:c0,c1,...               c0 + c1 z + ...
monomial:m                   z^m
kernel:alpha=A,a=Z           e^{A conj(Z) z}
sum:(SPEC;SPEC;...)";

const MEASURE_GRAMMAR: &str = "\
atoms:(Z:m;Z:m;...)                              point masses
density:weight=WSPEC,gauss=G                     w(z) e^{G|z|^2} dA, G < 0
mu_g:g=FSPEC,q=Q,beta=B,eta=WSPEC                |g|^Q e^{-Q B|z|^2/2} eta dA";

/// Experiments, their parameters and example configs, and the object
/// mini-languages.
pub fn emit_manifest() -> String {
    let mut out = String::from("focklab experiments\n\n");
    for e in EXPERIMENTS {
        out.push_str(&format!("{}\n  {}\n", e.name, e.summary));
        out.push_str(&format!("  required: {}\n", e.required.join(", ")));
        if !e.optional.is_empty() {
            out.push_str(&format!("  optional: {}\n", e.optional.join(", ")));
        }
        out.push_str("  example:\n");
        for line in e.example.lines() {
            out.push_str(&format!("    {line}\n"));
        }
        out.push('\n');
    }
    out.push_str("common keys: seed (0), [quad] rel_tol abs_tol base_tile max_refine truncation_margin, [output] dir stem\n\n");
    out.push_str("weights (weight, eta):\n");
    for line in WEIGHT_GRAMMAR.lines() {
        out.push_str(&format!("  {line}\n"));
    }
    out.push_str("\nfunctions (function):\n");
    for line in FUNCTION_GRAMMAR.lines() {
        out.push_str(&format!("  {line}\n"));
    }
    out.push_str("\nmeasures (measure):\n");
    for line in MEASURE_GRAMMAR.lines() {
        out.push_str(&format!("  {line}\n"));
    }
    out
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub case: String,
    pub inputs: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub value: f64,
    /// Refinement passes behind the value, where the experiment has them.
    pub levels: Option<usize>,
    /// Change of the value when the tolerance is tightened tenfold.
    pub error: Option<f64>,
    pub verdict: String,
    pub quad: String,
    /// Refinement evidence; JSON only.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub trace: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub quad_fingerprint: String,
    pub failures: usize,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise to JSON");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["case", "inputs", "lhs", "rhs", "value", "levels", "error", "verdict", "quad"])
            .expect("in-memory write");
        let num = |v: Option<f64>| v.map(sci).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.case.clone(),
                r.inputs.clone(),
                num(r.lhs),
                num(r.rhs),
                sci(r.value),
                r.levels.map(|l| l.to_string()).unwrap_or_default(),
                num(r.error),
                r.verdict.clone(),
                r.quad.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

/// 17 significant digits.
fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

struct Measured {
    lhs: Option<f64>,
    rhs: Option<f64>,
    value: f64,
    verdict: String,
    levels: Option<usize>,
    error: Option<f64>,
    trace: Value,
}

impl Measured {
    fn value(value: f64) -> Measured {
        Measured {
            lhs: None,
            rhs: None,
            value,
            verdict: String::new(),
            levels: None,
            error: None,
            trace: Value::Null,
        }
    }

    fn sides(lhs: f64, rhs: f64, value: f64) -> Measured {
        Measured {
            lhs: Some(lhs),
            rhs: Some(rhs),
            ..Measured::value(value)
        }
    }

    fn verdict(mut self, v: impl Into<String>) -> Measured {
        self.verdict = v.into();
        self
    }
}

type Eval<'a> = Box<dyn Fn(&QuadSpec) -> focklab::Result<Measured> + Sync + 'a>;

struct Case<'a> {
    id: String,
    inputs: String,
    /// Re-run at a tenfold tighter tolerance to estimate the error.
    refine: bool,
    eval: Eval<'a>,
}

fn case<'a>(
    id: impl Into<String>,
    inputs: impl Into<String>,
    refine: bool,
    eval: impl Fn(&QuadSpec) -> focklab::Result<Measured> + Sync + 'a,
) -> Case<'a> {
    Case {
        id: id.into(),
        inputs: inputs.into(),
        refine,
        eval: Box::new(eval),
    }
}

struct Objects {
    weight: Option<Weight>,
    eta: Option<Weight>,
    function: Option<EntireFn>,
    measure: Option<PositiveMeasure>,
    points: Vec<CPoint>,
    squares: Vec<CPoint>,
}

fn objects(c: &ExperimentConfig) -> Result<Objects, CliError> {
    let pts = |v: &Option<Vec<String>>| -> Result<Vec<CPoint>, CliError> {
        v.iter().flatten().map(|s| parse_complex(s).map_err(lib_usage)).collect()
    };
    Ok(Objects {
        weight: c.weight.as_deref().map(parse_weight).transpose().map_err(lib_usage)?,
        eta: c.eta.as_deref().map(parse_weight).transpose().map_err(lib_usage)?,
        function: c.function.as_deref().map(parse_entire).transpose().map_err(lib_usage)?,
        measure: c.measure.as_deref().map(parse_measure).transpose().map_err(lib_usage)?,
        points: pts(&c.points)?,
        squares: pts(&c.squares)?,
    })
}

/// Runs every case of the configured experiment. Numerical failures become
/// failure rows; usage errors abort the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let o = objects(config)?;
    let cases = build_cases(config, &o)?;
    let spec = config.quad;
    let fine = spec.with_rel_tol(spec.rel_tol / 10.0);
    let fingerprint = spec.fingerprint();
    let mut rows = Vec::new();
    let mut failures = 0;
    for c in &cases {
        let result = (c.eval)(&spec).and_then(|mut m| {
            if c.refine && m.error.is_none() {
                let f = (c.eval)(&fine)?;
                m.error = Some((m.value - f.value).abs());
            }
            Ok(m)
        });
        let row = match result {
            Ok(m) => ReportRow {
                case: c.id.clone(),
                inputs: c.inputs.clone(),
                lhs: m.lhs,
                rhs: m.rhs,
                value: m.value,
                levels: m.levels,
                error: m.error,
                verdict: m.verdict,
                quad: fingerprint.clone(),
                trace: m.trace,
            },
            Err(Error::Usage(msg)) => return Err(CliError::Usage(msg)),
            Err(Error::Numerical(n)) => {
                failures += 1;
                ReportRow {
                    case: c.id.clone(),
                    inputs: c.inputs.clone(),
                    lhs: None,
                    rhs: None,
                    value: n.estimate,
                    levels: Some(n.trace.len()),
                    error: Some(n.error_bound),
                    verdict: if n.diverging { "diverging".into() } else { "failed".into() },
                    quad: fingerprint.clone(),
                    trace: json!({ "message": n.message, "estimates": n.trace }),
                }
            }
        };
        rows.push(row);
    }
    Ok(Report {
        config: config.clone(),
        quad_fingerprint: fingerprint,
        failures,
        rows,
    })
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| usage(format!("missing `{name}`")))
}

fn build_cases<'a>(c: &'a ExperimentConfig, o: &'a Objects) -> Result<Vec<Case<'a>>, CliError> {
    let weight = || o.weight.clone().unwrap_or_else(Weight::one);
    let mut cases = Vec::new();
    match c.experiment.as_str() {
        "ap-constant" => {
            let (w, p, r) = (weight(), need(&c.p, "p")?, need(&c.r, "r")?);
            let search = c.search_radius.unwrap_or(2.0);
            cases.push(case("ap", format!("{} p={p} r={r} search_radius={search}", w.label()), true, move |s| {
                let rep = ap_constant(&w, p, r, search, s)?;
                let mut m = Measured::value(rep.constant_estimate)
                    .verdict(if rep.infinite { "infinite" } else { "finite" });
                m.levels = Some(rep.refinement_trace.len());
                m.trace = serde_json::to_value(&rep).expect("plain data");
                Ok(m)
            }));
        }
        "berezin" => {
            let alpha = need(&c.alpha, "alpha")?;
            for (i, &z) in o.points.iter().enumerate() {
                let w = weight();
                let inputs = format!("{} alpha={alpha} z={}", w.label(), format_complex(z));
                cases.push(case(format!("z{i}"), inputs, true, move |s| {
                    let b = berezin(&w, alpha, z, s)?;
                    Ok(Measured::sides(b, w.eval(z), b / w.eval(z)))
                }));
            }
        }
        "berezin-sup" => {
            let (w, p, alpha) = (weight(), need(&c.p, "p")?, need(&c.alpha, "alpha")?);
            let gamma = c.gamma.unwrap_or(alpha);
            let radius = c.search_radius.unwrap_or(5.0);
            let inputs = format!("{} p={p} alpha={alpha} gamma={gamma} grid_radius={radius}", w.label());
            cases.push(case("sup", inputs, true, move |s| {
                let rep = berezin_sup_condition(&w, p, alpha, gamma, radius, s)?;
                let mut m = Measured::value(rep.value);
                m.levels = Some(rep.trace.len());
                m.trace = serde_json::to_value(&rep).expect("plain data");
                Ok(m)
            }));
        }
        "kt-check" => {
            let (w, r) = (weight(), need(&c.r, "r")?);
            let centres = if o.squares.is_empty() { vec![CPoint::new(0.0, 0.0)] } else { o.squares.clone() };
            let squares: Vec<Region> = centres
                .iter()
                .map(|&z| Region::square(z, r))
                .collect::<focklab::Result<_>>()
                .map_err(lib_usage)?;
            let seed = c.seed;
            let inputs = format!("{} r={r} squares={} seed={seed}", w.label(), centres.len());
            cases.push(case("kt", inputs, false, move |s| {
                let rep = kt_check(&w, r, &squares, seed, s)?;
                let mut m = Measured::value(rep.delta.unwrap_or(f64::NAN))
                    .verdict(if rep.delta.is_some() { "feasible" } else { "infeasible" });
                m.rhs = rep.c_r;
                m.trace = serde_json::to_value(&rep).expect("plain data");
                Ok(m)
            }));
        }
        "lattice-ratio" => {
            let r = need(&c.r, "r")?;
            let nu = o.points[0];
            for (i, &other) in o.points.iter().enumerate().skip(1) {
                let w = weight();
                let inputs = format!("{} r={r} nu={} nu'={}", w.label(), format_complex(nu), format_complex(other));
                cases.push(case(format!("pair{i}"), inputs, true, move |s| {
                    let (ratio, m) = lattice_comparability(&w, r, nu, other, s)?;
                    Ok(Measured::sides(ratio, m, ratio))
                }));
            }
        }
        "fock-norm" => {
            let (f, w) = (need(&o.function, "function")?, weight());
            let params = FockParams::new(need(&c.p, "p")?, need(&c.alpha, "alpha")?)
                .map_err(lib_usage)?
                .with_order(c.k.unwrap_or(0))
                .normalized(c.normalized.unwrap_or(false));
            let inputs = format!("f={f} {} p={} alpha={} k={}", w.label(), params.p, params.alpha, params.k);
            cases.push(case("norm", inputs, true, move |s| Ok(Measured::value(fock_norm(&f, &params, &w, s)?))));
        }
        "lp-ratio" => {
            let (p, alpha, k) = (need(&c.p, "p")?, need(&c.alpha, "alpha")?, need(&c.k, "k")?);
            let params = FockParams::new(p, alpha).map_err(lib_usage)?.with_order(k);
            params.validate().map_err(lib_usage)?;
            let family = match &o.function {
                Some(f) => vec![(f.to_string(), f.clone())],
                None => lp_test_family(alpha, c.seed),
            };
            for (name, f) in family {
                let w = weight();
                let inputs = format!("f={f} {} p={p} alpha={alpha} k={k}", w.label());
                cases.push(case(name, inputs, true, move |s| {
                    let r = lp_ratio(&f, &params, &w, s)?;
                    Ok(Measured::sides(r.lhs, r.rhs, r.ratio))
                }));
            }
        }
        "kernel-norm" => {
            let params = FockParams::new(need(&c.p, "p")?, need(&c.alpha, "alpha")?).map_err(lib_usage)?;
            for (i, &a) in o.points.iter().enumerate() {
                let w = weight();
                let inputs = format!("{} p={} alpha={} a={}", w.label(), params.p, params.alpha, format_complex(a));
                cases.push(case(format!("a{i}"), inputs, true, move |s| {
                    let r = kernel_norm_check(a, &params, &w, s)?;
                    Ok(Measured::sides(r.lhs, r.rhs, r.ratio))
                }));
            }
        }
        "remainder" => {
            let (f, k, alpha) = (need(&o.function, "function")?, need(&c.k, "k")?, need(&c.alpha, "alpha")?);
            if k == 0 {
                return Err(usage("remainder needs k >= 1"));
            }
            for (i, &z) in o.points.iter().enumerate() {
                let f = f.clone();
                let inputs = format!("f={f} k={k} alpha={alpha} z={}", format_complex(z));
                cases.push(case(format!("z{i}"), inputs, false, move |s| {
                    let (lhs, rhs, err) = remainder_check(&f, k, alpha, z, s)?;
                    let mut m = Measured::sides(lhs.norm(), rhs.norm(), err);
                    m.trace = json!({ "lhs": [lhs.re, lhs.im], "rhs": [rhs.re, rhs.im] });
                    Ok(m)
                }));
            }
        }
        "carleson" => {
            let mu = need(&o.measure, "measure")?;
            let w = weight();
            let (p, q, alpha) = (need(&c.p, "p")?, need(&c.q, "q")?, need(&c.alpha, "alpha")?);
            let n = c.n.unwrap_or(0);
            let radii = c.grid_radii.clone().unwrap_or(DIAGNOSE_RADII.to_vec());
            let inputs = format!("mu={mu} {} p={p} q={q} alpha={alpha} n={n}", w.label());
            cases.push(case("carleson", inputs, false, move |s| {
                let rep = carleson_diagnose_with(&mu, p, q, alpha, &w, n, &radii, s)?;
                let mut m = Measured::sides(rep.condition_value, rep.empirical_norm, rep.condition_value)
                    .verdict(rep.verdict.to_string());
                m.levels = Some(rep.trace.len());
                m.error = Some((rep.condition_value - rep.refined_condition).abs());
                m.trace = serde_json::to_value(&rep).expect("plain data");
                Ok(m)
            }));
        }
        "multiplier" => {
            let g = need(&o.function, "function")?;
            let w = weight();
            let eta = o.eta.clone().unwrap_or_else(|| w.clone());
            let (p, q) = (need(&c.p, "p")?, need(&c.q, "q")?);
            let (alpha, beta) = (need(&c.alpha, "alpha")?, need(&c.beta, "beta")?);
            let radii = c.grid_radii.clone().unwrap_or(DIAGNOSE_RADII.to_vec());
            let base = format!("g={g} {} eta={} p={p} q={q} alpha={alpha} beta={beta}", w.label(), eta.label());
            for &r in &radii {
                let (g, w, eta) = (g.clone(), w.clone(), eta.clone());
                cases.push(case(format!("reducer_r{r}"), format!("{base} grid_radius={r}"), true, move |s| {
                    Ok(Measured::value(multiplier_reducer(&g, p, q, alpha, beta, &w, &eta, r, s)?))
                }));
            }
            let rmax = radii.iter().copied().fold(0.0, f64::max);
            cases.push(case("empirical", format!("{base} kernel_radius={rmax}"), true, move |s| {
                Ok(Measured::value(multiplier_empirical_norm(&g, p, q, alpha, beta, &w, &eta, rmax, s)?))
            }));
        }
        "classify" => {
            let (p, q) = (need(&c.p, "p")?, need(&c.q, "q")?);
            let (alpha, beta) = (need(&c.alpha, "alpha")?, need(&c.beta, "beta")?);
            let class = mult_classify(p, q, alpha, beta).map_err(lib_usage)?;
            let kind = serde_json::to_value(class.verdict).expect("plain data")["kind"]
                .as_str()
                .unwrap_or_default()
                .to_string();
            let inputs = format!("p={p} q={q} alpha={alpha} beta={beta}");
            let c2 = class.clone();
            let k2 = kind.clone();
            cases.push(case("class", inputs.clone(), false, move |_| {
                let mut m = Measured::value(f64::NAN).verdict(k2.clone());
                m.trace = serde_json::to_value(&c2).expect("plain data");
                Ok(m)
            }));
            if let Some(g) = o.function.clone() {
                let w = weight();
                let radius = c.search_radius.unwrap_or(4.0);
                let inputs = format!("{inputs} g={g} {} radius={radius}", w.label());
                cases.push(case("check", inputs, true, move |s| {
                    Ok(Measured::value(class.check(&g, &w, radius, s)?).verdict(kind.clone()))
                }));
            }
        }
        other => return Err(usage(format!("unknown experiment `{other}`"))),
    }
    Ok(cases)
}

/// Paths of the two report files.
pub fn report_paths(config: &ExperimentConfig) -> (PathBuf, PathBuf) {
    let dir = config.output.dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let stem = config.output.stem.clone().unwrap_or_else(|| config.experiment.clone());
    (dir.join(format!("{stem}.json")), dir.join(format!("{stem}.csv")))
}

/// Writes `contents` to a temporary file in the target directory and renames
/// it over `path`, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// Writes the JSON report and CSV table; returns their paths.
pub fn write_report(report: &Report) -> Result<(PathBuf, PathBuf), CliError> {
    let (json_path, csv_path) = report_paths(&report.config);
    write_atomic(&json_path, &report.to_json())?;
    write_atomic(&csv_path, &report.to_csv())?;
    Ok((json_path, csv_path))
}
