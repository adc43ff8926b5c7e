use std::fmt::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use convex_shape::decompose::{self, Decomposition, QuotientMin};
use convex_shape::infconv::{self, LqCollapse, RecessionIdentityReport, TruncationReport};
use convex_shape::linalg::unit_coordinate;
use convex_shape::oracle::{self, RayReport};
use convex_shape::sample::{uniform_vector, unit_vector};
use convex_shape::{shape, Error, FunctionSpec, ShapeReport, VPolytope};

use crate::render::{self, num, vector};
use crate::Settings;

pub struct Output {
    pub text: String,
    pub code: u8,
}

#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. }
            | Error::NoPieces
            | Error::NoGenerators
            | Error::NonFinite(_)
            | Error::ZeroDirection
            | Error::InvalidArgument(_)
            | Error::CertificateNotRelativeInterior => 2,
            _ => 3,
        };
        Failure {
            message: e.to_string(),
            code,
        }
    }
}

type Outcome = Result<Output, Failure>;

/// Comma-separated vector argument such as `"1, -2.5,3"`.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv(pub Vec<f64>);

impl std::str::FromStr for Csv {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_vector(s).map(Csv)
    }
}

fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            let v: f64 = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{p}` is not finite"))
            }
        })
        .collect()
}

fn load(path: &Path) -> Result<FunctionSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    FunctionSpec::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn rng_for(settings: &Settings, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    rng.set_stream(stream);
    rng
}

#[derive(Serialize)]
struct AnalyzeDoc {
    path: String,
    kind: &'static str,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape: Option<ShapeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient_min: Option<QuotientMin>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleSummary>,
}

/// Sampled findings for functions known only through evaluation.
#[derive(Serialize)]
struct OracleSummary {
    axis_recession: Vec<AxisRecession>,
    random_directions: usize,
    constant_random_directions: usize,
}

#[derive(Serialize)]
struct AxisRecession {
    axis: usize,
    #[serde(with = "convex_shape::format::extended")]
    plus: f64,
    #[serde(with = "convex_shape::format::extended")]
    minus: f64,
    constant_line: bool,
}

const SUMMARY_DIRECTIONS: usize = 20;

fn summarize_oracle(spec: &FunctionSpec, settings: &Settings, stream: u64) -> Result<OracleSummary, Failure> {
    let o = spec.oracle();
    let n = spec.dim();
    let base = o.base_point();
    let mut axis_recession = Vec::with_capacity(n);
    for k in 0..n {
        let e = unit_coordinate(n, k);
        let minus: Vec<f64> = e.iter().map(|v| -v).collect();
        axis_recession.push(AxisRecession {
            axis: k,
            plus: oracle::estimate_recession(&o, &e, oracle::LINE_HORIZON)?,
            minus: oracle::estimate_recession(&o, &minus, oracle::LINE_HORIZON)?,
            constant_line: oracle::is_constant_on_line(&o, &base, &e)?,
        });
    }
    let mut rng = rng_for(settings, stream);
    let mut constant = 0;
    for _ in 0..SUMMARY_DIRECTIONS {
        let u = unit_vector(&mut rng, n);
        if oracle::is_constant_on_line(&o, &base, &u)? {
            constant += 1;
        }
    }
    Ok(OracleSummary {
        axis_recession,
        random_directions: SUMMARY_DIRECTIONS,
        constant_random_directions: constant,
    })
}

fn analyze_one(path: &Path, settings: &Settings, stream: u64) -> Result<AnalyzeDoc, Failure> {
    let spec = load(path)?;
    let mut doc = AnalyzeDoc {
        path: path.display().to_string(),
        kind: spec.kind(),
        dim: spec.dim(),
        shape: None,
        quotient_min: None,
        oracle: None,
    };
    match spec.as_max_affine() {
        Some(f) => {
            let report = shape::analyze(f)?;
            doc.quotient_min = Some(decompose::quotient_min(f, &report.essential_certificate)?);
            doc.shape = Some(report);
        }
        None => doc.oracle = Some(summarize_oracle(&spec, settings, stream)?),
    }
    Ok(doc)
}

fn render_analyze(out: &mut String, doc: &AnalyzeDoc) {
    let _ = writeln!(out, "{} ({}, dim {})", doc.path, doc.kind, doc.dim);
    if let (Some(s), Some(q)) = (&doc.shape, &doc.quotient_min) {
        render::shape(out, s, q);
    }
    if let Some(o) = &doc.oracle {
        for a in &o.axis_recession {
            let _ = writeln!(
                out,
                "  recession along ±e_{}: {} / {}{}",
                a.axis + 1,
                num(a.plus),
                num(a.minus),
                if a.constant_line { " (constant line)" } else { "" }
            );
        }
        let _ = writeln!(
            out,
            "  constant lines among {} random directions: {}",
            o.random_directions, o.constant_random_directions
        );
    }
}

pub fn analyze(paths: &[PathBuf], settings: &Settings) -> Outcome {
    let results: Vec<Result<AnalyzeDoc, Failure>> = paths
        .par_iter()
        .enumerate()
        .map(|(i, p)| analyze_one(p, settings, i as u64))
        .collect();
    let mut docs = Vec::new();
    let mut code = 0;
    for (p, r) in paths.iter().zip(results) {
        match r {
            Ok(d) => docs.push(d),
            Err(e) => {
                eprintln!("error: {}: {}", p.display(), e.message);
                code = code.max(e.code);
            }
        }
    }
    let text = if settings.json {
        if paths.len() == 1 {
            docs.first().map(json).unwrap_or_default()
        } else {
            json(&docs)
        }
    } else {
        let mut out = String::new();
        for d in &docs {
            render_analyze(&mut out, d);
        }
        out
    };
    Ok(Output { text, code })
}

#[derive(Serialize)]
struct DecomposeDoc {
    path: String,
    #[serde(flatten)]
    decomposition: Decomposition,
    residual: f64,
    residual_points: usize,
    tolerance: f64,
    passed: bool,
}

const RESIDUAL_POINTS: usize = 1000;

pub fn decompose(path: &Path, certificate: Option<&[f64]>, settings: &Settings) -> Outcome {
    let spec = load(path)?;
    let f = spec
        .as_max_affine()
        .ok_or_else(|| Failure::input(format!("decompose needs a max_affine document, got {}", spec.kind())))?;
    let d = match certificate {
        Some(c) => decompose::decompose_with_certificate(f, c)?,
        None => decompose::decompose_hilbert(f),
    };
    let mut rng = rng_for(settings, 0);
    let points: Vec<Vec<f64>> = (0..RESIDUAL_POINTS)
        .map(|_| uniform_vector(&mut rng, f.dim(), -10.0, 10.0))
        .collect();
    let residual = d.residual(f, &points)?;
    let passed = residual <= settings.tolerance;
    let doc = DecomposeDoc {
        path: path.display().to_string(),
        decomposition: d,
        residual,
        residual_points: RESIDUAL_POINTS,
        tolerance: settings.tolerance,
        passed,
    };
    let text = if settings.json {
        json(&doc)
    } else {
        let mut out = format!("{}\n", doc.path);
        render::decomposition(&mut out, &doc.decomposition);
        let _ = writeln!(
            out,
            "  reconstruction residual: {} over {} points ({})",
            num(residual),
            RESIDUAL_POINTS,
            if passed { "ok" } else { "exceeds tolerance" }
        );
        out
    };
    if !passed {
        eprintln!(
            "error: reconstruction residual {} exceeds tolerance {}",
            num(residual),
            num(settings.tolerance)
        );
    }
    Ok(Output {
        text,
        code: if passed { 0 } else { 3 },
    })
}

#[derive(Serialize)]
struct RayDoc {
    path: String,
    x: Vec<f64>,
    u: Vec<f64>,
    #[serde(flatten)]
    report: RayReport,
    #[serde(with = "convex_shape::format::extended")]
    recession_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_recession: Option<f64>,
    bounded_above: bool,
    clause: &'static str,
}

const BOUNDED: &str = "f_inf(u) <= 0: f is bounded above on x + t u, t >= 0, and on every parallel ray";
const UNBOUNDED: &str = "f_inf(u) > 0: f(x + t u) -> +inf as t -> +inf, on every parallel ray";

pub fn ray(path: &Path, x: &[f64], u: &[f64], settings: &Settings) -> Outcome {
    let spec = load(path)?;
    let o = spec.oracle();
    let report = oracle::classify_ray(&o, x, u)?;
    let recession_estimate = oracle::estimate_recession_from(&o, x, u, oracle::LINE_HORIZON)?;
    let exact_recession = match spec.as_max_affine() {
        Some(f) => Some(f.recession().eval(u)?),
        None => None,
    };
    let verdict = exact_recession.unwrap_or(recession_estimate);
    let bounded_above = verdict <= settings.tolerance;
    let doc = RayDoc {
        path: path.display().to_string(),
        x: x.to_vec(),
        u: u.to_vec(),
        report,
        recession_estimate,
        exact_recession,
        bounded_above,
        clause: if bounded_above { BOUNDED } else { UNBOUNDED },
    };
    let text = if settings.json {
        json(&doc)
    } else {
        let mut out = String::new();
        let _ = writeln!(out, "{} along x = {}, u = {}", doc.path, vector(x), vector(u));
        let _ = writeln!(out, "  pattern: {:?}", doc.report.pattern);
        let _ = writeln!(out, "  limit as t -> +inf: {}", num(doc.report.limit_estimate));
        if let Some(t) = doc.report.turning_point {
            let _ = writeln!(out, "  minimum near t = {}", num(t));
        }
        let _ = writeln!(
            out,
            "  recession lower bound: {} (t = 1e6), {} (t = 1e8)",
            num(doc.report.recession_lower_bound),
            num(recession_estimate)
        );
        if let Some(r) = exact_recession {
            let _ = writeln!(out, "  exact recession: {}", num(r));
        }
        let _ = writeln!(
            out,
            "  {}: {}",
            if bounded_above { "bounded above" } else { "unbounded" },
            doc.clause
        );
        out
    };
    Ok(Output { text, code: 0 })
}

#[derive(Serialize)]
struct LqRow {
    n: usize,
    ratio: f64,
}

#[derive(Serialize)]
struct LqDoc {
    q: f64,
    rows: Vec<LqRow>,
    strictly_increasing: bool,
}

pub fn demo_lq(settings: &Settings) -> Outcome {
    let q = 4.0;
    let rows = [1, 10, 100, 1000, 10000]
        .into_iter()
        .map(|n| {
            infconv::lq_inradius_collapse(n, q).map(|LqCollapse { n, ratio, .. }| LqRow { n, ratio })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let strictly_increasing = rows.windows(2).all(|w| w[0].ratio < w[1].ratio);
    let doc = LqDoc {
        q,
        rows,
        strictly_increasing,
    };
    let text = if settings.json {
        json(&doc)
    } else {
        let mut out = format!("ratio ‖ξ_n‖₂ / ‖ξ_n‖_q for ξ_n = (k^-1/2), q = {}\n", num(q));
        let _ = writeln!(out, "{:>8}  {:>12}", "n", "ratio");
        for r in &doc.rows {
            let _ = writeln!(out, "{:>8}  {:>12.8}", r.n, r.ratio);
        }
        let _ = writeln!(
            out,
            "strictly increasing: {}",
            if strictly_increasing { "yes" } else { "no" }
        );
        out
    };
    Ok(Output { text, code: 0 })
}

#[derive(Serialize)]
struct PhiDemoDoc {
    polytope: VPolytope,
    report: RecessionIdentityReport,
}

pub const PHI_DEMO_TRIALS: usize = 100;

pub fn demo_phi_recession(settings: &Settings) -> Outcome {
    let square = VPolytope::new(vec![
        vec![1.0, 1.0],
        vec![1.0, -1.0],
        vec![-1.0, 1.0],
        vec![-1.0, -1.0],
    ])?;
    let mut rng = rng_for(settings, 0);
    let report = infconv::verify_recession_identity(&square, PHI_DEMO_TRIALS, &mut rng)?;
    let passed = report.passed;
    let doc = PhiDemoDoc {
        polytope: square,
        report,
    };
    let text = if settings.json {
        json(&doc)
    } else {
        format!(
            "recession of φ_C vs s_C, C = conv{{(±1, ±1)}}, {} directions\nmax deviation {}: {} at 1e-5\n",
            doc.report.trials,
            num(doc.report.max_deviation),
            if passed { "pass" } else { "fail" }
        )
    };
    Ok(Output {
        text,
        code: if passed { 0 } else { 3 },
    })
}

pub fn demo_truncation(settings: &Settings) -> Outcome {
    let mut rng = rng_for(settings, 0);
    let r: TruncationReport = infconv::orthant_truncation(2, &mut rng)?;
    let text = if settings.json {
        json(&r)
    } else {
        let mut out = String::from(
            "f = 2 φ_C, C = conv{0, e_1, e_2, e_1 + e_2}: the nonnegative orthant truncated to the unit box\n",
        );
        if r.constant_lines_found == 0 {
            let _ = writeln!(out, "no constant line found in {} sampled directions", r.directions_sampled);
        } else {
            let _ = writeln!(
                out,
                "{} constant lines found in {} sampled directions",
                r.constant_lines_found, r.directions_sampled
            );
        }
        let _ = writeln!(
            out,
            "lineality estimate: {}",
            if r.lineality_estimate.is_zero() {
                "{0}".to_string()
            } else {
                format!("dim {}", r.lineality_estimate.dim())
            }
        );
        let _ = writeln!(
            out,
            "recession along +e_1: {}, along -e_1: {}",
            num(r.recession_plus_e1),
            num(r.recession_minus_e1)
        );
        let _ = writeln!(
            out,
            "bounded rays along {}/{} sampled directions in the negative orthant: {}",
            r.bounded_negative_rays,
            r.negative_directions_sampled,
            if r.directionally_coercive {
                "directionally coercive"
            } else {
                "not directionally coercive"
            }
        );
        out
    };
    Ok(Output { text, code: 0 })
}
