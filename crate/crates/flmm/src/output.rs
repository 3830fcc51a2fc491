//! CSV and JSON result files. Every float is written with 17 significant
//! digits, so files reload bit-for-bit; non-finite values become `inf`,
//! `-inf`, `nan` in CSV and `null` in JSON.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use flmm_core::methods::{Method, MethodWeights};
use flmm_core::solver::SolutionTrace;
use flmm_core::stability::{BoundaryCurve, Membership, MinusOneComparison};
use flmm_core::Complex64;

use crate::convergence::{ConvergenceColumn, Eoc};
use crate::error::{HarnessError, Result};

pub const SCHEMA: &str = "flmm-kit/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(HarnessError::validation(format!("unknown format {s:?} (csv|json)"))),
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON number written with 17 significant digits; `null` if non-finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(fmt_f64(self.0))
                .map_err(serde::ser::Error::custom)?
                .serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Num(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

fn nums(xs: impl IntoIterator<Item = f64>) -> Vec<Num> {
    xs.into_iter().map(Num).collect()
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| HarnessError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|source| HarnessError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|source| HarnessError::Json {
        path: PathBuf::from("<memory>"),
        source,
    })?;
    out.push(b'\n');
    Ok(out)
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self> {
        let mut t = Table {
            writer: csv::Writer::from_writer(Vec::new()),
        };
        t.row(header.iter().map(|s| s.to_string()))?;
        Ok(t)
    }

    fn row(&mut self, fields: impl IntoIterator<Item = String>) -> Result<()> {
        self.writer
            .write_record(fields.into_iter().collect::<Vec<_>>())
            .map_err(csv_err)
    }

    fn finish(self) -> Result<Vec<u8>> {
        self.writer.into_inner().map_err(|e| csv_err(e.into_error().into()))
    }
}

fn csv_err(source: csv::Error) -> HarnessError {
    HarnessError::Csv {
        path: PathBuf::from("<memory>"),
        source,
    }
}

fn with_prefix(prefixed: bool, base: &[&'static str]) -> Vec<&'static str> {
    let mut h = if prefixed { vec!["method", "beta"] } else { Vec::new() };
    h.extend_from_slice(base);
    h
}

// ---- weights ----

#[derive(Serialize)]
struct WeightsJson<'a> {
    schema: &'a str,
    meta: WeightsMeta<'a>,
    a: Vec<Num>,
    q: Vec<Num>,
}

#[derive(Serialize)]
struct WeightsMeta<'a> {
    method: &'a str,
    beta: Num,
    n: usize,
}

/// `k,a,q`; `q` is zero-padded to the length of `a`.
pub fn render_weights(method: Method, beta: f64, w: &MethodWeights, format: Format) -> Result<Vec<u8>> {
    let n = w.a.len();
    match format {
        Format::Csv => {
            let mut t = Table::new(&["k", "a", "q"])?;
            for k in 0..n {
                t.row([k.to_string(), fmt_f64(w.a[k]), fmt_f64(w.q.coeff(k))])?;
            }
            t.finish()
        }
        Format::Json => to_json(&WeightsJson {
            schema: SCHEMA,
            meta: WeightsMeta {
                method: method.name(),
                beta: Num(beta),
                n,
            },
            a: nums(w.a.as_slice().iter().copied()),
            q: nums(w.q.as_slice().iter().copied()),
        }),
    }
}

// ---- solve traces ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub method: String,
    pub beta: Num,
    pub h: Num,
    #[serde(rename = "N")]
    pub n: usize,
    pub t0: Num,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_error: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub schema: String,
    pub meta: TraceMeta,
    pub t: Vec<Num>,
    pub y: Vec<Num>,
    pub newton_iters: Vec<u32>,
}

impl TraceFile {
    pub fn new(trace: &SolutionTrace<f64>, problem: Option<&str>, max_error: Option<f64>) -> Self {
        TraceFile {
            schema: SCHEMA.into(),
            meta: TraceMeta {
                method: trace.method.name().into(),
                beta: Num(trace.beta.value()),
                h: Num(trace.grid.h()),
                n: trace.grid.steps(),
                t0: Num(trace.grid.t0()),
                problem: problem.map(str::to_owned),
                max_error: max_error.map(Num),
            },
            t: nums(trace.grid.times()),
            y: nums(trace.y.iter().copied()),
            newton_iters: trace.newton_iters.clone(),
        }
    }

    pub fn y_values(&self) -> Vec<f64> {
        self.y.iter().map(|n| n.0).collect()
    }
}

pub fn render_trace(file: &TraceFile, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => to_json(file),
        Format::Csv => {
            let mut t = Table::new(&["t", "y"])?;
            for (tn, yn) in file.t.iter().zip(&file.y) {
                t.row([fmt_f64(tn.0), fmt_f64(yn.0)])?;
            }
            t.finish()
        }
    }
}

pub fn load_trace(path: &Path) -> Result<TraceFile> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: TraceFile = serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if file.schema != SCHEMA {
        return Err(HarnessError::validation(format!(
            "{}: unsupported schema {:?}",
            path.display(),
            file.schema
        )));
    }
    Ok(file)
}

// ---- convergence tables ----

fn eoc_field(order: Eoc) -> String {
    match order {
        Eoc::Absent => String::new(),
        Eoc::Value(v) => fmt_f64(v),
        Eoc::NotApplicable => "NA".into(),
    }
}

fn eoc_json(order: Eoc) -> Box<RawValue> {
    let s = match order {
        Eoc::Absent => "null".to_owned(),
        Eoc::Value(v) if v.is_finite() => fmt_f64(v),
        Eoc::Value(_) => "null".to_owned(),
        Eoc::NotApplicable => "\"NA\"".to_owned(),
    };
    RawValue::from_string(s).expect("valid JSON literal")
}

#[derive(Serialize)]
struct EocJson<'a> {
    schema: &'a str,
    problem: &'a str,
    columns: Vec<EocColumnJson>,
}

#[derive(Serialize)]
struct EocColumnJson {
    method: &'static str,
    beta: Num,
    rows: Vec<EocRowJson>,
    failure: Option<FailureJson>,
}

#[derive(Serialize)]
struct EocRowJson {
    #[serde(rename = "M")]
    m: usize,
    h: Num,
    max_error: Num,
    order: Box<RawValue>,
}

#[derive(Serialize)]
struct FailureJson {
    #[serde(rename = "M")]
    m: usize,
    message: String,
}

/// `M,h,max_error,order` for a single column; sweeps get a `method,beta`
/// prefix. The order field is empty on the first row and `NA` when an error is
/// at rounding level.
pub fn render_convergence(problem: &str, columns: &[ConvergenceColumn], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let prefixed = columns.len() > 1;
            let mut t = Table::new(&with_prefix(prefixed, &["M", "h", "max_error", "order"]))?;
            for c in columns {
                for r in &c.rows {
                    let mut fields = Vec::with_capacity(6);
                    if prefixed {
                        fields.push(c.method.name().to_owned());
                        fields.push(fmt_f64(c.beta.value()));
                    }
                    fields.extend([r.m.to_string(), fmt_f64(r.h), fmt_f64(r.max_error), eoc_field(r.order)]);
                    t.row(fields)?;
                }
            }
            t.finish()
        }
        Format::Json => to_json(&EocJson {
            schema: SCHEMA,
            problem,
            columns: columns
                .iter()
                .map(|c| EocColumnJson {
                    method: c.method.name(),
                    beta: Num(c.beta.value()),
                    rows: c
                        .rows
                        .iter()
                        .map(|r| EocRowJson {
                            m: r.m,
                            h: Num(r.h),
                            max_error: Num(r.max_error),
                            order: eoc_json(r.order),
                        })
                        .collect(),
                    failure: c.failure.as_ref().map(|f| FailureJson {
                        m: f.m,
                        message: f.message.clone(),
                    }),
                })
                .collect(),
        }),
    }
}

// ---- stability ----

#[derive(Serialize)]
struct CurvesJson<'a> {
    schema: &'a str,
    curves: Vec<CurveJson>,
}

#[derive(Serialize)]
struct CurveJson {
    method: &'static str,
    beta: Num,
    pole_window: Option<Num>,
    theta: Vec<Num>,
    re: Vec<Num>,
    im: Vec<Num>,
}

/// `theta,re,im`; samples inside a pole window are written as `inf,0`.
pub fn render_boundaries(curves: &[BoundaryCurve], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let prefixed = curves.len() > 1;
            let mut t = Table::new(&with_prefix(prefixed, &["theta", "re", "im"]))?;
            for c in curves {
                for s in &c.samples {
                    let mut fields = Vec::with_capacity(5);
                    if prefixed {
                        fields.push(c.method.name().to_owned());
                        fields.push(fmt_f64(c.beta.value()));
                    }
                    fields.extend([fmt_f64(s.theta), fmt_f64(s.value.re), fmt_f64(s.value.im)]);
                    t.row(fields)?;
                }
            }
            t.finish()
        }
        Format::Json => to_json(&CurvesJson {
            schema: SCHEMA,
            curves: curves
                .iter()
                .map(|c| CurveJson {
                    method: c.method.name(),
                    beta: Num(c.beta.value()),
                    pole_window: c.pole_window.map(Num),
                    theta: nums(c.samples.iter().map(|s| s.theta)),
                    re: nums(c.samples.iter().map(|s| s.value.re)),
                    im: nums(c.samples.iter().map(|s| s.value.im)),
                })
                .collect(),
        }),
    }
}

/// Membership verdicts of one `(method, β)` over a ζ-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipGrid {
    pub method: Method,
    pub beta: f64,
    pub points: Vec<(Complex64, Membership)>,
}

#[derive(Serialize)]
struct GridsJson<'a> {
    schema: &'a str,
    oracle: &'a str,
    grids: Vec<GridJson>,
}

#[derive(Serialize)]
struct GridJson {
    method: &'static str,
    beta: Num,
    re_zeta: Vec<Num>,
    im_zeta: Vec<Num>,
    member: Vec<&'static str>,
}

/// `re_zeta,im_zeta,member` with member `true` (unstable), `false` or
/// `indeterminate`.
pub fn render_grids(grids: &[MembershipGrid], oracle: &str, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let prefixed = grids.len() > 1;
            let mut t = Table::new(&with_prefix(prefixed, &["re_zeta", "im_zeta", "member"]))?;
            for g in grids {
                for (z, m) in &g.points {
                    let mut fields = Vec::with_capacity(5);
                    if prefixed {
                        fields.push(g.method.name().to_owned());
                        fields.push(fmt_f64(g.beta));
                    }
                    fields.extend([fmt_f64(z.re), fmt_f64(z.im), m.as_str().to_owned()]);
                    t.row(fields)?;
                }
            }
            t.finish()
        }
        Format::Json => to_json(&GridsJson {
            schema: SCHEMA,
            oracle,
            grids: grids
                .iter()
                .map(|g| GridJson {
                    method: g.method.name(),
                    beta: Num(g.beta),
                    re_zeta: nums(g.points.iter().map(|p| p.0.re)),
                    im_zeta: nums(g.points.iter().map(|p| p.0.im)),
                    member: g.points.iter().map(|p| p.1.as_str()).collect(),
                })
                .collect(),
        }),
    }
}

#[derive(Serialize)]
struct CompareJson<'a> {
    schema: &'a str,
    rows: Vec<CompareRowJson>,
}

#[derive(Serialize)]
struct CompareRowJson {
    beta: Num,
    fbdf2: Num,
    nflmm2: Num,
    fam1: Num,
    ft2: Num,
    ordered: bool,
}

/// `beta,fbdf2,nflmm2,fam1,ft2,ordered`: generating functions at `ξ = -1`.
pub fn render_comparisons(rows: &[MinusOneComparison], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut t = Table::new(&["beta", "fbdf2", "nflmm2", "fam1", "ft2", "ordered"])?;
            for r in rows {
                t.row([
                    fmt_f64(r.beta.value()),
                    fmt_f64(r.fbdf2),
                    fmt_f64(r.nflmm2),
                    fmt_f64(r.fam1),
                    fmt_f64(r.ft2),
                    r.strictly_ordered().to_string(),
                ])?;
            }
            t.finish()
        }
        Format::Json => to_json(&CompareJson {
            schema: SCHEMA,
            rows: rows
                .iter()
                .map(|r| CompareRowJson {
                    beta: Num(r.beta.value()),
                    fbdf2: Num(r.fbdf2),
                    nflmm2: Num(r.nflmm2),
                    fam1: Num(r.fam1),
                    ft2: Num(r.ft2),
                    ordered: r.strictly_ordered(),
                })
                .collect(),
        }),
    }
}
