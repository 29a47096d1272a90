//! Batch commands over a scene, producing deterministic JSON reports.
//!
//! | command               | arguments                   |
//! |-----------------------|-----------------------------|
//! | `check-compat`        | `GX w1 w2`                  |
//! | `glue-form`           | `GX w1 w2`                  |
//! | `eval-form`           | `GX w1 w2 at <point>`       |
//! | `fibre`               | `GX at <point>`             |
//! | `oracle`              | `GX at <point> [degree D]`  |
//! | `rho`                 | `GX at <point>`             |
//! | `check-metric-compat` | `GX g1 g2`                  |
//! | `glue-metric`         | `GX g1 g2`                  |
//! | `gram-rank`           | `GX g1 g2 at <point>`       |
//!
//! Points are written `P1:(1,0)` or `P2:(0,-3/4)`.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::equal::EqualityOracle;
use crate::fibre::{
    fibre_at, fibre_oracle, is_compatible_pair, rho1, rho2, value_at, FibreElement, FibreError,
    GlueFibreElement, DEFAULT_ORACLE_DEGREE,
};
use crate::forms::{check_compatible, glue_forms, FormError, OneForm};
use crate::metric::{
    glue_metric_with, gram_at, metrics_compatibility, MetricError, PieceMetric,
    DEFAULT_METRIC_SAMPLES,
};
use crate::parse::parse_rational;
use crate::scalar::Mode;
use crate::scene::{Scene, SceneError};
use crate::space::{GluedPoint, Piece, PointClass, SpaceError};

pub const SCHEMA_VERSION: u32 = 1;

pub const COMMANDS: [&str; 9] = [
    "check-compat",
    "glue-form",
    "eval-form",
    "fibre",
    "oracle",
    "rho",
    "check-metric-compat",
    "glue-metric",
    "gram-rank",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("scene: {0}")]
    Scene(#[from] SceneError),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    /// 1 for domain errors, 2 for parse and usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) | CliError::Scene(_) => 2,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

impl From<FormError> for CliError {
    fn from(e: FormError) -> Self {
        domain(e)
    }
}

impl From<FibreError> for CliError {
    fn from(e: FibreError) -> Self {
        domain(e)
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        domain(e)
    }
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        domain(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    pub degree: u32,
    pub samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            degree: DEFAULT_ORACLE_DEGREE,
            samples: DEFAULT_METRIC_SAMPLES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Vec<String>,
    pub result: Value,
    pub mode: Mode,
    pub seed: u64,
}

impl Report {
    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {}\nmode: {}  seed: {}\n",
            self.command,
            self.inputs.join(" "),
            self.mode.as_str(),
            self.seed
        );
        text_value(&self.result, 0, &mut out);
        out
    }
}

fn text_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if is_leafy(x) {
                    out.push_str(&format!("{}{}: {}\n", pad, k, leaf(x)));
                } else {
                    out.push_str(&format!("{}{}:\n", pad, k));
                    text_value(x, indent + 1, out);
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_leafy(x) {
                    out.push_str(&format!("{}- {}\n", pad, leaf(x)));
                } else {
                    out.push_str(&format!("{}-\n", pad));
                    text_value(x, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{}{}\n", pad, leaf(other))),
    }
}

fn is_leafy(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn leaf(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(leaf).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// `P1:(1,0)`, `P2:(0, -3/4)`, `P1:()`.
pub fn parse_point(text: &str) -> Result<GluedPoint, String> {
    let text = text.trim();
    let (tag, rest) = text
        .split_once(':')
        .ok_or_else(|| format!("point {:?} must look like P1:(x,y)", text))?;
    let tag = match tag.trim() {
        "P1" => Piece::P1,
        "P2" => Piece::P2,
        other => return Err(format!("unknown piece {:?}, expected P1 or P2", other)),
    };
    let inner = rest
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| format!("point {:?} must look like P1:(x,y)", text))?;
    let coords = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|c| parse_rational(c).map_err(|e| format!("coordinate {:?}: {}", c.trim(), e)))
            .collect::<Result<_, _>>()?
    };
    Ok(GluedPoint::new(tag, coords))
}

struct Args {
    names: Vec<String>,
    point: Option<GluedPoint>,
    degree: Option<u32>,
}

fn split_args(args: &[String]) -> Result<Args, CliError> {
    let mut names = Vec::new();
    let mut point_text: Option<String> = None;
    let mut degree = None;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "at" => {
                let mut s = String::new();
                i += 1;
                while i < args.len() && args[i] != "degree" {
                    s.push_str(&args[i]);
                    i += 1;
                }
                if s.is_empty() {
                    return usage("'at' needs a point such as P2:(0,5)");
                }
                point_text = Some(s);
                continue;
            }
            "degree" => {
                let d = args
                    .get(i + 1)
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| CliError::Usage("'degree' needs a positive integer".into()))?;
                degree = Some(d);
                i += 2;
                continue;
            }
            other => names.push(other.to_string()),
        }
        i += 1;
    }
    let point = point_text
        .map(|t| parse_point(&t))
        .transpose()
        .map_err(CliError::Usage)?;
    Ok(Args {
        names,
        point,
        degree,
    })
}

struct Ctx<'a> {
    scene: &'a Scene,
    p1: &'a str,
    p2: &'a str,
}

impl Ctx<'_> {
    fn space_of(&self, piece: Piece) -> &str {
        match piece {
            Piece::P1 => self.p1,
            Piece::P2 => self.p2,
        }
    }

    fn form(&self, name: &str, piece: Piece) -> Result<OneForm, CliError> {
        let (space, coeffs) = self
            .scene
            .form(name)
            .ok_or_else(|| CliError::Usage(format!("{:?} is not a form of the scene", name)))?;
        if space != self.space_of(piece) {
            return usage(format!(
                "form {} is on {}, expected a form on {}",
                name,
                space,
                self.space_of(piece)
            ));
        }
        Ok(OneForm::new(piece, coeffs.to_vec()))
    }

    fn metric(
        &self,
        name: &str,
        piece: Piece,
        oracle: &EqualityOracle,
    ) -> Result<PieceMetric, CliError> {
        let (space, rows) = self
            .scene
            .metric(name)
            .ok_or_else(|| CliError::Usage(format!("{:?} is not a metric of the scene", name)))?;
        if space != self.space_of(piece) {
            return usage(format!(
                "metric {} is on {}, expected a metric on {}",
                name,
                space,
                self.space_of(piece)
            ));
        }
        Ok(PieceMetric::from_rows(piece, rows.to_vec(), oracle)?)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn need_names(args: &Args, n: usize, shape: &str) -> Result<(), CliError> {
    if args.names.len() != n {
        return usage(format!("expected {}", shape));
    }
    Ok(())
}

fn need_point(args: &Args, shape: &str) -> Result<GluedPoint, CliError> {
    args.point
        .clone()
        .ok_or_else(|| CliError::Usage(format!("expected {}", shape)))
}

/// Run `command` on `scene`.
pub fn run_command(
    scene: &Scene,
    command: &str,
    args: &[String],
    opts: &Options,
) -> Result<Report, CliError> {
    if !COMMANDS.contains(&command) {
        return usage(format!(
            "unknown command {:?}; expected one of {}",
            command,
            COMMANDS.join(", ")
        ));
    }
    let a = split_args(args)?;
    let gx = a
        .names
        .first()
        .ok_or_else(|| CliError::Usage(format!("{} needs a glued space name", command)))?;
    let (space, p1, p2) = scene
        .glued(gx)
        .ok_or_else(|| CliError::Usage(format!("{:?} is not a glued space of the scene", gx)))?;
    let ctx = Ctx { scene, p1, p2 };
    let oracle = EqualityOracle::with_seed(opts.seed);
    let mut inputs = a.names.clone();
    if let Some(p) = &a.point {
        inputs.push(format!("at {}", p));
    }

    let (result, mode) = match command {
        "check-compat" => {
            need_names(&a, 3, "check-compat GX w1 w2")?;
            let c = check_compatible(
                space,
                &ctx.form(&a.names[1], Piece::P1)?,
                &ctx.form(&a.names[2], Piece::P2)?,
                &oracle,
            )?;
            let mut v = json!({ "compatible": c.compatible, "mode": c.mode });
            if !c.compatible {
                v["difference"] = Value::String(c.difference.to_string());
            }
            (v, c.mode)
        }
        "glue-form" => {
            need_names(&a, 3, "glue-form GX w1 w2")?;
            let fp = glue_forms(
                space,
                ctx.form(&a.names[1], Piece::P1)?,
                ctx.form(&a.names[2], Piece::P2)?,
                &oracle,
            )?;
            (
                json!({
                    "w1": fp.w1().to_string(),
                    "w2": fp.w2().to_string(),
                    "verified": fp.verified(),
                }),
                fp.mode(),
            )
        }
        "eval-form" => {
            need_names(&a, 3, "eval-form GX w1 w2 at <point>")?;
            let x = need_point(&a, "eval-form GX w1 w2 at <point>")?;
            let fp = glue_forms(
                space,
                ctx.form(&a.names[1], Piece::P1)?,
                ctx.form(&a.names[2], Piece::P2)?,
                &oracle,
            )?;
            let lifts = space.lift_point(&x)?;
            let case = space.classify_point(&x)?;
            let value = match case {
                PointClass::Interior1 => {
                    FibreElement::Interior(value_at(fp.w1(), &lifts[0].coords)?)
                }
                PointClass::Interior2 => {
                    FibreElement::Interior(value_at(fp.w2(), &lifts[0].coords)?)
                }
                PointClass::GlueLocus => {
                    let a1 = value_at(fp.w1(), &lifts[0].coords)?;
                    let a2 = value_at(fp.w2(), &lifts[1].coords)?;
                    let tol = crate::equal::DEFAULT_TOLERANCE;
                    if !is_compatible_pair(space, &x, &a1, &a2, tol)? {
                        return Err(domain("values at the two lifts are not compatible"));
                    }
                    FibreElement::Glue(GlueFibreElement { a1, a2 })
                }
            };
            let mode = value.flat().iter().fold(fp.mode(), |m, s| m.and(s.mode()));
            (
                json!({
                    "point": space.canonicalize(&x)?,
                    "case": case,
                    "value": value,
                }),
                mode,
            )
        }
        "fibre" => {
            need_names(&a, 1, "fibre GX at <point>")?;
            let x = need_point(&a, "fibre GX at <point>")?;
            (to_value(fibre_at(space, &x)?), Mode::Exact)
        }
        "oracle" => {
            need_names(&a, 1, "oracle GX at <point> [degree D]")?;
            let x = need_point(&a, "oracle GX at <point>")?;
            let degree = a.degree.unwrap_or(opts.degree);
            let dim = fibre_oracle(space, &x, degree)?;
            (
                json!({
                    "point": space.canonicalize(&x)?,
                    "degree": degree,
                    "dim": dim,
                }),
                Mode::Exact,
            )
        }
        "rho" => {
            need_names(&a, 1, "rho GX at <point>")?;
            let x = need_point(&a, "rho GX at <point>")?;
            let fib = fibre_at(space, &x)?;
            let images: Vec<Value> = fib
                .basis
                .iter()
                .map(|e| {
                    json!({
                        "element": e,
                        "rho1": rho1(e).ok(),
                        "rho2": rho2(e).ok(),
                    })
                })
                .collect();
            (
                json!({
                    "point": fib.point,
                    "case": fib.case,
                    "rho1_defined": rho1_defined(fib.case),
                    "rho2_defined": rho2_defined(fib.case),
                    "basis": images,
                }),
                Mode::Exact,
            )
        }
        "check-metric-compat" => {
            need_names(&a, 3, "check-metric-compat GX g1 g2")?;
            let g1 = ctx.metric(&a.names[1], Piece::P1, &oracle)?;
            let g2 = ctx.metric(&a.names[2], Piece::P2, &oracle)?;
            let c = metrics_compatibility(space, &g1, &g2, opts.samples, opts.seed)?;
            let mode = c.mode;
            (to_value(c), mode)
        }
        "glue-metric" => {
            need_names(&a, 3, "glue-metric GX g1 g2")?;
            let g1 = ctx.metric(&a.names[1], Piece::P1, &oracle)?;
            let g2 = ctx.metric(&a.names[2], Piece::P2, &oracle)?;
            let gm = glue_metric_with(space, g1, g2, opts.samples, opts.seed)?;
            (to_value(&gm), Mode::Exact)
        }
        "gram-rank" => {
            need_names(&a, 3, "gram-rank GX g1 g2 at <point>")?;
            let x = need_point(&a, "gram-rank GX g1 g2 at <point>")?;
            let g1 = ctx.metric(&a.names[1], Piece::P1, &oracle)?;
            let g2 = ctx.metric(&a.names[2], Piece::P2, &oracle)?;
            let gm = glue_metric_with(space, g1, g2, opts.samples, opts.seed)?;
            let r = gram_at(&gm, &x)?;
            let mode = r.mode;
            let mut v = to_value(r);
            v["metrics_compatible"] = Value::Bool(gm.compatible);
            (v, mode)
        }
        _ => unreachable!("checked against COMMANDS"),
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        inputs,
        result,
        mode,
        seed: opts.seed,
    })
}

fn rho1_defined(c: PointClass) -> bool {
    c != PointClass::Interior2
}

fn rho2_defined(c: PointClass) -> bool {
    c != PointClass::Interior1
}

/// Parse `scene_text` and run one command.
pub fn run(
    scene_text: &str,
    command: &str,
    args: &[String],
    opts: &Options,
) -> Result<Report, CliError> {
    let scene = crate::scene::parse_scene(scene_text)?;
    run_command(&scene, command, args, opts)
}
