//! Command-line front end: argument parsing, map documents and the
//! commands exposing each algorithm of `tamegrade`.
//!
//! [`run`] is the whole program minus process plumbing, which keeps every
//! command testable in-process.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use tamegrade::automorphism::{
    has_unit_jacobian, invert_plane, invert_structured, verify_inverse_pair,
};
use tamegrade::graded3::{
    classify, decompose_graded, lift_alpha_inverse, restrict_alpha, wild_witness,
    wildness_certificate, Certificate, GradedOutcome,
};
use tamegrade::grading::{normalize, Grading};
use tamegrade::jung::decompose_plane_traced;
use tamegrade::newton::{newton_polygon, render_trace_svg};
use tamegrade::parse::{parse_map, parse_polynomial};
use tamegrade::{compose, examples, Error, QChain, QMap, QPoly, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_AUTOMORPHISM: i32 = 1;
pub const EXIT_NOT_GRADED: i32 = 2;
pub const EXIT_NOT_LIFTABLE: i32 = 3;
pub const EXIT_CERTIFIED_WILD: i32 = 4;
pub const EXIT_UNDECIDED: i32 = 5;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 70;

/// Serialized form of a polynomial map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDocument {
    pub vars: Vec<String>,
    pub coords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<GradingDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradingDocument {
    pub weights: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<i64>,
}

impl GradingDocument {
    pub fn from_grading(g: &Grading) -> Self {
        GradingDocument {
            weights: g.weights().to_vec(),
            modulus: g.modulus(),
        }
    }

    pub fn to_grading(&self) -> tamegrade::Result<Grading> {
        match self.modulus {
            Some(m) => Grading::residue(&self.weights, m),
            None => Ok(Grading::integer(&self.weights)),
        }
    }
}

/// A parsed map together with the variable names it was written in.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedMap {
    pub vars: Vec<String>,
    pub map: QMap,
    pub grading: Option<Grading>,
}

impl NamedMap {
    pub fn new(map: QMap, grading: Option<Grading>) -> Self {
        let vars = default_vars(map.arity());
        NamedMap { vars, map, grading }
    }

    fn plane(map: QMap) -> Self {
        NamedMap {
            vars: vec!["u".into(), "v".into()],
            map,
            grading: None,
        }
    }

    pub fn text(&self) -> String {
        let names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        self.map.fmt_with(&names)
    }

    pub fn document(&self) -> MapDocument {
        let names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        MapDocument {
            vars: self.vars.clone(),
            coords: self
                .map
                .coords()
                .iter()
                .map(|c| c.fmt_with(&names))
                .collect(),
            grading: self.grading.as_ref().map(GradingDocument::from_grading),
        }
    }

    pub fn from_document(doc: &MapDocument) -> tamegrade::Result<Self> {
        let names: Vec<&str> = doc.vars.iter().map(String::as_str).collect();
        if !VAR_SETS.contains(&names.as_slice()) {
            return Err(Error::Parse {
                position: 0,
                message: format!("unsupported variable list {:?}", doc.vars),
            });
        }
        let coords = doc
            .coords
            .iter()
            .map(|c| parse_polynomial::<Rational>(c, &names))
            .collect::<tamegrade::Result<Vec<_>>>()?;
        let map = QMap::new(coords)?;
        let grading = doc
            .grading
            .as_ref()
            .map(GradingDocument::to_grading)
            .transpose()?;
        Ok(NamedMap {
            vars: doc.vars.clone(),
            map,
            grading,
        })
    }
}

const VAR_SETS: [&[&str]; 3] = [&["x", "y"], &["x", "y", "z"], &["u", "v"]];

fn default_vars(arity: usize) -> Vec<String> {
    match arity {
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => vec!["x".into(), "y".into()],
    }
}

/// Parses an inline coordinate list, inferring the variables from the
/// number of coordinates and the letters used.
pub fn parse_inline(text: &str) -> tamegrade::Result<NamedMap> {
    let mut first_err = None;
    for set in VAR_SETS {
        match parse_map::<Rational>(text, set) {
            Ok(map) => {
                return Ok(NamedMap {
                    vars: set.iter().map(|s| s.to_string()).collect(),
                    map,
                    grading: None,
                })
            }
            Err(e) => {
                // an unknown variable under x,y is a worse message than the
                // image count mismatch it hides under x,y,z
                let keep = matches!(
                    (&first_err, &e),
                    (None, _)
                        | (Some(Error::ImageCountMismatch { .. }), Error::Parse { .. })
                        | (Some(Error::UnknownVariable { .. }), Error::Parse { .. })
                );
                if keep {
                    first_err = Some(e);
                }
            }
        }
    }
    Err(first_err.expect("at least one variable set"))
}

/// Maps read from one input: a single map, or a factor list written by
/// `decompose --json`.
fn read_maps(source: &str) -> std::result::Result<Vec<NamedMap>, Failure> {
    let text = read_source(source)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(trimmed)
            .map_err(|e| Failure::usage(format!("invalid JSON: {e}")))?;
        if let Some(factors) = value.get("factors") {
            let docs: Vec<MapDocument> = serde_json::from_value(factors.clone())
                .map_err(|e| Failure::usage(format!("invalid factor list: {e}")))?;
            return docs
                .iter()
                .map(|d| NamedMap::from_document(d).map_err(Failure::from))
                .collect();
        }
        let doc: MapDocument = serde_json::from_value(value)
            .map_err(|e| Failure::usage(format!("invalid map document: {e}")))?;
        return Ok(vec![NamedMap::from_document(&doc)?]);
    }
    let body: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if body.is_empty() {
        return Err(Failure::usage("empty map input"));
    }
    body.iter()
        .map(|l| parse_inline(l).map_err(Failure::from))
        .collect()
}

fn read_one(source: &str) -> std::result::Result<NamedMap, Failure> {
    let mut maps = read_maps(source)?;
    if maps.len() != 1 {
        return Err(Failure::usage(format!(
            "expected one map, found {}",
            maps.len()
        )));
    }
    Ok(maps.remove(0))
}

/// `-` is standard input, an existing path is read, anything else is the
/// map itself.
fn read_source(source: &str) -> std::result::Result<String, Failure> {
    if source == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::usage(format!("reading standard input: {e}")))?;
        return Ok(buf);
    }
    let path = Path::new(source);
    if !source.contains('(') && path.is_file() {
        return fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("reading {source}: {e}")));
    }
    Ok(source.to_string())
}

/// A comma-separated weight list; a newtype so clap keeps it one value.
#[derive(Debug, Clone)]
struct Weights(Vec<i64>);

fn parse_weights(text: &str) -> std::result::Result<Weights, String> {
    let weights = text
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<i64>()
                .map_err(|e| format!("bad weight `{w}`: {e}"))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if !(2..=3).contains(&weights.len()) {
        return Err(format!("expected 2 or 3 weights, got {}", weights.len()));
    }
    Ok(Weights(weights))
}

#[derive(Debug, Parser)]
#[command(
    name = "tamegrade",
    version,
    about = "Tame and graded-wild polynomial automorphisms"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct GradingArgs {
    /// Weights, e.g. `--grading=7,2,-3`.
    #[arg(long, value_parser = parse_weights, allow_hyphen_values = true)]
    grading: Option<Weights>,
    /// Read the weights modulo this number.
    #[arg(long)]
    modulus: Option<i64>,
}

impl GradingArgs {
    fn resolve(&self, fallback: Option<&Grading>) -> std::result::Result<Option<Grading>, Failure> {
        match (&self.grading, self.modulus) {
            (Some(w), Some(m)) => Ok(Some(Grading::residue(&w.0, m)?)),
            (Some(w), None) => Ok(Some(Grading::integer(&w.0))),
            (None, Some(_)) => Err(Failure::usage("--modulus needs --grading")),
            (None, None) => Ok(fallback.cloned()),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a map is an automorphism.
    Verify {
        map: String,
        /// Candidate inverse, checked exactly in both orders.
        #[arg(long)]
        inverse: Option<String>,
    },
    /// Compose maps left to right as point maps: `compose f g` is f∘g.
    Compose {
        #[arg(required = true)]
        maps: Vec<String>,
    },
    /// Inverse of an automorphism.
    Invert { map: String },
    /// Factor a map into elementary and linear pieces.
    Decompose {
        map: String,
        #[command(flatten)]
        grading: GradingArgs,
        /// Write the Newton polygons of the plane reduction as SVG.
        #[arg(long)]
        trace_svg: Option<PathBuf>,
    },
    /// Classify the grading with weights (a, b, c).
    #[command(allow_negative_numbers = true)]
    Classify { a: i64, b: i64, c: i64 },
    /// Graded-wild automorphism for the weights (a, b, c).
    #[command(allow_negative_numbers = true)]
    Witness { a: i64, b: i64, c: i64 },
    /// Lift a plane map in u, v to a graded map fixing z.
    Lift {
        map: String,
        #[arg(long, value_parser = parse_weights, allow_hyphen_values = true)]
        grading: Weights,
    },
    /// Restrict a graded map fixing z to the plane z = 1.
    Restrict {
        map: String,
        /// Weights of the input; omit when already normalized.
        #[arg(long, value_parser = parse_weights, allow_hyphen_values = true)]
        grading: Option<Weights>,
    },
    /// Look for a term certifying graded-wildness.
    CertifyWild {
        map: String,
        #[command(flatten)]
        grading: GradingArgs,
    },
    /// Newton polygon of a polynomial in x, y.
    Polygon {
        polynomial: String,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Print a built-in example; `witness(a,b,c)` is parametric.
    Example {
        /// Omit to list the names.
        name: Option<String>,
    },
}

/// What a command printed and the exit status it asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome::with_code(EXIT_OK, stdout)
    }

    fn with_code(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotAnAutomorphism(_) => EXIT_NOT_AUTOMORPHISM,
        Error::NotGraded | Error::NotGradedPlane | Error::NotGradedChain(_) => EXIT_NOT_GRADED,
        Error::NotLiftable(_) | Error::LiftFailure(_) => EXIT_NOT_LIFTABLE,
        Error::WildAdmittingUndecided(_) => EXIT_UNDECIDED,
        Error::Invariant(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

/// Runs the program on `args`, whose first element is the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => outcome,
        Err(f) => {
            let stderr = if cli.json {
                format!("{}\n", json!({ "error": f.message, "exit_code": f.code }))
            } else {
                format!("error: {}\n", f.message)
            };
            Outcome {
                code: f.code,
                stdout: String::new(),
                stderr,
            }
        }
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

fn dispatch(cli: &Cli) -> CmdResult {
    let json = cli.json;
    match &cli.command {
        Command::Verify { map, inverse } => verify(map, inverse.as_deref(), json),
        Command::Compose { maps } => compose_cmd(maps, json),
        Command::Invert { map } => invert(map, json),
        Command::Decompose {
            map,
            grading,
            trace_svg,
        } => decompose(map, grading, trace_svg.as_deref(), json),
        Command::Classify { a, b, c } => classify_cmd(*a, *b, *c, json),
        Command::Witness { a, b, c } => witness(*a, *b, *c, json),
        Command::Lift { map, grading } => lift(map, &grading.0, json),
        Command::Restrict { map, grading } => {
            restrict(map, grading.as_ref().map(|w| w.0.as_slice()), json)
        }
        Command::CertifyWild { map, grading } => certify_wild(map, grading, json),
        Command::Polygon { polynomial, svg } => polygon(polynomial, svg.as_deref(), json),
        Command::Example { name } => example(name.as_deref(), json),
    }
}

fn map_output(m: &NamedMap, json: bool) -> String {
    if json {
        to_json(&m.document())
    } else {
        format!("{}\n", m.text())
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn verify(source: &str, inverse: Option<&str>, json: bool) -> CmdResult {
    let m = read_one(source)?;
    let report = |code: i32, verdict: &str, detail: String| {
        let stdout = if json {
            to_json(&json!({ "verdict": verdict, "detail": detail }))
        } else {
            format!("{verdict}: {detail}\n")
        };
        Outcome::with_code(code, stdout)
    };
    if let Some(inv) = inverse {
        let inv = read_one(inv)?;
        return Ok(if verify_inverse_pair(&m.map, &inv.map)? {
            report(
                EXIT_OK,
                "Automorphism",
                "the given inverse checks in both orders".into(),
            )
        } else {
            report(
                EXIT_NOT_AUTOMORPHISM,
                "NotAnAutomorphism",
                "the given map is not a two-sided inverse".into(),
            )
        });
    }
    if m.map.arity() == 2 {
        return Ok(match decompose_plane_traced(&m.map) {
            Ok(t) => report(
                EXIT_OK,
                "Automorphism",
                format!("tame, {} factors", t.chain.len()),
            ),
            Err(Error::NotAnAutomorphism(why)) => {
                report(EXIT_NOT_AUTOMORPHISM, "NotAnAutomorphism", why)
            }
            Err(e) => return Err(e.into()),
        });
    }
    if !has_unit_jacobian(&m.map) {
        return Ok(report(
            EXIT_NOT_AUTOMORPHISM,
            "NotAnAutomorphism",
            "Jacobian determinant is not a nonzero constant".into(),
        ));
    }
    Ok(match invert_structured(&m.map) {
        Some(_) => report(EXIT_OK, "Automorphism", "affine or triangular".into()),
        None => report(
            EXIT_UNDECIDED,
            "Undecided",
            "constant Jacobian; pass --inverse to settle invertibility".into(),
        ),
    })
}

fn compose_cmd(sources: &[String], json: bool) -> CmdResult {
    let mut maps = Vec::new();
    for s in sources {
        maps.extend(read_maps(s)?);
    }
    let mut iter = maps.into_iter().rev();
    let mut acc = iter.next().expect("clap requires one map");
    for left in iter {
        acc = NamedMap {
            map: compose(&left.map, &acc.map)?,
            vars: left.vars,
            grading: left.grading.or(acc.grading),
        };
    }
    Ok(Outcome::ok(map_output(&acc, json)))
}

fn invert(source: &str, json: bool) -> CmdResult {
    let m = read_one(source)?;
    let inverse = if m.map.arity() == 2 {
        invert_plane(&m.map)?
    } else if !has_unit_jacobian(&m.map) {
        return Err(Error::NotAnAutomorphism(
            "Jacobian determinant is not a nonzero constant".into(),
        )
        .into());
    } else {
        invert_structured(&m.map).ok_or_else(|| {
            Error::WildAdmittingUndecided(
                "no inverse found for a map that is neither affine nor triangular".into(),
            )
        })?
    };
    let out = NamedMap {
        vars: m.vars,
        map: inverse,
        grading: m.grading,
    };
    Ok(Outcome::ok(map_output(&out, json)))
}

fn chain_output(chain: &QChain, vars: &[String], grading: Option<&Grading>, json: bool) -> String {
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    if json {
        let factors: Vec<Value> = chain
            .iter()
            .map(|f| {
                let doc = MapDocument {
                    vars: vars.to_vec(),
                    coords: f.map.coords().iter().map(|c| c.fmt_with(&names)).collect(),
                    grading: grading.map(GradingDocument::from_grading),
                };
                let mut v = serde_json::to_value(doc).expect("documents serialize");
                v["provenance"] = Value::String(f.provenance.to_string());
                v
            })
            .collect();
        to_json(&json!({ "verdict": "Tame", "factors": factors }))
    } else {
        let mut s = format!("# Tame: {} factors, composed left to right\n", chain.len());
        for (i, f) in chain.iter().enumerate() {
            s.push_str(&format!(
                "# {}: {}\n{}\n",
                i + 1,
                f.provenance,
                f.map.fmt_with(&names)
            ));
        }
        s
    }
}

fn decompose(source: &str, grading: &GradingArgs, svg: Option<&Path>, json: bool) -> CmdResult {
    let m = read_one(source)?;
    let g = grading.resolve(m.grading.as_ref())?;
    if let Some(g) = &g {
        if g.arity() != m.map.arity() {
            return Err(Failure::usage(format!(
                "{} weights for a map in {} variables",
                g.arity(),
                m.map.arity()
            )));
        }
    }
    if m.map.arity() == 2 {
        if let Some(g) = &g {
            if !tamegrade::grading::is_graded_map(&m.map, g) {
                return Err(Error::NotGraded.into());
            }
        }
        let trace = decompose_plane_traced(&m.map)?;
        if let Some(g) = &g {
            if let Some(i) = trace
                .chain
                .iter()
                .position(|f| !tamegrade::grading::is_graded_map(&f.map, g))
            {
                return Err(Error::Invariant(format!(
                    "factor {i} of a graded input is not graded"
                ))
                .into());
            }
        }
        if let Some(path) = svg {
            write_file(path, &render_trace_svg(&trace.polygons)?)?;
        }
        return Ok(Outcome::ok(chain_output(
            &trace.chain,
            &m.vars,
            g.as_ref(),
            json,
        )));
    }
    if svg.is_some() {
        return Err(Failure::usage(
            "--trace-svg applies to maps in two variables",
        ));
    }
    let g = g.ok_or_else(|| Failure::usage("a map in three variables needs --grading"))?;
    match decompose_graded(&m.map, &g)? {
        GradedOutcome::Tame(chain) => {
            Ok(Outcome::ok(chain_output(&chain, &m.vars, Some(&g), json)))
        }
        GradedOutcome::CertifiedWild(cert) => Ok(certificate_outcome(&cert, json)),
    }
}

fn certificate_outcome(cert: &Certificate<Rational>, json: bool) -> Outcome {
    let code = if cert.is_wild() {
        EXIT_CERTIFIED_WILD
    } else {
        EXIT_UNDECIDED
    };
    let stdout = if json {
        let value = match cert {
            Certificate::CertifiedWild {
                coefficient,
                exponents,
                degree,
                bound,
            } => json!({
                "verdict": "CertifiedWild",
                "coefficient": coefficient.to_string(),
                "exponents": [exponents.0, exponents.1],
                "degree": degree,
                "bound": bound,
            }),
            Certificate::Inconclusive { bound } => {
                json!({ "verdict": "Inconclusive", "bound": bound })
            }
        };
        to_json(&value)
    } else {
        format!("{cert}\n")
    };
    Outcome::with_code(code, stdout)
}

fn classify_cmd(a: i64, b: i64, c: i64, json: bool) -> CmdResult {
    let class = classify(&Grading::integer(&[a, b, c]))?;
    let stdout = if json {
        to_json(&json!({
            "weights": [a, b, c],
            "verdict": format!("{:?}", class.verdict),
            "reason": class.to_string(),
            "normalized": class.normalized.weights(),
        }))
    } else {
        format!("{class}\n")
    };
    Ok(Outcome::ok(stdout))
}

fn witness(a: i64, b: i64, c: i64, json: bool) -> CmdResult {
    let g = Grading::integer(&[a, b, c]);
    let w = wild_witness::<Rational>(&g)?;
    if !w.verify_inverse()? {
        return Err(Error::Invariant("witness failed its inverse check".into()).into());
    }
    let m = NamedMap::new(w.map.clone(), Some(g));
    let stdout = if json {
        let mut v = serde_json::to_value(m.document()).expect("documents serialize");
        v["inverse"] =
            serde_json::to_value(NamedMap::new(w.inverse.clone(), None).document().coords)
                .expect("strings serialize");
        v["description"] = Value::String(w.describe());
        to_json(&v)
    } else {
        format!("# {}\n{}\n", w.describe(), m.text())
    };
    Ok(Outcome::ok(stdout))
}

fn lift(source: &str, weights: &[i64], json: bool) -> CmdResult {
    let pm = read_one(source)?;
    if pm.map.arity() != 2 {
        return Err(Failure::usage("lift expects a map in two variables"));
    }
    let g = Grading::integer(weights);
    let n = normalize(&g)?;
    let lifted = n.to_original(&lift_alpha_inverse(&pm.map, &n)?);
    Ok(Outcome::ok(map_output(
        &NamedMap::new(lifted, Some(g)),
        json,
    )))
}

fn restrict(source: &str, weights: Option<&[i64]>, json: bool) -> CmdResult {
    let m = read_one(source)?;
    let normalized = match weights.map(Grading::integer).or(m.grading.clone()) {
        Some(g) => normalize(&g)?.to_normalized(&m.map),
        None => m.map,
    };
    let plane = restrict_alpha(&normalized)?;
    Ok(Outcome::ok(map_output(&NamedMap::plane(plane), json)))
}

fn certify_wild(source: &str, grading: &GradingArgs, json: bool) -> CmdResult {
    let m = read_one(source)?;
    let g = grading
        .resolve(m.grading.as_ref())?
        .ok_or_else(|| Failure::usage("certify-wild needs --grading"))?;
    match wildness_certificate(&m.map, &g) {
        Ok(cert) => Ok(certificate_outcome(&cert, json)),
        // every graded automorphism is graded-tame for these gradings
        Err(Error::NotWildAdmitting) => {
            let class = classify(&g)?;
            let stdout = if json {
                to_json(&json!({ "verdict": "NotWildAdmitting", "reason": class.to_string() }))
            } else {
                format!("NotWildAdmitting: {class}\n")
            };
            Ok(Outcome::ok(stdout))
        }
        Err(e) => Err(e.into()),
    }
}

fn polygon(text: &str, svg: Option<&Path>, json: bool) -> CmdResult {
    let body = read_source(text)?;
    let p: QPoly = parse_polynomial(body.trim(), &["x", "y"])?;
    let polygon = newton_polygon(&p)?;
    if let Some(path) = svg {
        write_file(path, &render_trace_svg(std::slice::from_ref(&polygon))?)?;
    }
    let stdout = if json {
        to_json(&json!({
            "hull": polygon.hull(),
            "support": polygon.support(),
            "area": polygon.area_label(),
        }))
    } else {
        let hull: Vec<String> = polygon
            .hull()
            .iter()
            .map(|(i, j)| format!("({i}, {j})"))
            .collect();
        format!("hull: {}\narea: {}\n", hull.join(" "), polygon.area_label())
    };
    Ok(Outcome::ok(stdout))
}

fn example(name: Option<&str>, json: bool) -> CmdResult {
    let Some(name) = name else {
        let mut names: Vec<String> = examples::NAMES.iter().map(|s| s.to_string()).collect();
        names.push("witness(a,b,c)".into());
        return Ok(Outcome::ok(if json {
            to_json(&names)
        } else {
            format!("{}\n", names.join("\n"))
        }));
    };
    let ex = examples::get::<Rational>(name)?;
    let m = NamedMap::new(ex.map, None);
    let stdout = if json {
        let mut v = serde_json::to_value(m.document()).expect("documents serialize");
        v["inverse"] = serde_json::to_value(NamedMap::new(ex.inverse, None).document().coords)
            .expect("strings serialize");
        v["notes"] = Value::String(ex.notes);
        to_json(&v)
    } else {
        format!("# {}\n{}\n", ex.notes, m.text())
    };
    Ok(Outcome::ok(stdout))
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::usage(format!("writing {}: {e}", path.display())))
}
