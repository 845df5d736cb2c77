//! Request dispatch for the command-line front end.
//!
//! Every command takes a JSON payload, validated before any computation.
//! Errors carry the path of the offending field; a failed request prints
//! only the error document.

use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::algebra::{build_conformal, build_cr, Algebra, Element};
use crate::classifier::{classify, conjugate_by_exp, Classification, HolonomyDatum, Verdict};
use crate::error::Error;
use crate::flat::suite::run_identity_suite;
use crate::flat::{ConformalModel, FieldParams, FlatConformalField, PointVerdict};
use crate::linalg::Matrix;
use crate::oracle::{brute_force_oracle, OracleMethod, OracleReport};
use crate::rational::{self, rat, Rat};
use crate::sampling::{self, DEFAULT_SEED};
use crate::scales::{default_scale, scale_from_element};

pub const DEFAULT_IDENTITY_FIELDS: usize = 20;
pub const DEFAULT_ORACLE_INSTANCES: usize = 500;
pub const DEFAULT_GRID_STEPS: u32 = 2;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    AlgebraInfo,
    AlgebraVerify,
    Classify,
    FlatClassify,
    VerifyIdentities,
    OracleCompare,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::AlgebraInfo,
        Command::AlgebraVerify,
        Command::Classify,
        Command::FlatClassify,
        Command::VerifyIdentities,
        Command::OracleCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::AlgebraInfo => "algebra-info",
            Command::AlgebraVerify => "algebra-verify",
            Command::Classify => "classify",
            Command::FlatClassify => "flat-classify",
            Command::VerifyIdentities => "verify-identities",
            Command::OracleCompare => "oracle-compare",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Json,
    Text,
}

impl FromStr for OutputMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputMode::Json),
            "text" => Ok(OutputMode::Text),
            _ => Err(format!("unknown output mode {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub output: OutputMode,
    pub seed: u64,
    pub instances: Option<usize>,
    pub grid_radius: Rat,
    pub grid_steps: u32,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            output: OutputMode::Json,
            seed: DEFAULT_SEED,
            instances: None,
            grid_radius: rat(2),
            grid_steps: DEFAULT_GRID_STEPS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Request {
    pub command: Command,
    pub payload: Value,
    pub options: Options,
}

impl Request {
    /// Reads `{"command": ..., "payload": {...}, "output": "json"|"text"}`;
    /// the output field overrides `options.output`.
    pub fn from_document(doc: &Value, mut options: Options) -> Result<Self, CliError> {
        let obj = as_object(doc, "request")?;
        only_keys(obj, "request", &["command", "payload", "output"])?;
        let command = as_str(required(obj, "request", "command")?, "request.command")?
            .parse()
            .map_err(|e| CliError::schema("request.command", e))?;
        let payload = required(obj, "request", "payload")?.clone();
        if let Some(out) = obj.get("output") {
            options.output =
                as_str(out, "request.output")?.parse().map_err(|e| CliError::schema("request.output", e))?;
        }
        Ok(Self { command, payload, options })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Schema,
    Domain,
    Internal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub path: String,
    pub message: String,
}

impl CliError {
    pub fn schema(path: &str, message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Schema, path: path.into(), message: message.into() }
    }

    fn from_error(path: &str, e: Error) -> Self {
        let kind = match e {
            Error::Invariant(_) | Error::Structural(_) => ErrorKind::Internal,
            _ => ErrorKind::Domain,
        };
        Self { kind, path: path.into(), message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Schema | ErrorKind::Domain => EXIT_DOMAIN,
            ErrorKind::Internal => EXIT_INTERNAL,
        }
    }

    pub fn outcome(&self, mode: OutputMode) -> Outcome {
        let report = match mode {
            OutputMode::Json => render_json(&self.to_json()),
            OutputMode::Text => format!("error [{}]: {}\n", self.path, self.message),
        };
        Outcome { report, exit_code: self.exit_code() }
    }

    fn to_json(&self) -> Value {
        let kind = match self.kind {
            ErrorKind::Schema => "schema",
            ErrorKind::Domain => "domain",
            ErrorKind::Internal => "internal",
        };
        json!({ "error": { "kind": kind, "path": self.path, "message": self.message } })
    }
}

/// Rendered report and process exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub exit_code: i32,
}

struct Success {
    json: Value,
    text: String,
    exit_code: i32,
}

pub fn run(request: &Request) -> Outcome {
    let result = match request.command {
        Command::AlgebraInfo => algebra_info(&request.payload),
        Command::AlgebraVerify => algebra_verify(&request.payload),
        Command::Classify => classify_command(&request.payload),
        Command::FlatClassify => flat_classify(&request.payload),
        Command::VerifyIdentities => verify_identities(&request.payload, &request.options),
        Command::OracleCompare => oracle_compare(&request.payload, &request.options),
    };
    match result {
        Ok(s) => Outcome {
            report: match request.options.output {
                OutputMode::Json => render_json(&s.json),
                OutputMode::Text => s.text,
            },
            exit_code: s.exit_code,
        },
        Err(e) => e.outcome(request.options.output),
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

// ---- payload helpers ----

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| CliError::schema(path, "expected an object"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, CliError> {
    v.as_str().ok_or_else(|| CliError::schema(path, "expected a string"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| CliError::schema(path, "expected an array"))
}

fn as_int(v: &Value, path: &str) -> Result<i64, CliError> {
    v.as_i64().ok_or_else(|| CliError::schema(path, "expected an integer"))
}

fn as_rational(v: &Value, path: &str) -> Result<Rat, CliError> {
    rational::from_json(v).ok_or_else(|| CliError::schema(path, "expected a number or a \"p/q\" string"))
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, CliError> {
    obj.get(key).ok_or_else(|| CliError::schema(&format!("{path}.{key}"), "required field is missing"))
}

fn only_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), CliError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::schema(&format!("{path}.{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn rational_vector(v: &Value, path: &str, len: Option<usize>) -> Result<Vec<Rat>, CliError> {
    let items = as_array(v, path)?;
    if let Some(n) = len {
        if items.len() != n {
            return Err(CliError::schema(path, format!("expected {n} entries, got {}", items.len())));
        }
    }
    items.iter().enumerate().map(|(i, x)| as_rational(x, &format!("{path}[{i}]"))).collect()
}

fn int_pair(v: &Value, path: &str) -> Result<(i64, i64), CliError> {
    let items = as_array(v, path)?;
    if items.len() != 2 {
        return Err(CliError::schema(path, "expected two integers"));
    }
    Ok((as_int(&items[0], &format!("{path}[0]"))?, as_int(&items[1], &format!("{path}[1]"))?))
}

/// `{"family": ..., "params": [...]}` inside `obj`.
fn algebra_from(obj: &Map<String, Value>, path: &str) -> Result<Algebra, CliError> {
    let family = as_str(required(obj, path, "family")?, &format!("{path}.family"))?;
    let params_path = format!("{path}.params");
    let params = as_array(required(obj, path, "params")?, &params_path)?;
    let ints: Vec<i64> =
        params.iter().enumerate().map(|(i, p)| as_int(p, &format!("{params_path}[{i}]"))).collect::<Result<_, _>>()?;
    let built = match (family, ints.as_slice()) {
        ("conformal", [p, q]) => build_conformal(*p, *q),
        ("cr", [n]) => build_cr(*n),
        ("conformal", _) => return Err(CliError::schema(&params_path, "conformal takes [p, q]")),
        ("cr", _) => return Err(CliError::schema(&params_path, "cr takes [n]")),
        _ => return Err(CliError::schema(&format!("{path}.family"), "expected \"conformal\" or \"cr\"")),
    };
    built.map_err(|e| CliError::from_error(&params_path, e))
}

fn named_element(algebra: &Algebra, v: &Value, path: &str) -> Result<Element, CliError> {
    let obj = as_object(v, path)?;
    let mut coeffs = vec![Rat::zero(); algebra.dim()];
    for (name, c) in obj {
        let p = format!("{path}.{name}");
        let i = algebra.index_of(name).ok_or_else(|| CliError::schema(&p, "not a basis element name"))?;
        coeffs[i] = as_rational(c, &p)?;
    }
    algebra.element(coeffs).map_err(|e| CliError::from_error(path, e))
}

// ---- commands ----

fn algebra_info(payload: &Value) -> Result<Success, CliError> {
    let obj = as_object(payload, "payload")?;
    only_keys(obj, "payload", &["family", "params"])?;
    let algebra = algebra_from(obj, "payload")?;
    let scale = default_scale(&algebra);
    let e = algebra.grading_element();
    let b_ee = algebra.killing_form(&e, &e).map_err(|e| CliError::from_error("payload", e))?;
    let k = algebra.depth();
    let dims: Vec<Value> =
        (-k..=k).zip(algebra.grade_dims()).map(|(g, d)| json!({ "grade": g, "dim": d })).collect();
    let json = json!({
        "algebra": algebra.describe(),
        "dim": algebra.dim(),
        "depth": k,
        "grade_dims": dims,
        "grading_element": e.to_named_json_in(0..=0),
        "killing_EE": rational::to_json(&b_ee),
        "ker_lambda_dim": scale.kernel_basis().len(),
        "scale": scale.to_json(),
    });
    let mut text = String::new();
    let _ = writeln!(text, "algebra {}", algebra.descriptor());
    let _ = writeln!(text, "dim {}", algebra.dim());
    let _ = writeln!(
        text,
        "grade dims {}",
        algebra.grade_dims().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
    );
    let _ = writeln!(text, "grading element {e}");
    let _ = writeln!(text, "B(E,E) {}", rational::format(&b_ee));
    let _ = writeln!(text, "dim Ker(lambda') {}", scale.kernel_basis().len());
    Ok(Success { json, text, exit_code: EXIT_OK })
}

fn algebra_verify(payload: &Value) -> Result<Success, CliError> {
    let obj = as_object(payload, "payload")?;
    only_keys(obj, "payload", &["family", "params", "include_constants"])?;
    let include = match obj.get("include_constants") {
        None => false,
        Some(v) => v.as_bool().ok_or_else(|| CliError::schema("payload.include_constants", "expected a boolean"))?,
    };
    let algebra = algebra_from(obj, "payload")?;
    let report = algebra.verify_axioms();
    let mut json = json!({ "algebra": algebra.describe(), "axioms": report.to_json() });
    if include {
        json["structure_constants"] = algebra.structure_triples();
    }
    let text = format!(
        "algebra {}\nantisymmetry violations {}\nJacobi residual {}\ngrading violations {}\ngenerated by g_-1 {}\nKilling rank {}/{}\npassed {}\n",
        algebra.descriptor(),
        report.antisymmetry_violations,
        rational::format(&report.jacobi_residual),
        report.grading_violations,
        report.generated_by_minus_one,
        report.killing_rank,
        report.dim,
        report.passed(),
    );
    let exit_code = if report.passed() { EXIT_OK } else { EXIT_INTERNAL };
    Ok(Success { json, text, exit_code })
}

fn classification_text(c: &Classification) -> String {
    let mut text = String::new();
    let label = if c.verdict.is_essential() { "Essential" } else { "Inessential" };
    let _ = writeln!(text, "verdict {label} ({})", c.verdict.name());
    let _ = writeln!(text, "lambda' {}", rational::format(&c.lambda));
    if let Some(w) = &c.witness {
        let _ = writeln!(text, "witness {w}");
    }
    if let Some(cert) = &c.certificate {
        let _ = writeln!(text, "certificate {}", cert.to_json());
    }
    let _ = writeln!(text, "exact {}", c.is_exact());
    text
}

fn classify_command(payload: &Value) -> Result<Success, CliError> {
    let obj = as_object(payload, "payload")?;
    only_keys(obj, "payload", &["family", "params", "element", "scale"])?;
    let algebra = algebra_from(obj, "payload")?;
    let x = named_element(&algebra, required(obj, "payload", "element")?, "payload.element")?;
    let scale = match obj.get("scale") {
        None => default_scale(&algebra),
        Some(v) => {
            let e = named_element(&algebra, v, "payload.scale")?;
            scale_from_element(&algebra, &e).map_err(|e| CliError::from_error("payload.scale", e))?
        }
    };
    let datum = HolonomyDatum::new(x, scale).map_err(|e| CliError::from_error("payload.element", e))?;
    let c = classify(&datum).map_err(|e| CliError::from_error("payload.element", e))?;
    Ok(Success { json: c.to_json(), text: classification_text(&c), exit_code: EXIT_OK })
}

fn field_from(v: &Value, path: &str) -> Result<FlatConformalField, CliError> {
    let obj = as_object(v, path)?;
    only_keys(obj, path, &["a", "A", "s", "b", "signature"])?;
    let (p, q) = int_pair(required(obj, path, "signature")?, &format!("{path}.signature"))?;
    let model = ConformalModel::new(p, q).map_err(|e| CliError::from_error(&format!("{path}.signature"), e))?;
    let n = model.dim();
    let a = rational_vector(required(obj, path, "a")?, &format!("{path}.a"), Some(n))?;
    let b = rational_vector(required(obj, path, "b")?, &format!("{path}.b"), Some(n))?;
    let s = as_rational(required(obj, path, "s")?, &format!("{path}.s"))?;
    let rows_path = format!("{path}.A");
    let rows = as_array(required(obj, path, "A")?, &rows_path)?;
    if rows.len() != n {
        return Err(CliError::schema(&rows_path, format!("expected {n} rows")));
    }
    let mut rotation = Matrix::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        let entries = rational_vector(row, &format!("{rows_path}[{r}]"), Some(n))?;
        for (c, v) in entries.into_iter().enumerate() {
            rotation[(r, c)] = v;
        }
    }
    FlatConformalField::from_params(&model, &FieldParams { a, rotation, s, b })
        .map_err(|e| CliError::from_error(&rows_path, e))
}

fn flat_classify(payload: &Value) -> Result<Success, CliError> {
    let obj = as_object(payload, "payload")?;
    only_keys(obj, "payload", &["field", "point"])?;
    let field = field_from(required(obj, "payload", "field")?, "payload.field")?;
    let n = field.model().dim();
    let point = rational_vector(required(obj, "payload", "point")?, "payload.point", Some(n))?;
    let verdict = field.classify_at(&point).map_err(|e| CliError::from_error("payload.point", e))?;
    let mut json = json!({ "field": field.to_json(), "point": rational::vec_to_json(&point) });
    let mut text = String::new();
    match verdict {
        PointVerdict::NonSingular { value } => {
            json["singular"] = json!(false);
            json["verdict"] = json!("Inessential");
            json["reason"] = json!("non_singular");
            json["value"] = rational::vec_to_json(&value);
            let _ = writeln!(text, "non-singular point, field value {:?}", value.iter().map(rational::format).collect::<Vec<_>>());
            let _ = writeln!(text, "verdict Inessential (locally, no singularity)");
        }
        PointVerdict::Singular { datum, classification } => {
            json["singular"] = json!(true);
            json["verdict"] = json!(if classification.verdict.is_essential() { "Essential" } else { "Inessential" });
            json["holonomy"] = datum.x().to_named_json_in(0..=datum.algebra().depth());
            json["classification"] = classification.to_json();
            let _ = writeln!(text, "singular point, holonomy {}", datum.x());
            text.push_str(&classification_text(&classification));
        }
    }
    Ok(Success { json, text, exit_code: EXIT_OK })
}

fn verify_identities(payload: &Value, options: &Options) -> Result<Success, CliError> {
    let obj = as_object(payload, "payload")?;
    only_keys(obj, "payload", &["signature", "fields"])?;
    let (p, q) = int_pair(required(obj, "payload", "signature")?, "payload.signature")?;
    let model = ConformalModel::new(p, q).map_err(|e| CliError::from_error("payload.signature", e))?;
    let fields = match obj.get("fields") {
        Some(v) => usize::try_from(as_int(v, "payload.fields")?)
            .map_err(|_| CliError::schema("payload.fields", "expected a non-negative integer"))?,
        None => options.instances.unwrap_or(DEFAULT_IDENTITY_FIELDS),
    };
    let report = run_identity_suite(&model, fields, options.seed).map_err(|e| CliError::from_error("payload", e))?;
    let mut json = report.to_json();
    json["seed"] = json!(options.seed);
    let text = format!(
        "signature ({p},{q}), {fields} fields, seed {}\nmax |nabla s_X| {:e}\ncurvature exactly zero {}\nmax Killing residual {:e}\nbracket sign {} holds {}\nmax equivariance residual {:e}\nmax Weyl section residual {:e} over {} cases\npassed {}\n",
        options.seed,
        report.max_tractor_derivative,
        report.curvature_zero,
        report.max_killing_residual,
        crate::constants::FIELD_BRACKET_SIGN,
        report.bracket_sign_holds,
        report.max_equivariance,
        report.max_weyl,
        report.weyl_cases,
        report.passed(),
    );
    let exit_code = if report.passed() { EXIT_OK } else { EXIT_INTERNAL };
    Ok(Success { json, text, exit_code })
}

/// Outcome of comparing the classifier with the oracle on one instance.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub classification: Classification,
    pub oracle: OracleReport,
    pub witness_verified: bool,
}

impl Comparison {
    pub fn certified(&self) -> bool {
        self.oracle.verdict.is_some()
    }

    pub fn agrees(&self) -> bool {
        self.oracle.verdict.is_none_or(|v| v == self.classification.verdict) && self.witness_verified
    }
}

pub fn compare_instance(datum: &HolonomyDatum, radius: &Rat, steps: u32) -> Result<Comparison, Error> {
    let classification = classify(datum)?;
    let oracle = brute_force_oracle(datum, radius, steps)?;
    let k = datum.algebra().depth();
    let witness_verified = match &classification.witness {
        None => true,
        Some(z) if classification.is_exact() => {
            let conj = conjugate_by_exp(z, datum.x())?;
            conj.components(1..=k).is_zero()
                && (classification.verdict != Verdict::Inessential || datum.lambda().is_zero())
        }
        Some(_) => true,
    };
    Ok(Comparison { classification, oracle, witness_verified })
}

/// Seeded instances for `oracle-compare`.
pub fn oracle_instances(algebra: &Algebra, count: usize, seed: u64, lattice_radius: i64) -> Vec<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| match algebra.depth() {
            1 => sampling::random_depth_one(algebra, &mut rng),
            _ => sampling::random_depth_two(algebra, lattice_radius, &mut rng),
        })
        .collect()
}

fn oracle_compare(payload: &Value, options: &Options) -> Result<Success, CliError> {
    let obj = as_object(payload, "payload")?;
    only_keys(obj, "payload", &["family", "params"])?;
    let algebra = algebra_from(obj, "payload")?;
    if !options.grid_radius.is_positive() || options.grid_steps == 0 {
        return Err(CliError::schema("options.grid", "grid radius and steps must be positive"));
    }
    let n = options.instances.unwrap_or(DEFAULT_ORACLE_INSTANCES);
    // planted lattice conjugates use integer coordinates inside the grid
    let spacing = &options.grid_radius / Rat::from_integer(options.grid_steps.into());
    let lattice_radius = if spacing.is_integer() && spacing == rat(1) {
        options.grid_steps as i64
    } else {
        0
    };
    let instances = oracle_instances(&algebra, n, options.seed, lattice_radius);
    let scale = default_scale(&algebra);
    let results: Vec<Result<Comparison, Error>> = instances
        .par_iter()
        .map(|x| {
            let datum = HolonomyDatum::new(x.clone(), scale.clone())?;
            compare_instance(&datum, &options.grid_radius, options.grid_steps)
        })
        .collect();
    let mut comparisons = Vec::with_capacity(n);
    for (i, r) in results.into_iter().enumerate() {
        comparisons.push(r.map_err(|e| CliError::from_error(&format!("instances[{i}]"), e))?);
    }
    let certified = comparisons.iter().filter(|c| c.certified()).count();
    let agree = comparisons.iter().filter(|c| c.certified() && c.agrees()).count();
    let disagreements: Vec<usize> =
        comparisons.iter().enumerate().filter(|(_, c)| !c.agrees()).map(|(i, _)| i).collect();
    let count = |v: Verdict| comparisons.iter().filter(|c| c.classification.verdict == v).count();
    let rank = comparisons.iter().filter(|c| c.oracle.method == OracleMethod::RankCertificate).count();
    let lattice = comparisons.iter().filter(|c| c.oracle.method == OracleMethod::Lattice).count();
    let exact = comparisons.iter().filter(|c| c.classification.is_exact()).count();
    let json = json!({
        "algebra": algebra.descriptor().to_string(),
        "seed": options.seed,
        "instances": n,
        "grid": { "radius": rational::to_json(&options.grid_radius), "steps": options.grid_steps },
        "certified": certified,
        "agreement": format!("{agree}/{certified}"),
        "disagreements": disagreements,
        "classifier": {
            "Inessential": count(Verdict::Inessential),
            "WeylReducible": count(Verdict::WeylReducible),
            "Essential": count(Verdict::Essential),
            "exact": exact,
        },
        "oracle": { "rank_certificate": rank, "lattice": lattice, "inconclusive": n - certified },
    });
    let text = format!(
        "{} seed {}: agreement {agree}/{certified} ({} inconclusive)\n",
        algebra.descriptor(),
        options.seed,
        n - certified
    );
    let exit_code = if disagreements.is_empty() { EXIT_OK } else { EXIT_INTERNAL };
    Ok(Success { json, text, exit_code })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(command: Command, payload: Value) -> Request {
        Request { command, payload, options: Options::default() }
    }

    fn run_json(command: Command, payload: Value) -> (Value, i32) {
        let out = run(&request(command, payload));
        (serde_json::from_str(&out.report).unwrap(), out.exit_code)
    }

    #[test]
    fn classify_dilation() {
        let (v, code) = run_json(
            Command::Classify,
            json!({"family": "conformal", "params": [3, 0], "element": {"D": 1}}),
        );
        assert_eq!(code, 0);
        assert_eq!(v["verdict"], "Essential");
        assert_eq!(v["certificate"], json!({"lambda_nonzero": 6}));
    }

    #[test]
    fn classify_rotation() {
        let (v, _) = run_json(
            Command::Classify,
            json!({"family": "conformal", "params": [3, 0], "element": {"M_12": 1}}),
        );
        assert_eq!(v["verdict"], "Inessential");
        assert_eq!(v["witness"], json!({"K_1": 0, "K_2": 0, "K_3": 0}));
    }

    #[test]
    fn errors_carry_paths() {
        let (v, code) = run_json(
            Command::Classify,
            json!({"family": "conformal", "params": [3, 0], "element": {"Q_7": 1}}),
        );
        assert_eq!(code, 1);
        assert_eq!(v["error"]["path"], "payload.element.Q_7");
        let (v, _) = run_json(Command::Classify, json!({"family": "conformal", "params": [3, 0]}));
        assert_eq!(v["error"]["path"], "payload.element");
        let (v, _) = run_json(
            Command::Classify,
            json!({"family": "conformal", "params": [3, 0], "element": {"P_1": 1}}),
        );
        assert_eq!(v["error"]["kind"], "domain");
        let (v, _) = run_json(Command::AlgebraInfo, json!({"family": "conformal", "params": [3, "x"]}));
        assert_eq!(v["error"]["path"], "payload.params[1]");
        let (v, _) = run_json(Command::AlgebraInfo, json!({"family": "conformal", "params": [3, 0], "extra": 1}));
        assert_eq!(v["error"]["path"], "payload.extra");
    }

    #[test]
    fn algebra_info_reports() {
        let (v, code) = run_json(Command::AlgebraInfo, json!({"family": "cr", "params": [1]}));
        assert_eq!(code, 0);
        assert_eq!(v["killing_EE"], 12);
        assert_eq!(v["dim"], 8);
        assert_eq!(v["ker_lambda_dim"], 1);
    }

    #[test]
    fn flat_classify_shortcut_and_singular() {
        let field = json!({"a": [1, 0], "A": [[0, 0], [0, 0]], "s": 0, "b": [0, 0], "signature": [2, 0]});
        let (v, _) = run_json(Command::FlatClassify, json!({"field": field, "point": [0, 0]}));
        assert_eq!(v["reason"], "non_singular");
        let field = json!({"a": [0, 0], "A": [[0, 1], [-1, 0]], "s": 0, "b": [0, 0], "signature": [2, 0]});
        let (v, _) = run_json(Command::FlatClassify, json!({"field": field, "point": [0, 0]}));
        assert_eq!(v["singular"], true);
        assert_eq!(v["verdict"], "Inessential");
        let bad = json!({"a": [0, 0], "A": [[0, 1], [1, 0]], "s": 0, "b": [0, 0], "signature": [2, 0]});
        let (v, code) = run_json(Command::FlatClassify, json!({"field": bad, "point": [0, 0]}));
        assert_eq!(code, 1);
        assert_eq!(v["error"]["path"], "payload.field.A");
    }

    #[test]
    fn request_documents() {
        let doc = json!({"command": "algebra-info", "payload": {"family": "conformal", "params": [2, 0]}, "output": "text"});
        let r = Request::from_document(&doc, Options::default()).unwrap();
        assert_eq!(r.command, Command::AlgebraInfo);
        assert_eq!(r.options.output, OutputMode::Text);
        let out = run(&r);
        assert!(out.report.contains("B(E,E) 4"));
        let err = Request::from_document(&json!({"command": "nope", "payload": {}}), Options::default()).unwrap_err();
        assert_eq!(err.path, "request.command");
    }

    #[test]
    fn small_oracle_compare_is_deterministic() {
        let mut r = request(Command::OracleCompare, json!({"family": "conformal", "params": [3, 0]}));
        r.options.instances = Some(20);
        let a = run(&r);
        let b = run(&r);
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a.report).unwrap();
        assert_eq!(v["agreement"], "20/20");
    }
}
