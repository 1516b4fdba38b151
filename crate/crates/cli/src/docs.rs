//! JSON documents: parsing and canonical emission.
//!
//! Rationals are strings `"p/q"`, integers are JSON numbers when they fit
//! in 64 bits and strings otherwise, and field elements are coefficient
//! arrays of rational strings in the power basis of their field.

use std::path::Path;
use std::sync::Arc;

use elliott_core::algebra::rational::parse_rational;
use elliott_core::algebra::{FieldElement, IntMatrix, NumberField};
use elliott_core::comparison::IsoCertificate;
use elliott_core::dimension::{telescope, GroupElement};
use elliott_core::invariant::TraceRangeModule;
use elliott_core::systems::{
    substitution_to_bv, BaseSystem, Odometer, PointSystem, StationaryBVDiagram, Substitution, APERIODICITY_BOUND,
};
use elliott_core::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use regex::Regex;
use serde_json::{json, Map, Value};

/// Failure of a command: a malformed document or a library error.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn to_doc(&self) -> Value {
        match self {
            CliError::Parse(m) => json!({"error": "ParseError", "message": m}),
            CliError::Domain(e) => json!({"error": e.name(), "message": e.to_string()}),
        }
    }
}

pub type Res<T> = Result<T, CliError>;

pub fn parse_err<T>(msg: impl Into<String>) -> Res<T> {
    Err(CliError::Parse(msg.into()))
}

pub fn read_json(path: &Path) -> Res<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn field<'a>(v: &'a Value, key: &str) -> Res<&'a Value> {
    v.get(key).ok_or_else(|| CliError::Parse(format!("missing key {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Res<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| CliError::Parse(format!("{what} must be an array")))
}

pub fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(i) => json!(i),
        None => json!(n.to_string()),
    }
}

pub fn parse_int(v: &Value) -> Res<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integer literal")),
        Value::String(s) => s.trim().parse().map_err(|_| CliError::Parse(format!("not an integer: {s:?}"))),
        _ => parse_err(format!("not an integer: {v}")),
    }
}

fn parse_u64(v: &Value, what: &str) -> Res<u64> {
    parse_int(v)?.to_u64().ok_or_else(|| CliError::Parse(format!("{what} must be a non-negative integer")))
}

pub fn rat_value(q: &BigRational) -> Value {
    json!(q.to_string())
}

pub fn parse_rat(v: &Value) -> Res<BigRational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|_| CliError::Parse(format!("not a rational: {s:?}"))),
        _ => Ok(BigRational::from_integer(parse_int(v)?)),
    }
}

fn parse_int_vec(v: &Value, what: &str) -> Res<Vec<BigInt>> {
    array(v, what)?.iter().map(parse_int).collect()
}

pub fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(int_value).collect())).collect())
}

pub fn parse_matrix(v: &Value, what: &str) -> Res<IntMatrix> {
    let rows = array(v, what)?
        .iter()
        .map(|r| parse_int_vec(r, what))
        .collect::<Res<Vec<_>>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return parse_err(format!("{what} must be a non-empty rectangular array"));
    }
    Ok(IntMatrix::from_rows(&rows)?)
}

pub fn field_value(f: &NumberField) -> Value {
    let (lo, hi) = f.interval();
    json!({
        "min_poly": f.min_poly().iter().map(int_value).collect::<Vec<_>>(),
        "interval": [rat_value(lo), rat_value(hi)],
    })
}

pub fn parse_field(v: &Value) -> Res<Arc<NumberField>> {
    let poly = parse_int_vec(field(v, "min_poly")?, "min_poly")?;
    let iv = array(field(v, "interval")?, "interval")?;
    if iv.len() != 2 {
        return parse_err("interval must have two endpoints");
    }
    let f = NumberField::new(&poly, parse_rat(&iv[0])?, parse_rat(&iv[1])?)?;
    Ok(if f.is_rational() && f.theta().is_zero() { NumberField::rationals() } else { f })
}

pub fn coeffs_value(e: &FieldElement) -> Value {
    Value::Array(e.coeffs().iter().map(rat_value).collect())
}

pub fn parse_coeffs(f: &Arc<NumberField>, v: &Value) -> Res<FieldElement> {
    let mut coeffs = array(v, "coeffs")?.iter().map(parse_rat).collect::<Res<Vec<_>>>()?;
    if coeffs.len() > f.degree() {
        return parse_err(format!("{} coefficients for a degree-{} field", coeffs.len(), f.degree()));
    }
    coeffs.resize(f.degree(), BigRational::from_integer(0.into()));
    Ok(FieldElement::from_exact_coeffs(f, coeffs)?)
}

pub fn element_value(e: &FieldElement) -> Value {
    json!({"field": field_value(e.field()), "coeffs": coeffs_value(e)})
}

pub fn parse_element(v: &Value) -> Res<FieldElement> {
    let f = parse_field(field(v, "field")?)?;
    parse_coeffs(&f, field(v, "coeffs")?)
}

/// Rationals as `"p/q"` strings, irrationals as element documents.
pub fn exact_value(e: &FieldElement) -> Value {
    match e.as_rational() {
        Some(q) => rat_value(&q),
        None => element_value(e),
    }
}

/// Time parameter from an inline JSON element, a JSON file, or shorthand:
/// `p/q`, `sqrtD`, `sqrtD+k`, `c*sqrtD-k`, `-sqrtD`, `sqrtD_plus_k`.
pub fn parse_time(arg: &str) -> Res<FieldElement> {
    let s = arg.trim();
    if s.starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|e| CliError::Parse(format!("time document: {e}")))?;
        return parse_element(&v);
    }
    if s.ends_with(".json") || Path::new(s).is_file() {
        return parse_element(&read_json(Path::new(s))?);
    }
    if let Ok(q) = parse_rational(s) {
        return Ok(FieldElement::rational(&NumberField::rationals(), q));
    }
    let normalized = s.replace("_plus_", "+").replace("_minus_", "-").replace(' ', "");
    let re = Regex::new(r"^(?:(?P<c>[+-]?\d+(?:/\d+)?)\*)?(?P<neg>-)?sqrt\(?(?P<d>\d+)\)?(?:(?P<op>[+-])(?P<k>\d+(?:/\d+)?))?$")
        .expect("valid pattern");
    let Some(caps) = re.captures(&normalized) else {
        return parse_err(format!("unrecognized time parameter {arg:?}"));
    };
    let d: i64 = caps["d"].parse().map_err(|_| CliError::Parse(format!("radicand too large in {arg:?}")))?;
    let mut c = match caps.name("c") {
        Some(m) => parse_rational(m.as_str()).map_err(|_| CliError::Parse(format!("bad coefficient in {arg:?}")))?,
        None => BigRational::from_integer(1.into()),
    };
    if caps.name("neg").is_some() {
        c = -c;
    }
    let mut k = match caps.name("k") {
        Some(m) => parse_rational(m.as_str()).map_err(|_| CliError::Parse(format!("bad shift in {arg:?}")))?,
        None => BigRational::from_integer(0.into()),
    };
    if caps.name("op").is_some_and(|m| m.as_str() == "-") {
        k = -k;
    }
    let theta = NumberField::sqrt(d)?.theta();
    Ok(theta.scale(&c).add_rational(&k))
}

pub fn group_element_value(g: &GroupElement) -> Value {
    json!({"level": g.level, "vec": g.vec.iter().map(int_value).collect::<Vec<_>>()})
}

/// What a system document describes.
#[derive(Debug, Clone)]
pub enum SystemKind {
    Base(BaseSystem),
    /// Stationary diagram given by its incidence matrix and unit vector.
    Diagram(StationaryBVDiagram),
    /// Edge shift of a primitive graph; entropy commands only.
    Sft(IntMatrix),
}

#[derive(Debug, Clone)]
pub struct SystemDoc {
    pub kind: SystemKind,
    pub telescope: Option<u32>,
    pub aperiodicity_bound: usize,
}

impl SystemDoc {
    /// The presenting stationary diagram, telescoped when requested.
    pub fn diagram(&self) -> Res<StationaryBVDiagram> {
        let d = match &self.kind {
            SystemKind::Base(BaseSystem::Substitution(s)) => {
                s.validate(self.aperiodicity_bound)?;
                substitution_to_bv(s)?
            }
            SystemKind::Base(b) => b.to_diagram()?,
            SystemKind::Diagram(d) => d.clone(),
            SystemKind::Sft(_) => return parse_err("kind \"sft\" is accepted only by entropy commands"),
        };
        Ok(match self.telescope {
            Some(p) => telescope(&d, p)?,
            None => d,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        match &self.kind {
            SystemKind::Base(BaseSystem::Substitution(s)) => {
                m.insert("kind".into(), json!("substitution"));
                m.insert("alphabet".into(), json!(s.alphabet()));
                let single = s.alphabet().iter().all(|a| a.chars().count() == 1);
                let rules: Map<String, Value> = s
                    .alphabet()
                    .iter()
                    .zip(s.rules())
                    .map(|(a, r)| {
                        let syms: Vec<&str> = r.iter().map(|&i| s.alphabet()[i].as_str()).collect();
                        let v = if single { json!(syms.concat()) } else { json!(syms) };
                        (a.clone(), v)
                    })
                    .collect();
                m.insert("rules".into(), Value::Object(rules));
                if self.aperiodicity_bound != APERIODICITY_BOUND {
                    m.insert("aperiodicity_bound".into(), json!(self.aperiodicity_bound));
                }
            }
            SystemKind::Base(BaseSystem::Odometer(o)) => {
                m.insert("kind".into(), json!("odometer"));
                m.insert("base".into(), json!(o.base_cycle()));
            }
            SystemKind::Base(BaseSystem::Point(_)) => {
                m.insert("kind".into(), json!("point"));
            }
            SystemKind::Diagram(d) => {
                m.insert("kind".into(), json!("diagram"));
                m.insert("incidence".into(), matrix_value(d.incidence()));
                m.insert("unit_vec".into(), Value::Array(d.unit_vec().iter().map(int_value).collect()));
            }
            SystemKind::Sft(a) => {
                m.insert("kind".into(), json!("sft"));
                m.insert("adjacency".into(), matrix_value(a));
            }
        }
        if let Some(p) = self.telescope {
            m.insert("telescope".into(), json!(p));
        }
        Value::Object(m)
    }
}

fn parse_symbols(v: &Value, single: bool) -> Res<Vec<String>> {
    match v {
        Value::String(s) if single => Ok(s.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()),
        Value::String(s) => Ok(s.split_whitespace().map(String::from).collect()),
        Value::Array(items) => items
            .iter()
            .map(|x| x.as_str().map(String::from).ok_or_else(|| CliError::Parse("symbols must be strings".into())))
            .collect(),
        _ => parse_err("a rule must be a string or an array of symbols"),
    }
}

pub fn parse_system(v: &Value) -> Res<SystemDoc> {
    let kind = field(v, "kind")?.as_str().ok_or_else(|| CliError::Parse("kind must be a string".into()))?;
    let kind = match kind {
        "substitution" => {
            let alphabet: Vec<String> = array(field(v, "alphabet")?, "alphabet")?
                .iter()
                .map(|x| x.as_str().map(String::from).ok_or_else(|| CliError::Parse("symbols must be strings".into())))
                .collect::<Res<_>>()?;
            let rules = field(v, "rules")?
                .as_object()
                .ok_or_else(|| CliError::Parse("rules must be an object".into()))?;
            let single = alphabet.iter().all(|a| a.chars().count() == 1);
            let mut images = Vec::new();
            for a in &alphabet {
                let rule = rules.get(a).ok_or_else(|| CliError::Parse(format!("no rule for symbol {a:?}")))?;
                images.push(parse_symbols(rule, single)?);
            }
            if let Some(extra) = rules.keys().find(|k| !alphabet.contains(k)) {
                return parse_err(format!("rule for unknown symbol {extra:?}"));
            }
            SystemKind::Base(BaseSystem::Substitution(Substitution::new(alphabet, images)?))
        }
        "odometer" => {
            let base = array(field(v, "base")?, "base")?
                .iter()
                .map(|b| parse_u64(b, "base entry"))
                .collect::<Res<Vec<_>>>()?;
            SystemKind::Base(BaseSystem::Odometer(Odometer::new(base)?))
        }
        "point" => SystemKind::Base(BaseSystem::Point(PointSystem)),
        "diagram" => {
            let m = parse_matrix(field(v, "incidence")?, "incidence")?;
            let unit = match v.get("unit_vec") {
                Some(u) => parse_int_vec(u, "unit_vec")?,
                None => vec![BigInt::from(1); m.rows()],
            };
            SystemKind::Diagram(StationaryBVDiagram::new(m, unit)?)
        }
        "sft" => SystemKind::Sft(parse_matrix(field(v, "adjacency")?, "adjacency")?),
        other => return parse_err(format!("unknown system kind {other:?}")),
    };
    let telescope = match v.get("telescope") {
        Some(p) => Some(
            parse_u64(p, "telescope")?
                .try_into()
                .map_err(|_| CliError::Parse("telescope exponent too large".into()))?,
        ),
        None => None,
    };
    let aperiodicity_bound = match v.get("aperiodicity_bound") {
        Some(b) => parse_u64(b, "aperiodicity_bound")? as usize,
        None => APERIODICITY_BOUND,
    };
    Ok(SystemDoc { kind, telescope, aperiodicity_bound })
}

pub fn trace_range_value(r: &TraceRangeModule) -> Value {
    let gens: Vec<Value> = r.fixed.iter().chain(&r.divisible).map(coeffs_value).collect();
    let divides: Vec<bool> = r.fixed.iter().map(|_| false).chain(r.divisible.iter().map(|_| true)).collect();
    json!({
        "field": field_value(&r.field),
        "unit": coeffs_value(&r.unit),
        "gens": gens,
        "unit_divides": divides,
    })
}

/// `unit_divides[i]` marks generators that the unit may divide; it defaults
/// to every generator.
pub fn parse_trace_range(v: &Value) -> Res<TraceRangeModule> {
    let f = parse_field(field(v, "field")?)?;
    let unit = match v.get("unit") {
        Some(u) => parse_coeffs(&f, u)?,
        None => FieldElement::one(&f),
    };
    let gens = array(field(v, "gens")?, "gens")?
        .iter()
        .map(|g| parse_coeffs(&f, g))
        .collect::<Res<Vec<_>>>()?;
    let divides: Vec<bool> = match v.get("unit_divides") {
        Some(d) => array(d, "unit_divides")?
            .iter()
            .map(|b| b.as_bool().ok_or_else(|| CliError::Parse("unit_divides entries must be booleans".into())))
            .collect::<Res<_>>()?,
        None => vec![true; gens.len()],
    };
    if divides.len() != gens.len() {
        return parse_err("unit_divides must match gens in length");
    }
    let (mut fixed, mut divisible) = (Vec::new(), Vec::new());
    for (g, d) in gens.into_iter().zip(divides) {
        if d {
            divisible.push(g);
        } else {
            fixed.push(g);
        }
    }
    Ok(TraceRangeModule::with_kinds(&f, unit, fixed, divisible)?)
}

pub fn parse_certificate(v: &Value) -> Res<IsoCertificate> {
    let block = parse_matrix(field(v, "block")?, "block")?;
    let p = parse_u64(field(v, "source_level_offset")?, "source_level_offset")?;
    let q = parse_u64(field(v, "target_level_offset")?, "target_level_offset")?;
    let (Ok(p), Ok(q)) = (u32::try_from(p), u32::try_from(q)) else {
        return parse_err("level offsets too large");
    };
    let mut cert = IsoCertificate::new(block, p, q);
    if let Some(c) = v.get("mixing_column") {
        cert.mixing_column = parse_int_vec(c, "mixing_column")?;
    }
    if let Some(s) = v.get("scale") {
        cert.scale = parse_int(s)?;
    }
    if let Some(a) = v.get("assume_same_measures") {
        cert.assume_same_measures =
            a.as_bool().ok_or_else(|| CliError::Parse("assume_same_measures must be a boolean".into()))?;
    }
    Ok(cert)
}
