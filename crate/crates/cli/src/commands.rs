//! One function per subcommand. Every input document is parsed before any
//! computation starts.

use elliott_core::algebra::{perron_data, FieldElement, IntMatrix};
use elliott_core::comparison::{
    compare_invariants, rotation_isomorphic, rotation_range, trace_range_equal, verify_iso_certificate,
    ComparisonReport, IsoCertificate,
};
use elliott_core::dimension::{dg_from_diagram, dg_order_unit};
use elliott_core::entropy::{
    cylinder_measure, estimate_suspension_entropy, sft_entropy, suspension_entropy, suspension_measure,
    time_t_minimality_status, EstimatorBase, ExactEntropy,
};
use elliott_core::invariant::{
    invariant_from_diagram, trace_range, ElliottInvariant, TimeParam, TraceRangeModule, MINIMALITY_ASSUMPTION,
};
use elliott_core::systems::{factor_complexity, BaseSystem};
use elliott_core::Error;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::docs::*;

const UNIQUE_TRACE_NOTE: &str =
    "primitive stationary diagram: simple dimension group with a unique normalized trace (strictly ergodic base)";
const ROTATION_ASSUMPTION: &str = "rotation algebras A_t and A_s are isomorphic iff t = ±s mod Z";
const ENTROPY_ASSUMPTION: &str = "entropy of the time-t map equals |t| times the entropy of the base";
const ESTIMATOR_NOTE: &str =
    "numerical estimate from maximal (n, eps)-separated sets on a dyadic fiber grid; growth rate between n/2 and n";

fn strings(items: &[&str]) -> Value {
    json!(items)
}

/// Validation report for a base system.
pub fn describe(sys: &SystemDoc) -> Res<Value> {
    if let (SystemKind::Sft(a), None) = (&sys.kind, sys.telescope) {
        return describe_sft(a);
    }
    let d = sys.diagram()?;
    let g = dg_from_diagram(&d)?;
    let mut report = Map::new();
    report.insert("system".into(), sys.to_value());
    report.insert("primitive".into(), json!(true));
    if let SystemKind::Base(BaseSystem::Substitution(s)) = &sys.kind {
        let bound = sys.aperiodicity_bound;
        let complexity: Vec<usize> = (1..=bound).map(|n| factor_complexity(s, n)).collect();
        report.insert(
            "aperiodicity".into(),
            json!({"bound": bound, "passed": true, "complexity": complexity, "note": "p(n) >= n + 1 checked up to the bound; a necessary condition only"}),
        );
    }
    report.insert("incidence".into(), matrix_value(d.incidence()));
    report.insert(
        "perron".into(),
        json!({
            "field": field_value(g.field()),
            "field_description": g.field().describe(),
            "lambda": coeffs_value(g.lambda()),
            "lambda_approx": g.lambda().to_f64(),
        }),
    );
    report.insert("trace_vec".into(), Value::Array(g.trace_vec().iter().map(coeffs_value).collect()));
    report.insert("order_unit".into(), group_element_value(&dg_order_unit(&g)));
    report.insert("unique_trace".into(), json!(UNIQUE_TRACE_NOTE));
    report.insert("assumptions".into(), strings(&[UNIQUE_TRACE_NOTE]));
    Ok(Value::Object(report))
}

pub fn build_invariant(sys: &SystemDoc, t: &FieldElement) -> Res<ElliottInvariant> {
    if t.is_rational() {
        return Err(Error::RationalTime.into());
    }
    Ok(invariant_from_diagram(&sys.diagram()?, &TimeParam::new(t.clone()))?)
}

pub fn invariant_value(sys: &SystemDoc, t: &FieldElement, inv: &ElliottInvariant) -> Res<Value> {
    let unit = inv.order_unit();
    Ok(json!({
        "system": sys.to_value(),
        "t": element_value(t),
        "k0": {
            "summands": inv.k0_summands(),
            "rank": inv.k0_rank()?,
            "order_unit": [int_value(&unit.n), group_element_value(&unit.z)],
        },
        "k1": inv.k1_descriptor(),
        "trace": {
            "field": field_value(inv.trace_field()),
            "t": coeffs_value(inv.t()),
            "basis": inv.basis_traces().iter().map(coeffs_value).collect::<Vec<_>>(),
            "lambda": coeffs_value(inv.lambda()),
        },
        "trace_range": trace_range_value(&trace_range(inv)?),
        "assumptions": inv.assumptions(),
    }))
}

pub fn invariant(sys: &SystemDoc, t: &FieldElement) -> Res<Value> {
    let inv = build_invariant(sys, t)?;
    invariant_value(sys, t, &inv)
}

pub fn trace_range_report(sys: &SystemDoc, t: &FieldElement) -> Res<Value> {
    let inv = build_invariant(sys, t)?;
    let mut doc = trace_range_value(&trace_range(&inv)?);
    doc["assumptions"] = json!(inv.assumptions());
    Ok(doc)
}

/// An invariant document whose system and time have been parsed but not
/// yet evaluated.
pub struct InvariantDoc {
    pub system: SystemDoc,
    pub t: FieldElement,
    pub given: Value,
}

pub fn parse_invariant_doc(v: &Value) -> Res<InvariantDoc> {
    let (Some(sys), Some(t)) = (v.get("system"), v.get("t")) else {
        return parse_err("invariant document needs \"system\" and \"t\"");
    };
    Ok(InvariantDoc { system: parse_system(sys)?, t: parse_element(t)?, given: v.clone() })
}

/// Rebuilds the invariant and checks that the document agrees with it.
pub fn load_invariant(doc: &InvariantDoc) -> Res<ElliottInvariant> {
    let inv = build_invariant(&doc.system, &doc.t)?;
    let emitted = invariant_value(&doc.system, &doc.t, &inv)?;
    for key in ["k0", "k1", "trace", "trace_range"] {
        if let Some(given) = doc.given.get(key) {
            if given != &emitted[key] {
                return parse_err(format!("invariant document field {key:?} disagrees with its system and t"));
            }
        }
    }
    Ok(inv)
}

/// A trace-range document, or an invariant document carrying one.
pub fn parse_range_doc(v: &Value) -> Res<TraceRangeModule> {
    match v.get("trace_range") {
        Some(r) => parse_trace_range(r),
        None => parse_trace_range(v),
    }
}

pub fn compare_ranges(a: &TraceRangeModule, b: &TraceRangeModule) -> Res<Value> {
    Ok(json!({
        "equal": trace_range_equal(a, b)?,
        "assumptions": [],
    }))
}

pub fn rotation_compare(t1: &FieldElement, t2: &FieldElement) -> Res<Value> {
    let iso = rotation_isomorphic(t1, t2)?;
    let ranges = trace_range_equal(&rotation_range(t1)?, &rotation_range(t2)?)?;
    Ok(json!({
        "isomorphic": iso,
        "trace_ranges_equal": ranges,
        "t1": element_value(t1),
        "t2": element_value(t2),
        "assumptions": [ROTATION_ASSUMPTION],
    }))
}

fn report_value(r: &ComparisonReport) -> Value {
    let checks: Map<String, Value> = r.reasons.iter().map(|c| (c.name.clone(), json!(c.passed))).collect();
    let details: Map<String, Value> = r.reasons.iter().map(|c| (c.name.clone(), json!(c.detail))).collect();
    json!({
        "verdict": r.verdict.name(),
        "checks": checks,
        "details": details,
        "assumptions": r.assumptions,
    })
}

pub fn compare_invariants_report(a: &ElliottInvariant, b: &ElliottInvariant) -> Res<Value> {
    Ok(report_value(&compare_invariants(a, b)))
}

pub fn check_certificate(a: &ElliottInvariant, b: &ElliottInvariant, cert: &IsoCertificate) -> Res<Value> {
    Ok(report_value(&verify_iso_certificate(a, b, cert)?))
}

fn entropy_value(h: &ExactEntropy) -> Value {
    json!({"coefficient": exact_value(h.coefficient()), "log_base": exact_value(h.base())})
}

/// Exact entropy of the base; subshifts of substitutions, odometers and
/// stationary diagrams have none.
fn base_entropy(sys: &SystemDoc) -> Res<ExactEntropy> {
    match &sys.kind {
        SystemKind::Sft(a) => {
            let a = match sys.telescope {
                Some(p) => a.pow(p)?,
                None => a.clone(),
            };
            Ok(sft_entropy(&a)?)
        }
        _ => {
            sys.diagram()?;
            Ok(ExactEntropy::zero())
        }
    }
}

pub fn entropy(sys: &SystemDoc, t: &FieldElement) -> Res<Value> {
    let h = base_entropy(sys)?;
    let ht = suspension_entropy(&h, t)?;
    let status = time_t_minimality_status(&TimeParam::new(t.clone()));
    let mut assumptions = vec![ENTROPY_ASSUMPTION];
    if !t.is_rational() {
        assumptions.push(MINIMALITY_ASSUMPTION);
    }
    Ok(json!({
        "exact": entropy_value(&ht),
        "approx": ht.approx(),
        "base": entropy_value(&h),
        "t": element_value(t),
        "minimality": status.name(),
        "assumptions": assumptions,
    }))
}

fn estimator_base(sys: &SystemDoc) -> Res<EstimatorBase> {
    match &sys.kind {
        SystemKind::Sft(a) => Ok(EstimatorBase::Sft(match sys.telescope {
            Some(p) => a.pow(p)?,
            None => a.clone(),
        })),
        SystemKind::Base(BaseSystem::Substitution(s)) if sys.telescope.is_none() => {
            s.validate(sys.aperiodicity_bound)?;
            Ok(EstimatorBase::Substitution(s.clone()))
        }
        SystemKind::Base(BaseSystem::Point(_)) => Ok(EstimatorBase::Sft(IntMatrix::identity(1))),
        _ => Err(Error::InvalidInput("the estimator needs a subshift: sft, substitution or point".into()).into()),
    }
}

pub fn estimate_entropy(sys: &SystemDoc, t: &FieldElement, n: usize, eps: &BigRational, budget: u128) -> Res<Value> {
    let Some(tq) = t.as_rational() else {
        return Err(Error::InvalidInput("the estimator takes a rational t".into()).into());
    };
    let base = estimator_base(sys)?;
    let est = estimate_suspension_entropy(&base, &tq, n, eps, budget)?;
    let reference = suspension_entropy(&base_entropy(sys)?, t)?;
    Ok(json!({
        "estimate": est.estimate,
        "raw": est.raw,
        "n": est.n,
        "n0": est.n0,
        "count": int_value(&est.count),
        "count_n0": int_value(&est.count_n0),
        "radius": est.radius,
        "fibers": est.fibers,
        "t": rat_value(&tq),
        "eps": rat_value(eps),
        "reference": {"exact": entropy_value(&reference), "approx": reference.approx()},
        "relative_error": if reference.approx() > 0.0 { json!((est.estimate - reference.approx()).abs() / reference.approx()) } else { Value::Null },
        "assumptions": [ENTROPY_ASSUMPTION, ESTIMATOR_NOTE],
    }))
}

/// Word in the symbols of the base: letters for substitutions, digits for
/// odometers (one character each when every base is at most 10, otherwise
/// comma or space separated).
pub fn parse_measure_word(sys: &SystemDoc, word: &str) -> Res<Vec<usize>> {
    match &sys.kind {
        SystemKind::Base(BaseSystem::Substitution(s)) => Ok(s.parse_word(word)?),
        SystemKind::Base(BaseSystem::Odometer(o)) => {
            let tokens: Vec<String> = if o.base_cycle().iter().all(|&b| b <= 10) {
                word.chars().filter(|c| c.is_ascii_digit()).map(String::from).collect()
            } else {
                word.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(String::from).collect()
            };
            if tokens.iter().map(String::len).sum::<usize>() == 0 && !word.trim().is_empty() && o.base_cycle().iter().all(|&b| b <= 10) {
                return Err(Error::IllegalWord(word.into()).into());
            }
            tokens
                .iter()
                .map(|t| t.parse::<usize>().map_err(|_| Error::IllegalWord(format!("not a digit: {t:?}")).into()))
                .collect()
        }
        SystemKind::Base(BaseSystem::Point(_)) if word.trim().is_empty() => Ok(Vec::new()),
        SystemKind::Base(BaseSystem::Point(_)) => Err(Error::IllegalWord(word.into()).into()),
        _ => Err(Error::InvalidInput("measures are defined for substitution, odometer and point systems".into()).into()),
    }
}

pub fn measure(sys: &SystemDoc, word: &[usize], a: &BigRational, b: &BigRational) -> Res<Value> {
    let SystemKind::Base(base) = &sys.kind else {
        return Err(Error::InvalidInput("measures are defined for substitution, odometer and point systems".into()).into());
    };
    if sys.telescope.is_some() {
        return Err(Error::InvalidInput("measures are computed on the untelescoped system".into()).into());
    }
    if let BaseSystem::Substitution(s) = base {
        s.validate(sys.aperiodicity_bound)?;
    }
    let m = suspension_measure(base, word, a, b)?;
    let cyl = cylinder_measure(base, word)?;
    Ok(json!({
        "measure": exact_value(&m),
        "approx": m.to_f64(),
        "cylinder_measure": exact_value(&cyl),
        "word": word,
        "interval": [rat_value(a), rat_value(b)],
        "assumptions": [UNIQUE_TRACE_NOTE],
    }))
}

/// Perron data and entropy of an SFT input.
pub fn describe_sft(a: &IntMatrix) -> Res<Value> {
    let p = perron_data(a)?;
    let h = sft_entropy(a)?;
    Ok(json!({
        "system": {"kind": "sft", "adjacency": matrix_value(a)},
        "primitive": true,
        "perron": {
            "field": field_value(&p.field),
            "field_description": p.field.describe(),
            "lambda": coeffs_value(&p.lambda),
            "lambda_approx": p.lambda.to_f64(),
        },
        "entropy": {"exact": entropy_value(&h), "approx": h.approx()},
        "assumptions": [],
    }))
}
