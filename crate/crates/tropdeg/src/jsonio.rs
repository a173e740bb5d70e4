//! Canonical JSON encoding of the exposed types.
//!
//! Integers serialize as decimal strings so arbitrary precision survives
//! any JSON parser; maps are written with sorted keys and cones in
//! canonical order, so identical values always produce byte-identical
//! output.

use crate::arrangement::LinearForms;
use crate::cone::Cone;
use crate::degeneration::DegenerationFan;
use crate::exactlat::{Int, IntVec, Rat};
use crate::fan::Fan;
use crate::grassmann::ClassificationReport;
use crate::normalfan::PointConfiguration;
use crate::strata::VolumeLedger;
use num_traits::One;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("malformed input at {context}: {message}")]
    Malformed { context: String, message: String },
}

fn malformed(context: &str, message: impl Into<String>) -> JsonError {
    JsonError::Malformed {
        context: context.to_string(),
        message: message.into(),
    }
}

/// Serializes with lexicographically sorted object keys, two-space indent,
/// and a trailing newline: byte-identical output for equal values.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Arrays of scalars stay on one line; nested values get their own.
            let scalar = items.iter().all(|v| !v.is_object() && !v.is_array());
            if scalar {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&v.to_string());
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, v) in items.iter().enumerate() {
                    out.push_str(&"  ".repeat(indent + 1));
                    write_value(out, v, indent + 1);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
        }
        other => out.push_str(&other.to_string()),
    }
}

pub fn int_to_value(x: &Int) -> Value {
    Value::String(x.to_str_radix(10))
}

pub fn vec_to_value(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_to_value).collect())
}

pub fn rows_to_value(rows: &[IntVec]) -> Value {
    Value::Array(rows.iter().map(|r| vec_to_value(r)).collect())
}

pub fn int_from_value(v: &Value, context: &str) -> Result<Int, JsonError> {
    let s = v
        .as_str()
        .ok_or_else(|| malformed(context, "integers must be decimal strings"))?;
    s.parse::<Int>()
        .map_err(|e| malformed(context, format!("bad integer {s:?}: {e}")))
}

pub fn vec_from_value(v: &Value, context: &str) -> Result<IntVec, JsonError> {
    let arr = v
        .as_array()
        .ok_or_else(|| malformed(context, "expected an array"))?;
    arr.iter().map(|x| int_from_value(x, context)).collect()
}

pub fn rows_from_value(v: &Value, context: &str) -> Result<Vec<IntVec>, JsonError> {
    let arr = v
        .as_array()
        .ok_or_else(|| malformed(context, "expected an array of arrays"))?;
    arr.iter().map(|x| vec_from_value(x, context)).collect()
}

pub fn rat_to_value(x: &Rat) -> Value {
    if x.denom().is_one() {
        Value::String(x.numer().to_str_radix(10))
    } else {
        Value::String(format!(
            "{}/{}",
            x.numer().to_str_radix(10),
            x.denom().to_str_radix(10)
        ))
    }
}

pub fn rat_from_value(v: &Value, context: &str) -> Result<Rat, JsonError> {
    let s = v
        .as_str()
        .ok_or_else(|| malformed(context, "rationals must be strings like \"p\" or \"p/q\""))?;
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = num
        .parse::<Int>()
        .map_err(|e| malformed(context, format!("bad numerator: {e}")))?;
    let d = den
        .parse::<Int>()
        .map_err(|e| malformed(context, format!("bad denominator: {e}")))?;
    if d == Int::from(0) {
        return Err(malformed(context, "zero denominator"));
    }
    Ok(Rat::new(n, d))
}

pub fn cone_to_value(c: &Cone) -> Value {
    json!({
        "ambient_rank": c.ambient_rank(),
        "rays": rows_to_value(c.rays()),
        "lineality": rows_to_value(c.lineality()),
    })
}

pub fn cone_from_value(v: &Value, context: &str) -> Result<Cone, JsonError> {
    let rank = v["ambient_rank"]
        .as_u64()
        .ok_or_else(|| malformed(context, "missing ambient_rank"))? as usize;
    let rays = rows_from_value(&v["rays"], context)?;
    let lineality = if v["lineality"].is_null() {
        Vec::new()
    } else {
        rows_from_value(&v["lineality"], context)?
    };
    let mut gens = rays;
    for l in lineality {
        gens.push(l.iter().map(|x| -x).collect());
        gens.push(l);
    }
    Cone::from_generators(rank, &gens).map_err(|e| malformed(context, e.to_string()))
}

pub fn fan_to_value(f: &Fan, last_coordinate_distinguished: bool) -> Value {
    json!({
        "ambient_rank": f.ambient_rank(),
        "last_coordinate_distinguished": last_coordinate_distinguished,
        "cones": Value::Array(f.cones().iter().map(cone_to_value).collect()),
    })
}

/// Parses and validates a fan file; invalid fans are rejected.
pub fn fan_from_value(v: &Value, context: &str) -> Result<Fan, JsonError> {
    let (fan, report) = fan_from_value_with_report(v, context)?;
    if !report_is_valid(&report) {
        return Err(malformed(context, "cones do not satisfy the fan axioms"));
    }
    Ok(fan)
}

/// Parses a fan file without rejecting invalid input, returning the
/// validation report alongside. Used by `fan --validate`.
pub fn fan_from_value_with_report(
    v: &Value,
    context: &str,
) -> Result<(Fan, crate::fan::FanValidationReport), JsonError> {
    let rank = v["ambient_rank"]
        .as_u64()
        .ok_or_else(|| malformed(context, "missing ambient_rank"))? as usize;
    let cones_v = v["cones"]
        .as_array()
        .ok_or_else(|| malformed(context, "missing cones array"))?;
    let mut cones = Vec::with_capacity(cones_v.len());
    for (i, cv) in cones_v.iter().enumerate() {
        cones.push(cone_from_value(cv, &format!("{context}.cones[{i}]"))?);
    }
    let fan = Fan::close_and_sort(rank, &cones);
    let report = fan.validate();
    Ok((fan, report))
}

pub fn report_is_valid(r: &crate::fan::FanValidationReport) -> bool {
    r.is_valid()
}

pub fn validation_report_to_value(f: &Fan, r: &crate::fan::FanValidationReport) -> Value {
    json!({
        "valid": r.is_valid(),
        "missing_faces": Value::Array(
            r.missing_faces
                .iter()
                .map(|(i, face)| json!({"cone_index": i, "face": cone_to_value(face)}))
                .collect(),
        ),
        "bad_pairs": Value::Array(
            r.bad_pairs
                .iter()
                .map(|(i, j)| json!({
                    "first": cone_to_value(&f.cones()[*i]),
                    "second": cone_to_value(&f.cones()[*j]),
                }))
                .collect(),
        ),
    })
}

pub fn config_to_value(c: &PointConfiguration) -> Value {
    let mut points = Map::new();
    for (label, v) in c.points() {
        points.insert(label.clone(), vec_to_value(v));
    }
    let mut out = Map::new();
    out.insert("m_rank".to_string(), json!(c.m_rank()));
    out.insert("points".to_string(), Value::Object(points));
    if let Some(kappa) = c.kappa() {
        let mut k = Map::new();
        for (label, x) in kappa {
            k.insert(label.clone(), int_to_value(x));
        }
        out.insert("kappa".to_string(), Value::Object(k));
    }
    Value::Object(out)
}

pub fn config_from_value(v: &Value, context: &str) -> Result<PointConfiguration, JsonError> {
    let m_rank = v["m_rank"]
        .as_u64()
        .ok_or_else(|| malformed(context, "missing m_rank"))? as usize;
    let points_v = v["points"]
        .as_object()
        .ok_or_else(|| malformed(context, "missing points object"))?;
    let mut points: BTreeMap<String, IntVec> = BTreeMap::new();
    for (label, pv) in points_v {
        points.insert(
            label.clone(),
            vec_from_value(pv, &format!("{context}.points.{label}"))?,
        );
    }
    let config = if let Some(kv) = v.get("kappa").filter(|k| !k.is_null()) {
        let kappa_v = kv
            .as_object()
            .ok_or_else(|| malformed(context, "kappa must be an object"))?;
        let mut kappa: BTreeMap<String, Int> = BTreeMap::new();
        for (label, x) in kappa_v {
            kappa.insert(
                label.clone(),
                int_from_value(x, &format!("{context}.kappa.{label}"))?,
            );
        }
        PointConfiguration::with_kappa(m_rank, points, kappa)
    } else {
        PointConfiguration::new(m_rank, points)
    };
    config.map_err(|e| malformed(context, e.to_string()))
}

pub fn arrangement_to_value(lf: &LinearForms) -> Value {
    let mut forms = Map::new();
    for (i, f) in lf.forms().iter().enumerate() {
        forms.insert(
            i.to_string(),
            Value::Array(f.iter().map(rat_to_value).collect()),
        );
    }
    json!({
        "n": lf.projective_dim(),
        "forms": Value::Object(forms),
    })
}

pub fn arrangement_from_value(v: &Value, context: &str) -> Result<LinearForms, JsonError> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| malformed(context, "missing n"))? as usize;
    let forms_v = v["forms"]
        .as_object()
        .ok_or_else(|| malformed(context, "missing forms object"))?;
    let mut labeled: Vec<(usize, Vec<Rat>)> = Vec::new();
    for (label, fv) in forms_v {
        let idx: usize = label
            .parse()
            .map_err(|_| malformed(context, format!("form labels must be 0..d, got {label:?}")))?;
        let arr = fv
            .as_array()
            .ok_or_else(|| malformed(context, "each form must be an array"))?;
        let row: Result<Vec<Rat>, JsonError> =
            arr.iter().map(|x| rat_from_value(x, context)).collect();
        labeled.push((idx, row?));
    }
    labeled.sort_by_key(|(i, _)| *i);
    for (expect, (got, _)) in labeled.iter().enumerate() {
        if expect != *got {
            return Err(malformed(context, "form labels must be consecutive from 0"));
        }
    }
    LinearForms::new(n, labeled.into_iter().map(|(_, f)| f).collect())
        .map_err(|e| malformed(context, e.to_string()))
}

/// Per-cone classification report of a degeneration fan.
pub fn degeneration_to_value(df: &DegenerationFan) -> Value {
    let cones: Vec<Value> = df
        .fan()
        .cones()
        .iter()
        .zip(df.flags())
        .map(|(c, f)| {
            json!({
                "cone": cone_to_value(c),
                "zero": f.zero,
                "spe": f.spe,
                "bdd": f.bdd,
                "slice_euler": df.slice_euler(c).expect("cone from this fan"),
            })
        })
        .collect();
    json!({
        "ambient_rank": df.fan().ambient_rank(),
        "last_coordinate_distinguished": true,
        "cones": Value::Array(cones),
    })
}

pub fn ledger_to_value(ledger: &VolumeLedger) -> Value {
    let entries: Vec<Value> = ledger
        .entries
        .iter()
        .map(|e| {
            let s = &e.stratum;
            let mut reduced = Map::new();
            for (label, v) in &s.placement.reduced {
                reduced.insert(label.clone(), vec_to_value(v));
            }
            json!({
                "sign": e.sign,
                "cone": cone_to_value(&s.cone),
                "omega": vec_to_value(&s.placement.omega),
                "support_labels": s.placement.support.clone(),
                "reduced_exponents": Value::Object(reduced),
                "product_split": match &s.product_split {
                    Some(c) => cone_to_value(c),
                    None => Value::Null,
                },
                "span_dim": s.span_dim,
                "exact": s.exact,
                "probabilistic": s.probabilistic,
            })
        })
        .collect();
    json!({ "entries": Value::Array(entries) })
}

pub fn classification_report_to_value(r: &ClassificationReport) -> Value {
    json!({
        "n": r.n,
        "d": r.d,
        "l": r.l,
        "exhaustive": r.exhaustive,
        "pass": r.pass(),
        "checks": Value::Array(
            r.checks
                .iter()
                .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
                .collect(),
        ),
    })
}
