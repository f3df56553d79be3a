//! JSON file formats: matrices, embeddings, braids, systems, and towers.
//! Rationals are written as decimal integers or `p/q` in lowest terms; no
//! binary formats, so golden files stay diffable.

use crate::braids::ColoredBraid;
use crate::cat::BraidedObject;
use crate::cubes::{LinearEmbedding, Square};
use crate::factsys::FactorizedSystem;
use crate::limits::ProjectiveSystem;
use crate::matrix::Matrix;
use crate::perm::Permutation;
use crate::scalar::{format_rational, is_prime, parse_rational, FieldTag, Scalar};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn parse_err(msg: impl Into<String>) -> IoError {
    IoError::Parse(msg.into())
}

pub fn read_json(path: &Path) -> Result<Value, IoError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

// ---- scalars ----------------------------------------------------------

fn scalar_to_value(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

fn scalar_from_value(v: &Value, field: FieldTag) -> Result<Scalar, IoError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(parse_err(format!("expected a scalar, got {other}"))),
    };
    match field {
        FieldTag::Q => {
            let r = parse_rational(&text)
                .ok_or_else(|| parse_err(format!("invalid rational: {text}")))?;
            Ok(Scalar::Q(r))
        }
        FieldTag::Fp(p) => {
            let n: i128 = text
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("invalid integer mod {p}: {text}")))?;
            let v = n.rem_euclid(p as i128) as u64;
            Ok(Scalar::Fp { v, p })
        }
    }
}

pub fn field_to_value(field: FieldTag) -> Value {
    match field {
        FieldTag::Q => json!({ "field": "Q" }),
        FieldTag::Fp(p) => json!({ "field": "Fp", "p": p }),
    }
}

pub fn field_from_value(v: &Value) -> Result<FieldTag, IoError> {
    let name = v
        .get("field")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("missing field tag"))?;
    match name {
        "Q" => Ok(FieldTag::Q),
        "Fp" => {
            let p = v
                .get("p")
                .and_then(Value::as_u64)
                .ok_or_else(|| parse_err("Fp field needs a prime p"))?;
            if !is_prime(p) {
                return Err(parse_err(format!("{p} is not prime")));
            }
            Ok(FieldTag::Fp(p))
        }
        other => Err(parse_err(format!("unknown field: {other}"))),
    }
}

/// Parse a `--field` style spec: `Q` or `Fp:<p>`.
pub fn field_from_spec(spec: &str) -> Result<FieldTag, IoError> {
    if spec == "Q" {
        return Ok(FieldTag::Q);
    }
    if let Some(p) = spec.strip_prefix("Fp:") {
        let p: u64 = p
            .parse()
            .map_err(|_| parse_err(format!("invalid prime in field spec: {spec}")))?;
        if !is_prime(p) {
            return Err(parse_err(format!("{p} is not prime")));
        }
        return Ok(FieldTag::Fp(p));
    }
    Err(parse_err(format!("unknown field spec: {spec} (use Q or Fp:<p>)")))
}

// ---- matrices ---------------------------------------------------------

pub fn matrix_to_value(m: &Matrix) -> Value {
    let mut obj = match field_to_value(m.field()) {
        Value::Object(o) => o,
        _ => unreachable!(),
    };
    let entries: Vec<Value> = (0..m.rows())
        .map(|r| {
            Value::Array(
                (0..m.cols())
                    .map(|c| scalar_to_value(m.at(r, c)))
                    .collect(),
            )
        })
        .collect();
    obj.insert("entries".into(), Value::Array(entries));
    Value::Object(obj)
}

pub fn matrix_from_value(v: &Value) -> Result<Matrix, IoError> {
    let field = field_from_value(v)?;
    let rows = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("matrix needs an entries array"))?;
    if rows.is_empty() {
        return Err(parse_err("matrix entries must be non-empty"));
    }
    let cols = rows[0]
        .as_array()
        .ok_or_else(|| parse_err("matrix rows must be arrays"))?
        .len();
    let mut entries = Vec::with_capacity(rows.len() * cols);
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| parse_err("matrix rows must be arrays"))?;
        if row.len() != cols {
            return Err(parse_err("matrix rows have unequal lengths"));
        }
        for e in row {
            entries.push(scalar_from_value(e, field)?);
        }
    }
    Ok(Matrix::new(rows.len(), cols, field, entries))
}

// ---- embeddings -------------------------------------------------------

pub fn embedding_to_value(e: &LinearEmbedding) -> Value {
    Value::Array(
        e.squares()
            .iter()
            .map(|s| {
                json!({
                    "a": format_rational(&s.scale),
                    "x": format_rational(&s.x),
                    "y": format_rational(&s.y),
                })
            })
            .collect(),
    )
}

pub fn embedding_from_value(v: &Value) -> Result<LinearEmbedding, IoError> {
    let records = v
        .as_array()
        .ok_or_else(|| parse_err("embedding must be an array of records"))?;
    let mut squares = Vec::with_capacity(records.len());
    for rec in records {
        let get = |key: &str| -> Result<_, IoError> {
            let raw = rec
                .get(key)
                .ok_or_else(|| parse_err(format!("square record missing '{key}'")))?;
            let text = match raw {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => return Err(parse_err(format!("invalid coordinate: {other}"))),
            };
            parse_rational(&text).ok_or_else(|| parse_err(format!("invalid rational: {text}")))
        };
        squares.push(Square::new(get("a")?, get("x")?, get("y")?));
    }
    Ok(LinearEmbedding::new(squares))
}

// ---- permutations and braids ------------------------------------------

/// One-line notation, 1-indexed in files.
pub fn permutation_to_value(p: &Permutation) -> Value {
    Value::Array(p.images().iter().map(|&i| json!(i + 1)).collect())
}

pub fn permutation_from_value(v: &Value) -> Result<Permutation, IoError> {
    let arr = v
        .as_array()
        .ok_or_else(|| parse_err("permutation must be an array"))?;
    let mut images = Vec::with_capacity(arr.len());
    for e in arr {
        let n = e
            .as_u64()
            .ok_or_else(|| parse_err("permutation entries must be positive integers"))?;
        if n == 0 {
            return Err(parse_err("permutation entries are 1-indexed"));
        }
        images.push((n - 1) as usize);
    }
    Permutation::from_images(images).map_err(|e| parse_err(e.to_string()))
}

pub fn braid_to_value(b: &ColoredBraid) -> Value {
    json!({
        "strands": b.strand_count(),
        "word": b.word(),
        "source_order": permutation_to_value(b.source_order()),
        "target_order": permutation_to_value(b.target_order()),
    })
}

pub fn braid_from_value(v: &Value) -> Result<ColoredBraid, IoError> {
    let strands = v
        .get("strands")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err("braid needs a strand count"))? as usize;
    let word: Vec<i32> = v
        .get("word")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("braid needs a word array"))?
        .iter()
        .map(|e| {
            e.as_i64()
                .and_then(|n| i32::try_from(n).ok())
                .ok_or_else(|| parse_err("braid word entries must be nonzero integers"))
        })
        .collect::<Result<_, _>>()?;
    let source = match v.get("source_order") {
        Some(p) => permutation_from_value(p)?,
        None => Permutation::identity(strands),
    };
    let braid = ColoredBraid::new(strands, word, source).map_err(|e| parse_err(e.to_string()))?;
    if let Some(t) = v.get("target_order") {
        let target = permutation_from_value(t)?;
        if &target != braid.target_order() {
            return Err(parse_err(
                "target_order does not match the word's underlying permutation",
            ));
        }
    }
    Ok(braid)
}

// ---- systems ----------------------------------------------------------

pub fn system_to_value(s: &FactorizedSystem) -> Value {
    json!({
        "object": matrix_to_value(s.object().braiding()),
        "koszul": s.object().koszul_sign(),
        "depth": s.depth(),
        "gauge": s.gauge_list().iter().map(matrix_to_value).collect::<Vec<_>>(),
        "unit": matrix_to_value(s.unit()),
    })
}

/// Loads a system without certifying it; `base` resolves `{"path": ...}`
/// object references relative to the file that contained them.
pub fn system_from_value(v: &Value, base: Option<&Path>) -> Result<FactorizedSystem, IoError> {
    let obj_value = v
        .get("object")
        .ok_or_else(|| parse_err("system needs an object"))?;
    let braiding = match obj_value {
        Value::String(path) => matrix_from_value(&read_json(&resolve(base, path))?)?,
        Value::Object(map) if map.contains_key("path") => {
            let path = map
                .get("path")
                .and_then(Value::as_str)
                .ok_or_else(|| parse_err("object path must be a string"))?;
            matrix_from_value(&read_json(&resolve(base, path))?)?
        }
        inline => matrix_from_value(inline)?,
    };
    if braiding.rows() != braiding.cols() {
        return Err(parse_err("object matrix must be square"));
    }
    let rank = integer_sqrt(braiding.rows())
        .ok_or_else(|| parse_err("object matrix side must be a perfect square r^2"))?;
    let koszul = v.get("koszul").and_then(Value::as_bool).unwrap_or(true);
    let depth = v
        .get("depth")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err("system needs a depth"))? as usize;
    let gauge = match v.get("gauge") {
        None | Some(Value::Null) => None,
        Some(Value::Array(items)) => {
            if items.len() != depth {
                return Err(parse_err(format!(
                    "gauge list has {} entries, expected one per degree 1..={}",
                    items.len(),
                    depth
                )));
            }
            let mut out = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let m = matrix_from_value(item)?;
                let expected = rank.pow((i + 1) as u32);
                if m.rows() != expected || m.cols() != expected {
                    return Err(parse_err(format!(
                        "gauge at degree {} must be {}x{}",
                        i + 1,
                        expected,
                        expected
                    )));
                }
                if m.field() != braiding.field() {
                    return Err(parse_err("gauge field differs from object field"));
                }
                out.push(m);
            }
            Some(out)
        }
        Some(other) => return Err(parse_err(format!("invalid gauge list: {other}"))),
    };
    let unit = match v.get("unit") {
        None | Some(Value::Null) => None,
        Some(u) => {
            let m = matrix_from_value(u)?;
            if m.rows() != 1 || m.cols() != 1 {
                return Err(parse_err("unit must be a 1x1 matrix"));
            }
            Some(m)
        }
    };
    let object = BraidedObject::new_unchecked(rank, braiding, koszul);
    Ok(FactorizedSystem::from_parts_unchecked(
        object, depth, gauge, unit,
    ))
}

fn resolve(base: Option<&Path>, rel: &str) -> std::path::PathBuf {
    match base {
        Some(dir) => dir.join(rel),
        None => std::path::PathBuf::from(rel),
    }
}

fn integer_sqrt(n: usize) -> Option<usize> {
    let mut r = 0usize;
    while r * r < n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

// ---- towers -----------------------------------------------------------

pub fn tower_to_value(t: &ProjectiveSystem) -> Value {
    let levels: Vec<Value> = t.levels().iter().map(system_to_value).collect();
    let mut transitions = Map::new();
    for ((d, e), mats) in t.transition_entries() {
        let key = format!("{d},{e}");
        transitions.insert(
            key,
            Value::Array(mats.iter().map(matrix_to_value).collect()),
        );
    }
    json!({ "levels": levels, "transitions": Value::Object(transitions) })
}

pub fn tower_from_value(v: &Value, base: Option<&Path>) -> Result<ProjectiveSystem, IoError> {
    let levels_value = v
        .get("levels")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("tower needs a levels array"))?;
    let mut levels = Vec::with_capacity(levels_value.len());
    for (d, lv) in levels_value.iter().enumerate() {
        let sys = system_from_value(lv, base)?;
        if sys.depth() != d {
            return Err(parse_err(format!(
                "tower level {d} must have depth {d}, got {}",
                sys.depth()
            )));
        }
        levels.push(sys);
    }
    let mut transitions = BTreeMap::new();
    if let Some(map) = v.get("transitions").and_then(Value::as_object) {
        for (key, mats) in map {
            let (d, e) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| parse_err(format!("invalid transition key: {key}")))?;
            let mats = mats
                .as_array()
                .ok_or_else(|| parse_err("transition must be an array of matrices"))?
                .iter()
                .map(matrix_from_value)
                .collect::<Result<Vec<_>, _>>()?;
            transitions.insert((d, e), mats);
        }
    }
    ProjectiveSystem::from_parts(levels, transitions).map_err(parse_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldTag;

    #[test]
    fn matrix_roundtrip_q() {
        let m = Matrix::from_i64_rows(FieldTag::Q, &[&[1, -2], &[0, 1]]);
        let v = matrix_to_value(&m);
        assert_eq!(matrix_from_value(&v).unwrap(), m);
    }

    #[test]
    fn matrix_roundtrip_fp() {
        let m = Matrix::from_i64_rows(FieldTag::Fp(7), &[&[1, 6], &[0, 1]]);
        let v = matrix_to_value(&m);
        assert_eq!(matrix_from_value(&v).unwrap(), m);
    }

    #[test]
    fn matrix_rejects_ragged_and_bad_field() {
        let v = json!({"field": "Q", "entries": [["1", "2"], ["3"]]});
        assert!(matrix_from_value(&v).is_err());
        let v = json!({"field": "Fp", "p": 6, "entries": [["1"]]});
        assert!(matrix_from_value(&v).is_err());
    }

    #[test]
    fn embedding_roundtrip() {
        let e = LinearEmbedding::canonical_vertical(3);
        let v = embedding_to_value(&e);
        assert_eq!(embedding_from_value(&v).unwrap(), e);
    }

    #[test]
    fn braid_roundtrip_and_target_check() {
        let b = ColoredBraid::new(3, vec![1, -2], Permutation::identity(3)).unwrap();
        let v = braid_to_value(&b);
        assert_eq!(braid_from_value(&v).unwrap(), b);
        let mut bad = v.clone();
        bad["target_order"] = json!([1, 2, 3]);
        assert!(braid_from_value(&bad).is_err());
    }

    #[test]
    fn field_specs() {
        assert_eq!(field_from_spec("Q").unwrap(), FieldTag::Q);
        assert_eq!(field_from_spec("Fp:7").unwrap(), FieldTag::Fp(7));
        assert!(field_from_spec("Fp:6").is_err());
        assert!(field_from_spec("R").is_err());
    }
}
