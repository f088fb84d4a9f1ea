//! JSON specification documents: an isogeny decomposition or an explicit
//! product of elliptic curves over a real number field.
//!
//! Rationals and field coefficients are strings such as `"-3/4"`; JSON
//! floating-point numbers are rejected everywhere.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::classifier::{AlbertType, FactorKind, IsogenyFactor, IsogenySpec};
use crate::error::{Error, Result};
use crate::exactmath::{format_rational, parse_integer, parse_rational, QMatrix, Rational, RealNumberField};
use crate::torus::{AlternatingForm, ComplexTorus};

pub const MAX_FACTORS: usize = 64;
pub const MAX_MULTIPLICITY: usize = 64;
pub const MAX_SIMPLE_DIM: usize = 1024;
pub const MAX_BLOCKS: usize = 8;
pub const MAX_FIELD_DEGREE: usize = 8;
pub const MAX_CLASSES: usize = 64;
pub const MAX_LABEL_LEN: usize = 64;
/// Bound on the size of any number literal, in decimal digits.
pub const MAX_DIGITS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecDocument {
    Isogeny(IsogenyDocument),
    Torus(TorusDocument),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorEntry {
    pub label: Option<String>,
    pub kind: FactorKind,
    pub mult: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyDocument {
    pub factors: Vec<FactorEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldEntry {
    /// Coefficients low to high.
    pub min_poly: Vec<BigInt>,
    pub root_interval: (Rational, Rational),
}

/// The curve `C / (Z + tau Z)` with `tau = a + i beta`, `beta` given by its
/// coefficients on the power basis of the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockEntry {
    pub label: Option<String>,
    pub a: Rational,
    pub beta: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassEntry {
    pub label: Option<String>,
    pub matrix: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusDocument {
    pub field: Option<FieldEntry>,
    pub blocks: Vec<BlockEntry>,
    pub classes: Vec<ClassEntry>,
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = object(value, "$")?;
        match str_field(obj, "kind", "$")? {
            "isogeny" => {
                check_keys(obj, &["kind", "factors"], "$")?;
                Ok(SpecDocument::Isogeny(IsogenyDocument::from_object(obj)?))
            }
            "torus" => {
                check_keys(obj, &["kind", "field", "blocks", "classes"], "$")?;
                Ok(SpecDocument::Torus(TorusDocument::from_object(obj)?))
            }
            other => Err(Error::schema("$.kind", format!("expected \"isogeny\" or \"torus\", got {other:?}"))),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SpecDocument::Isogeny(d) => d.to_json(),
            SpecDocument::Torus(d) => d.to_json(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpecDocument::Isogeny(_) => "isogeny",
            SpecDocument::Torus(_) => "torus",
        }
    }
}

impl IsogenyDocument {
    fn from_object(obj: &Map<String, Value>) -> Result<Self> {
        let items = array(get(obj, "factors", "$")?, "$.factors")?;
        if items.is_empty() {
            return Err(Error::schema("$.factors", "at least one factor is required"));
        }
        if items.len() > MAX_FACTORS {
            return Err(Error::schema("$.factors", format!("at most {MAX_FACTORS} factors are supported")));
        }
        let factors = items
            .iter()
            .enumerate()
            .map(|(i, v)| parse_factor(v, &format!("$.factors[{i}]")))
            .collect::<Result<_>>()?;
        Ok(IsogenyDocument { factors })
    }

    pub fn to_json(&self) -> Value {
        let factors: Vec<Value> = self
            .factors
            .iter()
            .map(|f| {
                let mut m = Map::new();
                if let Some(l) = &f.label {
                    m.insert("label".into(), json!(l));
                }
                match &f.kind {
                    FactorKind::Elliptic { has_cm } => {
                        m.insert("type".into(), json!("elliptic"));
                        m.insert("cm".into(), json!(has_cm));
                    }
                    FactorKind::Surface { albert_type, picard } => {
                        m.insert("type".into(), json!("surface"));
                        m.insert("albert_type".into(), json!(albert_type.as_str()));
                        m.insert("picard".into(), json!(picard));
                    }
                    FactorKind::SimpleOther { dim } => {
                        m.insert("type".into(), json!("simple_other"));
                        m.insert("dim".into(), json!(dim));
                    }
                }
                m.insert("mult".into(), json!(f.mult));
                Value::Object(m)
            })
            .collect();
        json!({ "kind": "isogeny", "factors": factors })
    }

    /// Validated spec; unlabeled factors get distinct labels `F1, F2, ..`.
    pub fn to_spec(&self) -> Result<IsogenySpec> {
        let factors = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| IsogenyFactor {
                label: f.label.clone().unwrap_or_else(|| format!("F{}", i + 1)),
                kind: f.kind.clone(),
                mult: f.mult,
            })
            .collect();
        IsogenySpec::new(factors)
    }
}

fn parse_factor(v: &Value, path: &str) -> Result<FactorEntry> {
    let obj = object(v, path)?;
    let label = opt_label(obj, path)?;
    let mult = count(get(obj, "mult", path)?, &format!("{path}.mult"), 1, MAX_MULTIPLICITY)?;
    let kind = match str_field(obj, "type", path)? {
        "elliptic" => {
            check_keys(obj, &["label", "type", "mult", "cm"], path)?;
            let cm = get(obj, "cm", path)?;
            let has_cm = cm.as_bool().ok_or_else(|| Error::schema(format!("{path}.cm"), "expected a boolean"))?;
            FactorKind::Elliptic { has_cm }
        }
        "surface" => {
            check_keys(obj, &["label", "type", "mult", "albert_type", "picard"], path)?;
            let t = str_field(obj, "albert_type", path)?;
            let albert_type = AlbertType::parse(t).ok_or_else(|| {
                Error::schema(format!("{path}.albert_type"), format!("expected I, II, III or IV, got {t:?}"))
            })?;
            let picard = count(get(obj, "picard", path)?, &format!("{path}.picard"), 1, 4)? as u32;
            FactorKind::Surface { albert_type, picard }
        }
        "simple_other" => {
            check_keys(obj, &["label", "type", "mult", "dim"], path)?;
            let dim = count(get(obj, "dim", path)?, &format!("{path}.dim"), 1, MAX_SIMPLE_DIM)?;
            FactorKind::SimpleOther { dim }
        }
        other => {
            return Err(Error::schema(
                format!("{path}.type"),
                format!("expected \"elliptic\", \"surface\" or \"simple_other\", got {other:?}"),
            ))
        }
    };
    Ok(FactorEntry { label, kind, mult })
}

impl TorusDocument {
    fn from_object(obj: &Map<String, Value>) -> Result<Self> {
        let field = match obj.get("field") {
            None | Some(Value::Null) => None,
            Some(v) => Some(parse_field(v, "$.field")?),
        };
        let degree = field.as_ref().map_or(1, |f| f.min_poly.len() - 1);
        let items = array(get(obj, "blocks", "$")?, "$.blocks")?;
        if items.is_empty() {
            return Err(Error::schema("$.blocks", "at least one block is required"));
        }
        if items.len() > MAX_BLOCKS {
            return Err(Error::schema("$.blocks", format!("at most {MAX_BLOCKS} blocks are supported")));
        }
        let blocks = items
            .iter()
            .enumerate()
            .map(|(i, v)| parse_block(v, &format!("$.blocks[{i}]"), degree))
            .collect::<Result<Vec<_>>>()?;
        let rank = 2 * blocks.len();
        let classes = match obj.get("classes") {
            None | Some(Value::Null) => Vec::new(),
            Some(v) => {
                let items = array(v, "$.classes")?;
                if items.len() > MAX_CLASSES {
                    return Err(Error::schema("$.classes", format!("at most {MAX_CLASSES} classes are supported")));
                }
                items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| parse_class(v, &format!("$.classes[{i}]"), rank))
                    .collect::<Result<_>>()?
            }
        };
        Ok(TorusDocument { field, blocks, classes })
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("kind".into(), json!("torus"));
        if let Some(f) = &self.field {
            m.insert(
                "field".into(),
                json!({
                    "min_poly": f.min_poly.iter().map(integer_json).collect::<Vec<_>>(),
                    "root_interval": [format_rational(&f.root_interval.0), format_rational(&f.root_interval.1)],
                }),
            );
        }
        let blocks: Vec<Value> = self
            .blocks
            .iter()
            .map(|b| {
                let mut o = Map::new();
                if let Some(l) = &b.label {
                    o.insert("label".into(), json!(l));
                }
                o.insert("a".into(), json!(format_rational(&b.a)));
                o.insert("beta".into(), json!(b.beta.iter().map(format_rational).collect::<Vec<_>>()));
                Value::Object(o)
            })
            .collect();
        m.insert("blocks".into(), Value::Array(blocks));
        if !self.classes.is_empty() {
            let classes: Vec<Value> = self
                .classes
                .iter()
                .map(|c| {
                    let matrix: Vec<Value> =
                        c.matrix.iter().map(|r| Value::Array(r.iter().map(integer_json).collect())).collect();
                    match &c.label {
                        Some(l) => json!({ "label": l, "matrix": matrix }),
                        None => Value::Array(matrix),
                    }
                })
                .collect();
            m.insert("classes".into(), Value::Array(classes));
        }
        Value::Object(m)
    }

    pub fn field(&self) -> Result<std::sync::Arc<RealNumberField>> {
        match &self.field {
            None => Ok(RealNumberField::rationals()),
            Some(f) => RealNumberField::new(f.min_poly.clone(), f.root_interval.0.clone(), f.root_interval.1.clone())
                .map_err(|e| Error::schema("$.field", e.to_string())),
        }
    }

    /// The product torus; blocks are labelled `E1, E2, ..` unless named.
    pub fn build_torus(&self) -> Result<ComplexTorus> {
        let field = self.field()?;
        let mut curves = Vec::with_capacity(self.blocks.len());
        for (i, b) in self.blocks.iter().enumerate() {
            let beta = field.element(b.beta.clone());
            let label = b.label.clone().unwrap_or_else(|| format!("E{}", i + 1));
            let curve = ComplexTorus::elliptic(b.a.clone(), beta, label).map_err(|e| match e {
                Error::TauNotInUpperHalfPlane => Error::schema(format!("$.blocks[{i}].beta"), e.to_string()),
                other => other,
            })?;
            curves.push(curve);
        }
        ComplexTorus::product(&curves)
    }

    /// Declared divisor classes, labelled `D1, D2, ..` unless named.
    pub fn build_classes(&self) -> Result<Vec<(String, AlternatingForm)>> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let rows =
                    c.matrix.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
                let form = AlternatingForm::new(QMatrix::from_rows(rows))
                    .map_err(|e| Error::schema(format!("$.classes[{i}]"), e.to_string()))?;
                Ok((c.label.clone().unwrap_or_else(|| format!("D{}", i + 1)), form))
            })
            .collect()
    }
}

fn parse_field(v: &Value, path: &str) -> Result<FieldEntry> {
    let obj = object(v, path)?;
    check_keys(obj, &["min_poly", "root_interval"], path)?;
    let coeffs = array(get(obj, "min_poly", path)?, &format!("{path}.min_poly"))?;
    if coeffs.len() < 2 || coeffs.len() > MAX_FIELD_DEGREE + 1 {
        return Err(Error::schema(
            format!("{path}.min_poly"),
            format!("degree must be between 1 and {MAX_FIELD_DEGREE}"),
        ));
    }
    let min_poly = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| integer(c, &format!("{path}.min_poly[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if !min_poly.last().is_some_and(One::is_one) {
        return Err(Error::schema(format!("{path}.min_poly"), "polynomial must be monic"));
    }
    let ends = array(get(obj, "root_interval", path)?, &format!("{path}.root_interval"))?;
    if ends.len() != 2 {
        return Err(Error::schema(format!("{path}.root_interval"), "expected two rational strings"));
    }
    let lo = rational(&ends[0], &format!("{path}.root_interval[0]"))?;
    let hi = rational(&ends[1], &format!("{path}.root_interval[1]"))?;
    Ok(FieldEntry { min_poly, root_interval: (lo, hi) })
}

fn parse_block(v: &Value, path: &str, degree: usize) -> Result<BlockEntry> {
    let obj = object(v, path)?;
    check_keys(obj, &["label", "a", "beta"], path)?;
    let label = opt_label(obj, path)?;
    let a = rational(get(obj, "a", path)?, &format!("{path}.a"))?;
    let coeffs = array(get(obj, "beta", path)?, &format!("{path}.beta"))?;
    if coeffs.is_empty() || coeffs.len() > degree {
        return Err(Error::schema(format!("{path}.beta"), format!("expected 1 to {degree} coefficients")));
    }
    let beta = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| rational(c, &format!("{path}.beta[{i}]")))
        .collect::<Result<_>>()?;
    Ok(BlockEntry { label, a, beta })
}

fn parse_class(v: &Value, path: &str, rank: usize) -> Result<ClassEntry> {
    let (label, m, mpath) = match v {
        Value::Object(obj) => {
            check_keys(obj, &["label", "matrix"], path)?;
            (opt_label(obj, path)?, get(obj, "matrix", path)?, format!("{path}.matrix"))
        }
        _ => (None, v, path.to_string()),
    };
    let rows = array(m, &mpath)?;
    if rows.len() != rank {
        return Err(Error::schema(mpath, format!("expected a {rank}x{rank} matrix")));
    }
    let mut matrix = Vec::with_capacity(rank);
    for (i, r) in rows.iter().enumerate() {
        let entries = array(r, &format!("{mpath}[{i}]"))?;
        if entries.len() != rank {
            return Err(Error::schema(format!("{mpath}[{i}]"), format!("expected {rank} entries")));
        }
        matrix.push(
            entries
                .iter()
                .enumerate()
                .map(|(j, x)| integer(x, &format!("{mpath}[{i}][{j}]")))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    for i in 0..rank {
        for j in 0..rank {
            if matrix[i][j] != -&matrix[j][i] {
                return Err(Error::schema(mpath, format!("matrix is not antisymmetric at ({i}, {j})")));
            }
        }
    }
    Ok(ClassEntry { label, matrix })
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(path, format!("expected an object, got {}", type_name(v))))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(path, format!("expected an array, got {}", type_name(v))))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::schema(format!("{path}.{key}"), "missing required field"))
}

fn str_field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str> {
    let v = get(obj, key, path)?;
    v.as_str().ok_or_else(|| Error::schema(format!("{path}.{key}"), format!("expected a string, got {}", type_name(v))))
}

fn opt_label(obj: &Map<String, Value>, path: &str) -> Result<Option<String>> {
    match obj.get("label") {
        None => Ok(None),
        Some(Value::String(s)) if !s.is_empty() && s.len() <= MAX_LABEL_LEN => Ok(Some(s.clone())),
        Some(_) => Err(Error::schema(
            format!("{path}.label"),
            format!("expected a nonempty string of at most {MAX_LABEL_LEN} bytes"),
        )),
    }
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::schema(format!("{path}.{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(n) if n.is_f64() => "a floating-point number",
        Value::Number(_) => "an integer",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn float_error(path: &str) -> Error {
    Error::schema(path, "floating-point literals are not allowed; write exact values as strings like \"3/2\"")
}

fn count(v: &Value, path: &str, min: usize, max: usize) -> Result<usize> {
    match v {
        Value::Number(n) if n.is_f64() => Err(float_error(path)),
        Value::Number(n) => match n.as_u64().and_then(|x| usize::try_from(x).ok()) {
            Some(x) if (min..=max).contains(&x) => Ok(x),
            _ => Err(Error::schema(path, format!("expected an integer between {min} and {max}"))),
        },
        _ => Err(Error::schema(path, format!("expected an integer, got {}", type_name(v)))),
    }
}

/// A JSON integer, or a string holding one.
fn integer(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) if n.is_f64() => Err(float_error(path)),
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| Error::schema(path, "integer out of range")),
        Value::String(s) => {
            check_digits(s, path)?;
            parse_integer(s).map_err(|e| Error::schema(path, e.to_string()))
        }
        _ => Err(Error::schema(path, format!("expected an integer, got {}", type_name(v)))),
    }
}

/// A rational string `"p"` or `"p/q"`.
fn rational(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => {
            check_digits(s, path)?;
            parse_rational(s).map_err(|e| Error::schema(path, e.to_string()))
        }
        Value::Number(n) if n.is_f64() => Err(float_error(path)),
        _ => Err(Error::schema(path, format!("expected a rational string such as \"1/2\", got {}", type_name(v)))),
    }
}

fn check_digits(s: &str, path: &str) -> Result<()> {
    if s.len() > 2 * MAX_DIGITS + 2 {
        return Err(Error::schema(path, format!("number literals are limited to {MAX_DIGITS} digits")));
    }
    Ok(())
}

fn integer_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

impl ClassEntry {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Zero::is_zero)
    }
}
