//! JSON wire formats for coframe models and symmetric three-tensors.
//!
//! Coefficients are strings in the scalar grammar of
//! [`parse_scalar`](crate::scalar::parse_scalar), so exact values survive a
//! round trip. Schema violations report the JSON pointer of the offending
//! value.
//!
//! ```json
//! {"name": "example", "labels": ["t1", "t2", "t3", "t4", "t5"],
//!  "d": {"t1": [["1/2", "t2", "t3"]]},
//!  "connection": {"g1": [["1", "t5"]], "g2": [], "g3": []}}
//! ```

use std::cell::Cell;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exterior::{mask_indices, CoframeModel, Form};
use crate::scalar::{parse_scalar, Field, QSqrt3, Scalar};
use crate::upsilon::SymTensor3;

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer(parts: &[&str]) -> String {
    parts.iter().map(|p| format!("/{}", escape(p))).collect()
}

fn coefficient(v: &Value, at: &str) -> Result<Scalar> {
    let text = v
        .as_str()
        .ok_or_else(|| Error::schema(at, "coefficient must be a string"))?;
    parse_scalar(text).map_err(|e| Error::schema(at, e.to_string()))
}

fn label_index(labels: &[String], v: &Value, at: &str) -> Result<usize> {
    let name = v
        .as_str()
        .ok_or_else(|| Error::schema(at, "label must be a string"))?;
    labels
        .iter()
        .position(|l| l == name)
        .ok_or_else(|| Error::schema(at, format!("unknown label {:?}", name)))
}

fn array<'a>(v: &'a Value, at: &str, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::schema(at, format!("{} must be an array", what)))
}

/// Parses a coframe model from JSON text.
pub fn model_from_json(text: &str) -> Result<CoframeModel<Scalar>> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::schema("", format!("invalid JSON: {}", e)))?;
    model_from_value(&v)
}

/// Parses a coframe model from a JSON value.
///
/// Coframe elements without an entry under `"d"` are closed. The Jacobi
/// identity is not checked here.
pub fn model_from_value(v: &Value) -> Result<CoframeModel<Scalar>> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::schema("", "model must be an object"))?;
    let name = match obj.get("name") {
        None => "unnamed".to_string(),
        Some(n) => n
            .as_str()
            .ok_or_else(|| Error::schema("/name", "name must be a string"))?
            .to_string(),
    };
    let raw_labels = array(
        obj.get("labels")
            .ok_or_else(|| Error::schema("/labels", "missing labels"))?,
        "/labels",
        "labels",
    )?;
    let labels = raw_labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            l.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::schema(format!("/labels/{}", i), "label must be a string"))
        })
        .collect::<Result<Vec<String>>>()?;
    let n = labels.len();
    if ![5, 6, 8].contains(&n) {
        return Err(Error::schema(
            "/labels",
            format!("{} labels; expected 5, 6 or 8", n),
        ));
    }

    let mut d_table = vec![Form::zero(n, 2); n];
    if let Some(d) = obj.get("d") {
        let d = d
            .as_object()
            .ok_or_else(|| Error::schema("/d", "d must be an object"))?;
        for (key, terms) in d {
            let base = pointer(&["d", key]);
            let a = labels
                .iter()
                .position(|l| l == key)
                .ok_or_else(|| Error::schema(&base, format!("unknown label {:?}", key)))?;
            for (t, term) in array(terms, &base, "a differential")?.iter().enumerate() {
                let at = format!("{}/{}", base, t);
                let parts = array(term, &at, "a term")?;
                if parts.len() != 3 {
                    return Err(Error::schema(&at, "term must be [coef, label, label]"));
                }
                let c = coefficient(&parts[0], &format!("{}/0", at))?;
                let b = label_index(&labels, &parts[1], &format!("{}/1", at))?;
                let e = label_index(&labels, &parts[2], &format!("{}/2", at))?;
                if b == e {
                    return Err(Error::schema(&at, "repeated label in a 2-form term"));
                }
                d_table[a] = d_table[a].clone() + Form::two_form(n, &[(c, b, e)]);
            }
        }
    }

    let connection = match obj.get("connection") {
        None | Some(Value::Null) => None,
        Some(c) => {
            let c = c
                .as_object()
                .ok_or_else(|| Error::schema("/connection", "connection must be an object"))?;
            let mut forms: [Form<Scalar>; 3] = std::array::from_fn(|_| Form::zero(n, 1));
            for (key, _) in c {
                if !["g1", "g2", "g3"].contains(&key.as_str()) {
                    return Err(Error::schema(
                        pointer(&["connection", key]),
                        "connection keys are g1, g2, g3",
                    ));
                }
            }
            for (i, form) in forms.iter_mut().enumerate() {
                let key = format!("g{}", i + 1);
                let base = pointer(&["connection", &key]);
                let terms = c
                    .get(&key)
                    .ok_or_else(|| Error::schema(&base, "missing connection component"))?;
                for (t, term) in array(terms, &base, "a connection component")?.iter().enumerate() {
                    let at = format!("{}/{}", base, t);
                    let parts = array(term, &at, "a term")?;
                    if parts.len() != 2 {
                        return Err(Error::schema(&at, "term must be [coef, label]"));
                    }
                    let coef = coefficient(&parts[0], &format!("{}/0", at))?;
                    let b = label_index(&labels, &parts[1], &format!("{}/1", at))?;
                    *form = form.clone() + Form::one_form(n, &[(coef, b)]);
                }
            }
            Some(forms)
        }
    };

    CoframeModel::new(name, labels, d_table, connection)
}

fn terms_json<T: Field>(f: &Form<T>, labels: &[String]) -> Value {
    Value::Array(
        f.terms()
            .map(|(m, c)| {
                let mut row = vec![Value::String(c.to_scalar().to_string())];
                row.extend(mask_indices(m).into_iter().map(|i| Value::String(labels[i].clone())));
                Value::Array(row)
            })
            .collect(),
    )
}

/// Serializes a model; coefficients use the scalar grammar.
pub fn model_to_value<T: Field>(model: &CoframeModel<T>) -> Value {
    let labels = model.labels();
    let mut d = Map::new();
    for (a, l) in labels.iter().enumerate() {
        let f = model.d_basis(a);
        if !f.is_zero() {
            d.insert(l.clone(), terms_json(f, labels));
        }
    }
    let mut out = json!({
        "name": model.name(),
        "labels": labels,
        "d": Value::Object(d),
    });
    if let Some(c) = model.connection() {
        out["connection"] = json!({
            "g1": terms_json(&c[0], labels),
            "g2": terms_json(&c[1], labels),
            "g3": terms_json(&c[2], labels),
        });
    }
    out
}

/// Serializes a model to pretty-printed JSON text.
pub fn model_to_json<T: Field>(model: &CoframeModel<T>) -> String {
    serde_json::to_string_pretty(&model_to_value(model)).expect("JSON values serialize")
}

/// The exact model, if every coefficient is exact.
pub fn to_exact(model: &CoframeModel<Scalar>) -> Option<CoframeModel<QSqrt3>> {
    let ok = Cell::new(true);
    let out = model.convert(|s| match s.as_exact() {
        Some(q) => q.clone(),
        None => {
            ok.set(false);
            QSqrt3::default()
        }
    });
    ok.get().then_some(out)
}

/// The float model.
pub fn to_float(model: &CoframeModel<Scalar>) -> CoframeModel<f64> {
    model.convert(Field::to_f64)
}

/// Parses `{"upsilon": [[i, j, k, coef], …]}` with one-based indices
/// `i ≤ j ≤ k`.
pub fn tensor_from_json(text: &str) -> Result<SymTensor3<Scalar>> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::schema("", format!("invalid JSON: {}", e)))?;
    let rows = array(
        v.get("upsilon")
            .ok_or_else(|| Error::schema("/upsilon", "missing upsilon"))?,
        "/upsilon",
        "upsilon",
    )?;
    let mut entries = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let at = format!("/upsilon/{}", r);
        let parts = array(row, &at, "an entry")?;
        if parts.len() != 4 {
            return Err(Error::schema(&at, "entry must be [i, j, k, coef]"));
        }
        let mut idx = [0usize; 3];
        for (p, slot) in idx.iter_mut().enumerate() {
            let i = parts[p]
                .as_u64()
                .filter(|i| (1..=5).contains(i))
                .ok_or_else(|| Error::schema(format!("{}/{}", at, p), "index must be 1..5"))?;
            *slot = i as usize - 1;
        }
        if idx[0] > idx[1] || idx[1] > idx[2] {
            return Err(Error::schema(&at, "indices must satisfy i <= j <= k"));
        }
        let c = coefficient(&parts[3], &format!("{}/3", at))?;
        entries.push((idx[0], idx[1], idx[2], c));
    }
    SymTensor3::from_entries(&entries)
}

/// Serializes a symmetric three-tensor with one-based sorted indices.
pub fn tensor_to_json<T: Field>(u: &SymTensor3<T>) -> String {
    let rows: Vec<Value> = u
        .entries()
        .into_iter()
        .filter(|(_, _, _, c)| !c.is_zero())
        .map(|(i, j, k, c)| json!([i + 1, j + 1, k + 1, c.to_scalar().to_string()]))
        .collect();
    serde_json::to_string_pretty(&json!({ "upsilon": rows })).expect("JSON values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::abelian_model;
    use crate::upsilon::standard_upsilon;

    #[test]
    fn model_round_trip() {
        let text = r#"{"name": "x", "labels": ["a","b","c","d","e"],
            "d": {"a": [["1/2+3*sqrt3", "b", "c"]], "b": [["0.5", "d", "e"]]},
            "connection": {"g1": [["1", "e"]], "g2": [], "g3": []}}"#;
        let m = model_from_json(text).unwrap();
        let again = model_from_json(&model_to_json(&m)).unwrap();
        assert_eq!(m, again);
        assert!(to_exact(&m).is_none());
        assert_eq!(to_float(&m).d_basis(1).coeff(&[3, 4]), 0.5);
    }

    #[test]
    fn schema_pointer_reported() {
        let text = r#"{"labels": ["a","b","c","d","e"], "d": {"a": [["1/x", "b", "c"]]}}"#;
        match model_from_json(text) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/d/a/0/0"),
            other => panic!("unexpected {:?}", other),
        }
        let text = r#"{"labels": ["a","b","c","d","e"], "d": {"a": [["1", "b", "zz"]]}}"#;
        match model_from_json(text) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/d/a/0/2"),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn abelian_serializes() {
        let m = abelian_model::<QSqrt3>();
        let back = model_from_json(&model_to_json(&m)).unwrap();
        assert_eq!(to_exact(&back).unwrap(), m);
    }

    #[test]
    fn tensor_round_trip() {
        let u = standard_upsilon::<QSqrt3>();
        let back = tensor_from_json(&tensor_to_json(&u)).unwrap();
        assert_eq!(back.map(|s| s.as_exact().unwrap().clone()), u);
    }
}
