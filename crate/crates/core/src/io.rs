//! JSON encodings for groups, matrices, monoids, presentations and maps.
//!
//! Integers are written as decimal strings; plain JSON numbers are accepted
//! on input. Parse errors name the offending field as a path like
//! `domain.generators[1][0]`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::monoid::{AffineMonoid, MonoidPresentation};
use crate::morphism::MonoidHom;
use crate::zlattice::{AmbientAbelianGroup, FiniteAbelianGroup, Int, IntegerMatrix};

fn bad(path: &str, msg: impl std::fmt::Display) -> Error {
    let at = if path.is_empty() { "<root>" } else { path };
    Error::InvalidInput(format!("{at}: {msg}"))
}

/// Re-labels an error raised while building a value at `path`.
fn nested(path: &str, e: Error) -> Error {
    let msg = match e {
        Error::InvalidInput(m) => m,
        other => other.to_string(),
    };
    if path.is_empty() {
        Error::InvalidInput(msg)
    } else {
        bad(path, msg)
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    let obj = v.as_object().ok_or_else(|| bad(path, "expected an object"))?;
    obj.get(key).ok_or_else(|| bad(&join(path, key), "missing field"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

pub fn parse_int(v: &Value, path: &str) -> Result<Int> {
    match v {
        Value::String(s) => s.trim().parse::<Int>().map_err(|_| bad(path, format!("{s:?} is not a decimal integer"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integral JSON number")),
        _ => Err(bad(path, "expected an integer (decimal string or number)")),
    }
}

fn parse_usize(v: &Value, path: &str) -> Result<usize> {
    let x = parse_int(v, path)?;
    usize::try_from(&x).map_err(|_| bad(path, "expected a non-negative integer"))
}

pub fn parse_vector(v: &Value, path: &str) -> Result<Vec<Int>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| parse_int(x, &format!("{path}[{i}]"))).collect()
}

/// Rows of decimal integers; every row must have the same length.
pub fn parse_matrix(v: &Value, path: &str, cols: Option<usize>) -> Result<IntegerMatrix> {
    let rows = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vector(r, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let width = match (rows.first(), cols) {
        (Some(r), _) => r.len(),
        (None, Some(c)) => c,
        (None, None) => 0,
    };
    if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(bad(&format!("{path}[{i}]"), format!("expected {width} entries")));
    }
    Ok(IntegerMatrix::from_rows(rows, width))
}

pub fn parse_ambient(v: &Value, path: &str) -> Result<AmbientAbelianGroup> {
    let r = parse_usize(field(v, path, "free_rank")?, &join(path, "free_rank"))?;
    let tpath = join(path, "torsion");
    let torsion = match v.get("torsion") {
        Some(t) => parse_vector(t, &tpath)?,
        None => Vec::new(),
    };
    if let Some(i) = torsion.iter().position(|d| d < &Int::from(2)) {
        return Err(bad(&format!("{tpath}[{i}]"), "torsion orders must be at least 2"));
    }
    Ok(AmbientAbelianGroup::new(r, &torsion))
}

pub fn parse_monoid(v: &Value, path: &str) -> Result<AffineMonoid> {
    let ambient = parse_ambient(field(v, path, "ambient")?, &join(path, "ambient"))?;
    let gpath = join(path, "generators");
    let gens = array(field(v, path, "generators")?, &gpath)?
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let p = format!("{gpath}[{i}]");
            let x = parse_vector(g, &p)?;
            if x.len() != ambient.dim() {
                return Err(bad(&p, format!("expected {} coordinates", ambient.dim())));
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    AffineMonoid::new(ambient, gens).map_err(|e| nested(path, e))
}

pub fn parse_presentation(v: &Value, path: &str) -> Result<MonoidPresentation> {
    let s = parse_usize(field(v, path, "generators")?, &join(path, "generators"))?;
    let rpath = join(path, "relations");
    let rels = match v.get("relations") {
        Some(r) => array(r, &rpath)?
            .iter()
            .enumerate()
            .map(|(i, rel)| {
                let p = format!("{rpath}[{i}]");
                let pair = array(rel, &p)?;
                if pair.len() != 2 {
                    return Err(bad(&p, "a relation is a pair [lhs, rhs]"));
                }
                let side = |k: usize| -> Result<Vec<u64>> {
                    let sp = format!("{p}[{k}]");
                    let xs = parse_vector(&pair[k], &sp)?;
                    if xs.len() != s {
                        return Err(bad(&sp, format!("expected {s} exponents")));
                    }
                    xs.iter()
                        .enumerate()
                        .map(|(j, x)| u64::try_from(x).map_err(|_| bad(&format!("{sp}[{j}]"), "expected a non-negative exponent")))
                        .collect()
                };
                Ok((side(0)?, side(1)?))
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    MonoidPresentation::new(s, rels).map_err(|e| nested(path, e))
}

pub fn parse_hom(v: &Value, path: &str) -> Result<MonoidHom> {
    let domain = parse_monoid(field(v, path, "domain")?, &join(path, "domain"))?;
    let codomain = parse_monoid(field(v, path, "codomain")?, &join(path, "codomain"))?;
    let mpath = join(path, "group_map");
    let m = parse_matrix(field(v, path, "group_map")?, &mpath, Some(domain.ambient().dim()))?;
    if m.rows() != codomain.ambient().dim() || m.cols() != domain.ambient().dim() {
        return Err(bad(
            &mpath,
            format!(
                "expected a {}×{} matrix, got {}×{}",
                codomain.ambient().dim(),
                domain.ambient().dim(),
                m.rows(),
                m.cols()
            ),
        ));
    }
    MonoidHom::new(domain, codomain, m).map_err(|e| nested(path, e))
}

/// A parsed input document, recognized by its keys.
#[derive(Clone, Debug)]
pub enum Input {
    Monoid(AffineMonoid),
    Presentation(MonoidPresentation),
    Hom(MonoidHom),
}

pub fn parse_input(text: &str) -> Result<Input> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("not valid JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| bad("", "expected an object"))?;
    if obj.contains_key("domain") || obj.contains_key("group_map") {
        parse_hom(&v, "").map(Input::Hom)
    } else if obj.contains_key("ambient") {
        parse_monoid(&v, "").map(Input::Monoid)
    } else if obj.get("generators").is_some_and(|g| !g.is_array()) {
        parse_presentation(&v, "").map(Input::Presentation)
    } else {
        parse_monoid(&v, "").map(Input::Monoid)
    }
}

pub fn int_to_json(x: &Int) -> Value {
    Value::String(x.to_string())
}

pub fn vector_to_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn vectors_to_json(vs: &[Vec<Int>]) -> Value {
    Value::Array(vs.iter().map(|v| vector_to_json(v)).collect())
}

pub fn matrix_to_json(m: &IntegerMatrix) -> Value {
    vectors_to_json(&m.to_rows())
}

pub fn ambient_to_json(g: &AmbientAbelianGroup) -> Value {
    json!({ "free_rank": g.free_rank(), "torsion": vector_to_json(g.torsion()) })
}

pub fn finite_group_to_json(g: &FiniteAbelianGroup) -> Value {
    json!({ "invariants": vector_to_json(g.factors()), "order": int_to_json(&g.order()) })
}

pub fn monoid_to_json(m: &AffineMonoid) -> Value {
    json!({ "ambient": ambient_to_json(m.ambient()), "generators": vectors_to_json(m.generators()) })
}

pub fn presentation_to_json(p: &MonoidPresentation) -> Value {
    let side = |xs: &[u64]| Value::Array(xs.iter().map(|x| Value::String(x.to_string())).collect());
    json!({
        "generators": p.generator_count(),
        "relations": p.relations().iter().map(|(l, r)| json!([side(l), side(r)])).collect::<Vec<_>>(),
    })
}

pub fn hom_to_json(u: &MonoidHom) -> Value {
    json!({
        "domain": monoid_to_json(u.domain()),
        "codomain": monoid_to_json(u.codomain()),
        "group_map": matrix_to_json(u.group_map()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monoid_round_trip() {
        let text = r#"{"ambient":{"free_rank":1,"torsion":[]},"generators":[["2"],["3"]]}"#;
        let Input::Monoid(m) = parse_input(text).unwrap() else { panic!("expected a monoid") };
        assert_eq!(m, AffineMonoid::from_i64(1, &[&[2], &[3]]).unwrap());
        let back = parse_monoid(&monoid_to_json(&m), "").unwrap();
        assert_eq!(back.generators(), m.generators());
    }

    #[test]
    fn numbers_are_accepted() {
        let text = r#"{"ambient":{"free_rank":2,"torsion":["3"]},"generators":[[1,0,2]]}"#;
        let Input::Monoid(m) = parse_input(text).unwrap() else { panic!() };
        assert_eq!(m.ambient().torsion(), &[Int::from(3)]);
    }

    #[test]
    fn missing_generators_names_the_field() {
        let err = parse_input(r#"{"ambient":{"free_rank":1,"torsion":[]}}"#).unwrap_err();
        assert!(err.to_string().contains("generators: missing field"), "{err}");
        let err = parse_input(r#"{"ambient":{"free_rank":1},"generators":[["x"]]}"#).unwrap_err();
        assert!(err.to_string().contains("generators[0][0]"), "{err}");
    }

    #[test]
    fn hom_outside_codomain_is_refused() {
        let text = r#"{"domain":{"ambient":{"free_rank":1,"torsion":[]},"generators":[["1"]]},
            "codomain":{"ambient":{"free_rank":2,"torsion":[]},"generators":[["2","0"],["0","1"]]},
            "group_map":[["1"],["0"]]}"#;
        let err = parse_input(text).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)), "{err}");
    }

    #[test]
    fn hom_shape_is_checked() {
        let text = r#"{"domain":{"ambient":{"free_rank":1},"generators":[["1"]]},
            "codomain":{"ambient":{"free_rank":1},"generators":[["1"]]},
            "group_map":[["1","2"]]}"#;
        let err = parse_input(text).unwrap_err();
        assert!(err.to_string().contains("group_map"), "{err}");
    }

    #[test]
    fn presentation_round_trip() {
        let text = r#"{"generators":2,"relations":[[["2","0"],["0","3"]]]}"#;
        let Input::Presentation(p) = parse_input(text).unwrap() else { panic!() };
        assert_eq!(p.relations(), &[(vec![2, 0], vec![0, 3])]);
        let v = presentation_to_json(&p);
        assert_eq!(parse_presentation(&v, "").unwrap(), p);
    }
}
