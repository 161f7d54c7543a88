//! JSON encodings of letters, words and matrices.
//!
//! A root is written either as its canonical index or as its coefficient
//! vector over the simple roots. Letters are objects with one of the keys
//! `x`, `w`, `h` naming the root and `value` (for `x`) or `unit` carrying the
//! ring element:
//!
//! ```json
//! [{"x": [0,1,1,1,1,1,0], "value": 2}, {"h": 3, "unit": 3}]
//! ```
//!
//! Matrix files hold `{"case", "l", "ring", "rows"}` with rows and columns in
//! canonical weight order. `ring` is either the short text form (`"z8"`,
//! `"f2t2"`) or the structured spec; `l` is only read for case `a`.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rep::{Chevalley, GroupElement, Letter, Rep, Word};
use crate::rings::{Ring, RingSpec};
use crate::roots::{CaseTag, EmbeddingCase, RootId};

pub fn root_from_json(case: &EmbeddingCase, v: &Value) -> Result<RootId> {
    if let Some(i) = v.as_u64() {
        let i = i as usize;
        return if i < case.len() { Ok(i) } else { Err(Error::Parse(format!("root index {i} out of range"))) };
    }
    let arr = v.as_array().ok_or_else(|| Error::Parse(format!("expected a root, got {v}")))?;
    let coeffs: Vec<i32> = arr
        .iter()
        .map(|c| c.as_i64().map(|c| c as i32).ok_or_else(|| Error::Parse(format!("bad root coefficient in {v}"))))
        .collect::<Result<_>>()?;
    case.find(&coeffs).ok_or_else(|| Error::Parse(format!("{v} is not a root of {}", case.name())))
}

pub fn root_to_json(case: &EmbeddingCase, r: RootId) -> Value {
    json!(case.coeffs(r))
}

pub fn letter_to_json(chev: &Chevalley, letter: &Letter) -> Value {
    let case = chev.case();
    match letter {
        Letter::X { root, value } => json!({ "x": root_to_json(case, *root), "value": value.to_json() }),
        Letter::W { root, unit } => json!({ "w": root_to_json(case, *root), "unit": unit.to_json() }),
        Letter::H { root, unit } => json!({ "h": root_to_json(case, *root), "unit": unit.to_json() }),
    }
}

pub fn letter_from_json(chev: &Chevalley, v: &Value) -> Result<Letter> {
    let obj = v.as_object().ok_or_else(|| Error::Parse(format!("expected a letter object, got {v}")))?;
    let case = chev.case();
    let field = |key: &str| obj.get(key).ok_or_else(|| Error::Parse(format!("letter {v} lacks '{key}'")));
    if let Some(r) = obj.get("x") {
        return Ok(Letter::X { root: root_from_json(case, r)?, value: chev.ring.elem_from_json(field("value")?)? });
    }
    let unit = |v: &Value| -> Result<_> {
        let u = chev.ring.elem_from_json(v)?;
        if !u.is_unit() {
            return Err(Error::NonUnit(u.to_string()));
        }
        Ok(u)
    };
    if let Some(r) = obj.get("w") {
        return Ok(Letter::W { root: root_from_json(case, r)?, unit: unit(field("unit")?)? });
    }
    if let Some(r) = obj.get("h") {
        return Ok(Letter::H { root: root_from_json(case, r)?, unit: unit(field("unit")?)? });
    }
    Err(Error::Parse(format!("letter {v} has none of 'x', 'w', 'h'")))
}

pub fn word_to_json(chev: &Chevalley, word: &[Letter]) -> Value {
    Value::Array(word.iter().map(|l| letter_to_json(chev, l)).collect())
}

pub fn word_from_json(chev: &Chevalley, v: &Value) -> Result<Word> {
    match v {
        Value::Array(items) => items.iter().map(|x| letter_from_json(chev, x)).collect(),
        Value::Object(_) => Ok(vec![letter_from_json(chev, v)?]),
        _ => Err(Error::Parse(format!("expected a word, got {v}"))),
    }
}

/// A list of words. A bare letter counts as a one-letter word.
pub fn words_from_json(chev: &Chevalley, v: &Value) -> Result<Vec<Word>> {
    let items = v.as_array().ok_or_else(|| Error::Parse("expected an array of words".into()))?;
    items.iter().map(|w| word_from_json(chev, w)).collect()
}

pub fn ring_from_json(v: &Value) -> Result<Arc<Ring>> {
    match v {
        Value::String(s) => Ring::parse(s),
        _ => {
            let spec: RingSpec = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("bad ring: {e}")))?;
            Ring::new(spec)
        }
    }
}

/// Case tag and rank as they appear in files; `l` is omitted outside case `a`.
pub fn case_fields(case: &EmbeddingCase) -> Value {
    match case.tag {
        CaseTag::A => json!({ "case": case.tag, "l": case.rank }),
        _ => json!({ "case": case.tag }),
    }
}

pub fn matrix_to_json(chev: &Chevalley, m: &Matrix) -> Value {
    let mut v = case_fields(chev.case());
    v["ring"] = serde_json::to_value(chev.ring.spec()).expect("ring specs serialize");
    v["rows"] = Value::Array(m.rows().iter().map(|r| Value::Array(r.iter().map(|x| x.to_json()).collect())).collect());
    v
}

/// Reads a matrix file and checks that it is invertible; the group element
/// carries the inverse.
pub fn matrix_from_json(v: &Value) -> Result<(Chevalley, GroupElement)> {
    let tag = CaseTag::parse(v["case"].as_str().ok_or_else(|| Error::Parse("matrix file lacks 'case'".into()))?)?;
    let l = v["l"].as_u64().unwrap_or(0) as usize;
    let ring = ring_from_json(v.get("ring").ok_or_else(|| Error::Parse("matrix file lacks 'ring'".into()))?)?;
    let chev = Chevalley::new(Rep::new(tag, l)?, ring);
    let rows = v["rows"].as_array().ok_or_else(|| Error::Parse("matrix file lacks 'rows'".into()))?;
    if rows.len() != chev.dim() {
        return Err(Error::Parse(format!("expected {} rows, got {}", chev.dim(), rows.len())));
    }
    let rows: Vec<Vec<_>> = rows
        .iter()
        .map(|r| {
            let r = r.as_array().ok_or_else(|| Error::Parse("a row is not an array".into()))?;
            if r.len() != chev.dim() {
                return Err(Error::Parse(format!("expected rows of length {}, got {}", chev.dim(), r.len())));
            }
            r.iter().map(|x| chev.ring.elem_from_json(x)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let m = Matrix::from_rows(&chev.ring, &rows)?;
    let g = chev.from_matrix(m)?;
    Ok((chev, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn words_round_trip() {
        let c = Chevalley::new(Rep::new(CaseTag::B, 0).unwrap(), Ring::parse("z4xf2t2").unwrap());
        let mut rng = SplitMix64::new(5);
        let mut word = c.random_word(6, &mut rng);
        word.push(Letter::H { root: 3, unit: c.ring.random_unit(&mut rng) });
        word.push(Letter::W { root: 40, unit: c.ring.random_unit(&mut rng) });
        let back = word_from_json(&c, &word_to_json(&c, &word)).unwrap();
        assert_eq!(back, word);
    }

    #[test]
    fn matrices_round_trip() {
        let c = Chevalley::new(Rep::new(CaseTag::A, 5).unwrap(), Ring::parse("z9").unwrap());
        let mut rng = SplitMix64::new(8);
        let g = c.eval_word(&c.random_word(5, &mut rng)).unwrap();
        let (c2, g2) = matrix_from_json(&matrix_to_json(&c, &g.mat)).unwrap();
        assert_eq!((c2.dim(), g2.mat, g2.inv), (16, g.mat, g.inv));
    }

    #[test]
    fn rejects_non_units_and_unknown_roots() {
        let c = Chevalley::new(Rep::new(CaseTag::B, 0).unwrap(), Ring::parse("z4").unwrap());
        assert!(matches!(letter_from_json(&c, &json!({"h": 0, "unit": 2})), Err(Error::NonUnit(_))));
        assert!(letter_from_json(&c, &json!({"x": [3, 0, 0, 0, 0, 0], "value": 1})).is_err());
        assert!(letter_from_json(&c, &json!({"x": 999, "value": 1})).is_err());
    }
}
