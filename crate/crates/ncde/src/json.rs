//! JSON encodings of series, function-ring elements, multipliers and
//! independence reports. Floats are written with 17 significant digits.

use std::str::FromStr;

use ncde_core::btt::{IndependenceReport, MultiplierSpec, Witness};
use ncde_core::funring::{Exponent, FunElem, FunKey, SymbolTable};
use ncde_core::ncseries::{Alphabet, Series, Word};
use ncde_core::{Complex64 as C, Rational, Ring};
use serde_json::{json, Map, Number, Value};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] ncde_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn schema<T>(msg: impl Into<String>) -> Result<T> {
    Err(FormatError::Schema(msg.into()))
}

/// JSON number with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    Value::Number(Number::from_str(&text).expect("formatted float is valid JSON"))
}

pub fn as_f64(v: &Value, what: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) => Ok(x),
        None => schema(format!("{what}: expected a number")),
    }
}

pub fn complex(c: C) -> Value {
    json!({ "re": num(c.re), "im": num(c.im) })
}

pub fn parse_complex(v: &Value) -> Result<C> {
    match v {
        Value::Number(_) => Ok(C::new(as_f64(v, "complex")?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(C::new(as_f64(&a[0], "re")?, as_f64(&a[1], "im")?)),
        Value::Object(o) => {
            let re = o.get("re").map(|x| as_f64(x, "re")).transpose()?.unwrap_or(0.0);
            let im = o.get("im").map(|x| as_f64(x, "im")).transpose()?.unwrap_or(0.0);
            Ok(C::new(re, im))
        }
        _ => schema("complex: expected a number, [re, im] or {\"re\", \"im\"}"),
    }
}

pub fn rational_str(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => match (n.trim().parse::<i128>(), d.trim().parse::<i128>()) {
            (Ok(n), Ok(d)) if d != 0 => Some(Rational::new(n, d)),
            _ => None,
        },
        None => s.parse::<i128>().ok().map(Rational::from_integer),
    };
    match parsed {
        Some(r) => Ok(r),
        None => schema(format!("invalid rational `{s}`")),
    }
}

fn parse_rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap_or(0) as i128)),
        _ => schema("rational: expected a string like \"-1/2\" or an integer"),
    }
}

pub fn word_json(alphabet: &Alphabet, w: &Word) -> Value {
    Value::Array(alphabet.letter_names(w).into_iter().map(|n| Value::String(n.to_string())).collect())
}

pub fn parse_word(alphabet: &Alphabet, v: &Value) -> Result<Word> {
    let Some(items) = v.as_array() else {
        return schema("word: expected an array of letter names");
    };
    let names: Vec<&str> = items
        .iter()
        .map(|x| x.as_str().ok_or_else(|| FormatError::Schema("word: letters must be strings".into())))
        .collect::<Result<_>>()?;
    Ok(alphabet.word(&names)?)
}

/// Coefficient encodings, one per ring.
pub trait CoeffJson: Ring {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, symbols: &mut SymbolTable) -> Result<Self>;
    /// Whether series over this ring carry a top-level symbol table.
    fn has_symbols() -> bool {
        false
    }
}

impl CoeffJson for Rational {
    fn to_json(&self) -> Value {
        Value::String(rational_str(self))
    }

    fn from_json(v: &Value, _: &mut SymbolTable) -> Result<Self> {
        parse_rational_value(v)
    }
}

impl CoeffJson for C {
    fn to_json(&self) -> Value {
        complex(*self)
    }

    fn from_json(v: &Value, _: &mut SymbolTable) -> Result<Self> {
        parse_complex(v)
    }
}

impl CoeffJson for FunElem {
    fn to_json(&self) -> Value {
        json!({ "terms": fun_terms(self) })
    }

    fn from_json(v: &Value, symbols: &mut SymbolTable) -> Result<Self> {
        parse_fun_terms(v, symbols)
    }

    fn has_symbols() -> bool {
        true
    }
}

pub fn alphabet_json(a: &Alphabet) -> Value {
    Value::Array(a.names().map(|n| Value::String(n.to_string())).collect())
}

pub fn parse_alphabet(v: &Value) -> Result<Alphabet> {
    let Some(items) = v.as_array() else {
        return schema("alphabet: expected an array of names");
    };
    let names: Vec<String> = items.iter().filter_map(|x| x.as_str().map(str::to_string)).collect();
    if names.len() != items.len() {
        return schema("alphabet: names must be strings");
    }
    Ok(Alphabet::new(names)?)
}

/// `{"alphabet": [...], "max_degree": N, "terms": [{"word": [...], "coeff": ...}]}`,
/// plus `"symbols"` for function-ring coefficients.
pub fn series_to_json<R: CoeffJson>(s: &Series<R>, symbols: Option<&SymbolTable>) -> Value {
    let a = s.alphabet();
    let mut words: Vec<&Word> = s.support().collect();
    words.sort_by(|u, v| a.compare(u, v).expect("same alphabet"));
    let terms: Vec<Value> = words
        .into_iter()
        .map(|w| json!({ "word": word_json(a, w), "coeff": s.coeff(w).to_json() }))
        .collect();
    let mut out = Map::new();
    if R::has_symbols() {
        out.insert("symbols".into(), symbols_json(symbols));
    }
    out.insert("alphabet".into(), alphabet_json(a));
    out.insert("max_degree".into(), json!(s.max_degree()));
    out.insert("terms".into(), Value::Array(terms));
    Value::Object(out)
}

pub fn series_from_json<R: CoeffJson>(v: &Value, symbols: &mut SymbolTable) -> Result<Series<R>> {
    if let Some(sym) = v.get("symbols") {
        declare_symbols(sym, symbols)?;
    }
    let alphabet = parse_alphabet(v.get("alphabet").unwrap_or(&Value::Null))?;
    let Some(max_degree) = v.get("max_degree").and_then(Value::as_u64) else {
        return schema("series: missing max_degree");
    };
    let Some(items) = v.get("terms").and_then(Value::as_array) else {
        return schema("series: missing terms array");
    };
    let mut terms = Vec::with_capacity(items.len());
    for t in items {
        let w = parse_word(&alphabet, t.get("word").unwrap_or(&Value::Null))?;
        if w.len() as u64 > max_degree {
            return schema("series: word longer than max_degree");
        }
        let c = R::from_json(t.get("coeff").unwrap_or(&Value::Null), symbols)?;
        terms.push((w, c));
    }
    Ok(Series::from_terms(alphabet, max_degree as usize, terms)?)
}

fn symbols_json(symbols: Option<&SymbolTable>) -> Value {
    let mut m = Map::new();
    if let Some(t) = symbols {
        for s in t.iter() {
            m.insert(s.name().to_string(), num(s.value()));
        }
    }
    Value::Object(m)
}

pub fn declare_symbols(v: &Value, table: &mut SymbolTable) -> Result<()> {
    let Some(obj) = v.as_object() else {
        return schema("symbols: expected an object name -> value");
    };
    for (name, value) in obj {
        table.declare(name, as_f64(value, name)?)?;
    }
    Ok(())
}

fn exponent_json(e: &Exponent) -> Value {
    let mut m = Map::new();
    m.insert("1".into(), Value::String(rational_str(&e.rational_part())));
    for (s, c) in e.symbol_coords() {
        m.insert(s.name().to_string(), Value::String(rational_str(c)));
    }
    Value::Object(m)
}

fn parse_exponent(v: &Value, symbols: &SymbolTable) -> Result<Exponent> {
    let Some(obj) = v.as_object() else {
        return schema("exponent: expected an object like {\"1\": \"-1/2\", \"beta\": \"1\"}");
    };
    let mut e = Exponent::zero();
    for (k, c) in obj {
        let c = parse_rational_value(c)?;
        if k == "1" {
            e = e.add(&Exponent::rational(c));
        } else {
            e = e.with_symbol(&symbols.get(k)?, c);
        }
    }
    Ok(e)
}

fn fun_terms(f: &FunElem) -> Vec<Value> {
    f.terms()
        .map(|(k, c)| {
            json!({
                "a": exponent_json(&k.a),
                "b": exponent_json(&k.b),
                "p": k.p,
                "q": k.q,
                "re": num(c.re),
                "im": num(c.im),
            })
        })
        .collect()
}

fn parse_fun_terms(v: &Value, symbols: &mut SymbolTable) -> Result<FunElem> {
    if let Some(sym) = v.get("symbols") {
        declare_symbols(sym, symbols)?;
    }
    let Some(items) = v.get("terms").and_then(Value::as_array) else {
        return schema("function: missing terms array");
    };
    let mut out = Vec::with_capacity(items.len());
    for t in items {
        let zero = json!({});
        let a = parse_exponent(t.get("a").unwrap_or(&zero), symbols)?;
        let b = parse_exponent(t.get("b").unwrap_or(&zero), symbols)?;
        let small = |key: &str| -> Result<u32> {
            match t.get(key) {
                None => Ok(0),
                Some(x) => x.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| {
                    FormatError::Schema(format!("function: `{key}` must be a small nonnegative integer"))
                }),
            }
        };
        let (p, q) = (small("p")?, small("q")?);
        let re = t.get("re").map(|x| as_f64(x, "re")).transpose()?.unwrap_or(0.0);
        let im = t.get("im").map(|x| as_f64(x, "im")).transpose()?.unwrap_or(0.0);
        out.push((FunKey::new(a, b, p, q), C::new(re, im)));
    }
    Ok(FunElem::from_terms(out))
}

/// `{"symbols": {...}, "terms": [...]}`.
pub fn fun_to_json(f: &FunElem, symbols: &SymbolTable) -> Value {
    let mut m = Map::new();
    m.insert("symbols".into(), symbols_json(Some(symbols)));
    m.insert("terms".into(), Value::Array(fun_terms(f)));
    Value::Object(m)
}

pub fn fun_from_json(v: &Value, symbols: &mut SymbolTable) -> Result<FunElem> {
    parse_fun_terms(v, symbols)
}

/// `{"symbols": {...}, "multiplier": {"x0": {"terms": [...]}, ...}}`; the
/// letter order of the object is the alphabet order.
pub fn multiplier_to_json(m: &MultiplierSpec, symbols: &SymbolTable) -> Value {
    let mut letters = Map::new();
    for (name, u) in m.names().iter().zip(m.coefficients()) {
        letters.insert(name.clone(), json!({ "terms": fun_terms(u) }));
    }
    json!({ "symbols": symbols_json(Some(symbols)), "multiplier": Value::Object(letters) })
}

pub fn multiplier_from_json(v: &Value, symbols: &mut SymbolTable) -> Result<MultiplierSpec> {
    if let Some(sym) = v.get("symbols") {
        declare_symbols(sym, symbols)?;
    }
    let Some(obj) = v.get("multiplier").and_then(Value::as_object) else {
        return schema("multiplier: expected {\"multiplier\": {letter: function}}");
    };
    let mut names = Vec::with_capacity(obj.len());
    let mut us = Vec::with_capacity(obj.len());
    for (name, f) in obj {
        names.push(name.clone());
        us.push(parse_fun_terms(f, symbols)?);
    }
    Ok(MultiplierSpec::new(names, us)?)
}

fn alpha_json(names: &[String], alpha: &ncde_core::ncseries::AlphaVector<C>) -> Value {
    let mut m = Map::new();
    for (i, name) in names.iter().enumerate() {
        m.insert(name.clone(), complex(alpha.get(i)));
    }
    Value::Object(m)
}

pub fn report_to_json(r: &IndependenceReport, letter_names: &[String], symbols: &SymbolTable) -> Value {
    let witness = match &r.witness {
        None => Value::Null,
        Some(Witness::Derivative { alpha, f }) => json!({
            "kind": "derivative",
            "alpha": alpha_json(letter_names, alpha),
            "f": fun_to_json(f, symbols),
        }),
        Some(Witness::Wronskian { alpha, f1, f2 }) => json!({
            "kind": "wronskian",
            "alpha": alpha_json(letter_names, alpha),
            "f1": fun_to_json(f1, symbols),
            "f2": fun_to_json(f2, symbols),
        }),
        Some(Witness::Numeric { coefficients }) => json!({
            "kind": "numeric",
            "coefficients": coefficients.iter().map(|c| complex(*c)).collect::<Vec<_>>(),
        }),
    };
    let subs: Vec<Value> =
        r.sub_verdicts.iter().map(|(n, v)| json!({ "check": n, "verdict": v.as_str() })).collect();
    let mut m = Map::new();
    m.insert("verdict".into(), json!(r.verdict.as_str()));
    m.insert("witness".into(), witness);
    m.insert("bounds".into(), json!(r.search_bounds));
    m.insert("condition".into(), json!(r.condition.as_str()));
    m.insert("sub_verdicts".into(), Value::Array(subs));
    if let Some((lo, hi)) = r.singular_values {
        m.insert("singular_values".into(), json!({ "min": num(lo), "max": num(hi) }));
    }
    Value::Object(m)
}

/// Parses JSON text, mapping syntax errors to [`FormatError::Json`].
pub fn parse(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(std::f64::consts::SQRT_2).to_string(), "1.4142135623730951e+0");
        assert_eq!(num(f64::NAN), Value::Null);
        let back: f64 = num(std::f64::consts::PI).as_f64().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn rationals_round_trip() {
        for s in ["0", "-1/2", "7", "3/4"] {
            assert_eq!(rational_str(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn documented_fun_example_parses() {
        let text = r#"{"symbols":{"beta":1.4142135623730951},"terms":[{"a":{"1":"-1/2","beta":"1"},"b":{"1":"0"},"p":0,"q":1,"re":1.0,"im":0.0}]}"#;
        let mut t = SymbolTable::new();
        let f = fun_from_json(&parse(text).unwrap(), &mut t).unwrap();
        assert_eq!(f.len(), 1);
        let (k, _) = f.terms().next().unwrap();
        assert_eq!(k.a.to_string(), "beta-1/2");
        let again = fun_from_json(&fun_to_json(&f, &t), &mut SymbolTable::new()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn undeclared_symbol_is_rejected() {
        let text = r#"{"terms":[{"a":{"gamma":"1"},"re":1.0}]}"#;
        assert!(matches!(
            fun_from_json(&parse(text).unwrap(), &mut SymbolTable::new()),
            Err(FormatError::Core(ncde_core::Error::UndeclaredSymbol(_)))
        ));
    }
}
