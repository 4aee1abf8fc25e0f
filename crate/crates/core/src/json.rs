//! JSON documents for scalars, matrices, specs and solver data.
//!
//! Block keys `"r,s"` and nested list positions in documents are 1-based where they
//! name segments; everything else mirrors the library types.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::canonical::{CanonicalCase, CanonicalSpec, SegmentSpec};
use crate::error::{Error, Result};
use crate::isotropy::Certificate;
use crate::matrix::Matrix;
use crate::scalar::{Backend, ExactScalar, FloatScalar, Rational, Scalar};
use crate::solver::{CongruenceProblem, FreeData};
use crate::toeplitz::{AltToeplitzData, Parity, ToeplitzElement};

fn bad(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

/// Scalars with a JSON form.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

pub fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Exact => "exact",
        Backend::Float => "float",
    }
}

/// Parses `"p/q"`, `"p"`, a decimal like `"-0.25"`, or a JSON number written without exponent.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || bad(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(Error::InvalidScalar("zero denominator".into()));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut n: BigInt = digits.parse().map_err(|_| err())?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_from(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => Err(bad(format!("expected a rational, got {v}"))),
    }
}

fn f64_from(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| bad("number out of range")),
        Value::String(s) => {
            if let Ok(x) = s.parse::<f64>() {
                Ok(x)
            } else {
                let r = parse_rational(s)?;
                Ok(ExactScalar::from_rational(&r).to_float().re())
            }
        }
        _ => Err(bad(format!("expected a number, got {v}"))),
    }
}

impl JsonScalar for ExactScalar {
    fn to_json(&self) -> Value {
        let [a, b, c, d] = self.components();
        json!({
            "a": format_rational(&a),
            "b": format_rational(&b),
            "c": format_rational(&c),
            "d": format_rational(&d),
        })
    }

    /// Accepts the `{"a","b","c","d"}` form (missing keys are zero), `{"re","im"}`
    /// with rational parts, or a bare rational.
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Object(o) => {
                if o.contains_key("re") || o.contains_key("im") {
                    check_keys(o, &["re", "im"])?;
                    let get = |k| o.get(k).map(rational_from).transpose().map(Option::unwrap_or_default);
                    return Ok(ExactScalar::gaussian(get("re")?, get("im")?));
                }
                check_keys(o, &["a", "b", "c", "d"])?;
                let get = |k| {
                    o.get(k)
                        .map(rational_from)
                        .transpose()
                        .map(|x| x.unwrap_or_else(Rational::zero))
                };
                Ok(ExactScalar::from_components(&[
                    get("a")?,
                    get("b")?,
                    get("c")?,
                    get("d")?,
                ]))
            }
            _ => Ok(ExactScalar::from_rational(&rational_from(v)?)),
        }
    }
}

impl JsonScalar for FloatScalar {
    fn to_json(&self) -> Value {
        json!({ "re": self.re(), "im": self.im() })
    }

    /// Accepts `{"re","im"}`, the exact `{"a","b","c","d"}` form, or a bare number.
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Object(o)
                if o.contains_key("a") || o.contains_key("b") || o.contains_key("c") || o.contains_key("d") =>
            {
                Ok(ExactScalar::from_json(v)?.to_float())
            }
            Value::Object(o) => {
                check_keys(o, &["re", "im"])?;
                let get = |k| o.get(k).map(f64_from).transpose().map(Option::unwrap_or_default);
                FloatScalar::new(get("re")?, get("im")?)
            }
            _ => FloatScalar::new(f64_from(v)?, 0.0),
        }
    }
}

fn check_keys(o: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match o.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(bad(format!("unexpected key {k:?}"))),
        None => Ok(()),
    }
}

fn field<'a>(o: &'a Map<String, Value>, k: &str) -> Result<&'a Value> {
    o.get(k).ok_or_else(|| bad(format!("missing field {k:?}")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(format!("{what} must be an object")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn usize_list(v: &Value, what: &str) -> Result<Vec<usize>> {
    array(v, what)?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| bad(format!("{what} must hold nonnegative integers")))
        })
        .collect()
}

// matrices

pub fn matrix_to_json<T: JsonScalar>(m: &Matrix<T>) -> Value {
    let entries: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(JsonScalar::to_json).collect()))
        .collect();
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "backend": backend_name(T::BACKEND),
        "entries": entries,
    })
}

/// Reads a matrix document. A bare array of rows is accepted too. Exact documents
/// may be read into the float backend; the reverse is refused.
pub fn matrix_from_json<T: JsonScalar>(v: &Value) -> Result<Matrix<T>> {
    let (rows_v, declared) = match v {
        Value::Array(_) => (v, None),
        Value::Object(o) => {
            check_keys(o, &["rows", "cols", "backend", "entries"])?;
            if let Some(b) = o.get("backend") {
                let b = b.as_str().ok_or_else(|| bad("backend must be a string"))?;
                match (b, T::BACKEND) {
                    ("exact", _) | ("float", Backend::Float) => {}
                    ("float", Backend::Exact) => {
                        return Err(bad("a float matrix cannot be read into the exact backend"));
                    }
                    _ => return Err(bad(format!("unknown backend {b:?}"))),
                }
            }
            let dims = match (o.get("rows"), o.get("cols")) {
                (Some(r), Some(c)) => Some((
                    r.as_u64().ok_or_else(|| bad("rows must be an integer"))? as usize,
                    c.as_u64().ok_or_else(|| bad("cols must be an integer"))? as usize,
                )),
                (None, None) => None,
                _ => return Err(bad("rows and cols must be given together")),
            };
            (field(o, "entries")?, dims)
        }
        _ => return Err(bad("matrix must be an object or an array of rows")),
    };
    let rows: Vec<Vec<T>> = array(rows_v, "entries")?
        .iter()
        .map(|row| array(row, "matrix row")?.iter().map(T::from_json).collect())
        .collect::<Result<_>>()?;
    let (r, c) = (rows.len(), rows.first().map_or(0, Vec::len));
    if let Some((dr, dc)) = declared {
        if (dr, dc) != (r, c) && !(r == 0 && dr == 0) {
            return Err(Error::Shape(format!("declared {dr}x{dc} but entries are {r}x{c}")));
        }
        if r == 0 {
            return Ok(Matrix::zeros(dr, dc));
        }
    }
    Matrix::from_rows(rows)
}

// specs

pub fn segment_spec_to_json(s: &SegmentSpec) -> Value {
    json!({ "alpha": s.alpha(), "mu": s.mu() })
}

pub fn segment_spec_from_json(v: &Value) -> Result<SegmentSpec> {
    let o = object(v, "segment spec")?;
    SegmentSpec::new(
        usize_list(field(o, "alpha")?, "alpha")?,
        usize_list(field(o, "mu")?, "mu")?,
    )
}

pub fn spec_to_json<T: JsonScalar>(spec: &CanonicalSpec<T>) -> Value {
    let mut o = Map::new();
    let case = match &spec.case {
        CanonicalCase::NonzeroPair { lambda } => {
            o.insert("lambda".into(), lambda.to_json());
            "nonzero"
        }
        CanonicalCase::Nilpotent => "nilpotent",
        CanonicalCase::OrthGeneric { lambda, exp_lambda } => {
            o.insert("lambda".into(), lambda.to_json());
            if let Some(e) = exp_lambda {
                o.insert("exp_lambda".into(), e.to_json());
            }
            "orth-generic"
        }
        CanonicalCase::Unipotent { epsilon } => {
            o.insert("epsilon".into(), json!(epsilon));
            "unipotent"
        }
    };
    o.insert("case".into(), json!(case));
    o.insert("alpha".into(), json!(spec.segments.alpha()));
    o.insert("mu".into(), json!(spec.segments.mu()));
    Value::Object(o)
}

pub fn spec_from_json<T: JsonScalar>(v: &Value) -> Result<CanonicalSpec<T>> {
    let o = object(v, "spec")?;
    check_keys(o, &["case", "lambda", "epsilon", "alpha", "mu", "exp_lambda"])?;
    let case = field(o, "case")?.as_str().ok_or_else(|| bad("case must be a string"))?;
    let lambda = || T::from_json(field(o, "lambda")?);
    let case = match case {
        "nonzero" => CanonicalCase::NonzeroPair { lambda: lambda()? },
        "nilpotent" => CanonicalCase::Nilpotent,
        "orth-generic" => CanonicalCase::OrthGeneric {
            lambda: lambda()?,
            exp_lambda: o.get("exp_lambda").map(T::from_json).transpose()?,
        },
        "unipotent" => {
            let e = field(o, "epsilon")?
                .as_i64()
                .ok_or_else(|| bad("epsilon must be an integer"))?;
            if e != 1 && e != -1 {
                return Err(Error::InvalidSpec(format!("epsilon must be 1 or -1, got {e}")));
            }
            CanonicalCase::Unipotent { epsilon: e as i8 }
        }
        other => return Err(Error::InvalidSpec(format!("unknown case {other:?}"))),
    };
    let segments = SegmentSpec::new(
        usize_list(field(o, "alpha")?, "alpha")?,
        usize_list(field(o, "mu")?, "mu")?,
    )?;
    CanonicalSpec::new(case, segments)
}

// Toeplitz data

fn key(r: usize, s: usize) -> String {
    format!("{},{}", r + 1, s + 1)
}

fn parse_key(k: &str) -> Result<(usize, usize)> {
    let err = || bad(format!("block key {k:?} must be \"r,s\" with 1-based indices"));
    let (r, s) = k.split_once(',').ok_or_else(err)?;
    let r: usize = r.trim().parse().map_err(|_| err())?;
    let s: usize = s.trim().parse().map_err(|_| err())?;
    if r == 0 || s == 0 {
        return Err(err());
    }
    Ok((r - 1, s - 1))
}

fn matrices_to_json<T: JsonScalar>(ms: &[Matrix<T>]) -> Value {
    Value::Array(ms.iter().map(matrix_to_json).collect())
}

fn matrices_from_json<T: JsonScalar>(v: &Value, what: &str) -> Result<Vec<Matrix<T>>> {
    array(v, what)?.iter().map(matrix_from_json).collect()
}

type BlockMap<T> = BTreeMap<(usize, usize), Vec<Matrix<T>>>;

fn block_map_to_json<T: JsonScalar>(m: &BlockMap<T>) -> Value {
    Value::Object(m.iter().map(|(&(r, s), l)| (key(r, s), matrices_to_json(l))).collect())
}

fn block_map_from_json<T: JsonScalar>(v: &Value) -> Result<BlockMap<T>> {
    object(v, "blocks")?
        .iter()
        .map(|(k, l)| Ok((parse_key(k)?, matrices_from_json(l, "block list")?)))
        .collect()
}

pub fn toeplitz_to_json<T: JsonScalar>(x: &ToeplitzElement<T>) -> Value {
    json!({ "spec": segment_spec_to_json(x.spec()), "blocks": block_map_to_json(x.blocks()) })
}

pub fn toeplitz_from_json<T: JsonScalar>(v: &Value) -> Result<ToeplitzElement<T>> {
    let o = object(v, "Toeplitz element")?;
    check_keys(o, &["spec", "blocks"])?;
    ToeplitzElement::new(
        segment_spec_from_json(field(o, "spec")?)?,
        block_map_from_json(field(o, "blocks")?)?,
    )
}

pub fn parity_from_str(s: &str) -> Result<Parity> {
    match s {
        "standard" => Ok(Parity::Standard),
        "flipped" => Ok(Parity::Flipped),
        _ => Err(bad(format!("parity must be \"standard\" or \"flipped\", got {s:?}"))),
    }
}

pub fn alt_to_json<T: JsonScalar>(b: &AltToeplitzData<T>) -> Value {
    json!({
        "spec": segment_spec_to_json(b.spec()),
        "parity": b.parity().name(),
        "blocks": b.blocks().iter().map(|l| matrices_to_json(l)).collect::<Vec<_>>(),
    })
}

/// `"parity"` is optional; without it the convention is inferred from the data.
pub fn alt_from_json<T: JsonScalar>(v: &Value) -> Result<AltToeplitzData<T>> {
    let o = object(v, "alternating data")?;
    check_keys(o, &["spec", "parity", "blocks"])?;
    let spec = segment_spec_from_json(field(o, "spec")?)?;
    let blocks: Vec<Vec<Matrix<T>>> = array(field(o, "blocks")?, "blocks")?
        .iter()
        .map(|l| matrices_from_json(l, "segment blocks"))
        .collect::<Result<_>>()?;
    match o.get("parity") {
        Some(p) => {
            let p = parity_from_str(p.as_str().ok_or_else(|| bad("parity must be a string"))?)?;
            AltToeplitzData::new(spec, blocks, p)
        }
        None => AltToeplitzData::infer(spec, blocks),
    }
}

pub fn problem_to_json<T: JsonScalar>(p: &CongruenceProblem<T>) -> Value {
    json!({ "b": alt_to_json(p.b()), "c": alt_to_json(p.c()) })
}

pub fn problem_from_json<T: JsonScalar>(v: &Value) -> Result<CongruenceProblem<T>> {
    let o = object(v, "problem")?;
    check_keys(o, &["b", "c"])?;
    CongruenceProblem::new(alt_from_json(field(o, "b")?)?, alt_from_json(field(o, "c")?)?)
}

pub fn free_to_json<T: JsonScalar>(f: &FreeData<T>) -> Value {
    json!({
        "spec": segment_spec_to_json(f.spec()),
        "below": block_map_to_json(f.below()),
        "seeds": matrices_to_json(f.seeds()),
        "zees": f.zees().iter().map(|l| matrices_to_json(l)).collect::<Vec<_>>(),
    })
}

pub fn free_from_json<T: JsonScalar>(v: &Value) -> Result<FreeData<T>> {
    let o = object(v, "free data")?;
    check_keys(o, &["spec", "below", "seeds", "zees"])?;
    let spec = segment_spec_from_json(field(o, "spec")?)?;
    let below = match o.get("below") {
        Some(b) => block_map_from_json(b)?,
        None => BTreeMap::new(),
    };
    let zees = array(field(o, "zees")?, "zees")?
        .iter()
        .map(|l| matrices_from_json(l, "Z list"))
        .collect::<Result<_>>()?;
    FreeData::new(spec, below, matrices_from_json(field(o, "seeds")?, "seeds")?, zees)
}

/// Residuals print as `"0"` when they vanish identically.
pub fn residual_string(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:e}")
    }
}

pub fn certificate_to_json(c: &Certificate) -> Value {
    json!({
        "backend": backend_name(c.backend),
        "orthogonality": residual_string(c.orthogonality),
        "stabilizer": residual_string(c.stabilizer),
        "verified": c.verified,
    })
}

/// Parses text as JSON, surfacing syntax errors as [`Error::Json`].
pub fn parse(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    type X = ExactScalar;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn exact_scalar_form() {
        let x = X::from_components(&[q(1, 2), q(0, 1), q(-3, 4), q(2, 1)]);
        let v = x.to_json();
        assert_eq!(v, json!({"a": "1/2", "b": "0", "c": "-3/4", "d": "2"}));
        assert_eq!(X::from_json(&v).unwrap(), x);
        assert_eq!(X::from_json(&json!(3)).unwrap(), X::from_int(3));
        assert_eq!(X::from_json(&json!("0.25")).unwrap(), X::from_frac(1, 4));
        assert_eq!(
            X::from_json(&json!({"re": "3/5", "im": "4/5"})).unwrap(),
            X::gaussian(q(3, 5), q(4, 5))
        );
        assert!(X::from_json(&json!({"a": "1/0"})).is_err());
        assert!(X::from_json(&json!({"z": 1})).is_err());
        assert!(X::from_json(&json!("abc")).is_err());
    }

    #[test]
    fn float_scalar_form() {
        let x = FloatScalar::new(0.5, -2.0).unwrap();
        assert_eq!(x.to_json(), json!({"re": 0.5, "im": -2.0}));
        assert_eq!(FloatScalar::from_json(&x.to_json()).unwrap(), x);
        let s = FloatScalar::from_json(&json!({"b": "1"})).unwrap();
        assert!((s.re() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn matrix_round_trip() {
        let m: Matrix<X> = random::matrix(&mut random::rng(4), 3, 2);
        let v = matrix_to_json(&m);
        assert_eq!(v["rows"], 3);
        assert_eq!(v["backend"], "exact");
        assert_eq!(matrix_from_json::<X>(&v).unwrap(), m);
        let f: Matrix<FloatScalar> = matrix_from_json(&v).unwrap();
        assert_eq!(f.shape(), (3, 2));
        assert!(matrix_from_json::<X>(&matrix_to_json(&f)).is_err());
        assert_eq!(
            matrix_from_json::<X>(&json!([[1, 2], [3, 4]])).unwrap(),
            Matrix::from_ints(&[&[1, 2], &[3, 4]])
        );
        assert!(matches!(
            matrix_from_json::<X>(&json!({"rows": 2, "cols": 2, "entries": [[1, 2]]})),
            Err(Error::Shape(_))
        ));
        let empty = Matrix::<X>::zeros(0, 0);
        assert_eq!(matrix_from_json::<X>(&matrix_to_json(&empty)).unwrap(), empty);
    }

    #[test]
    fn spec_documents() {
        let v = json!({"case": "nonzero", "lambda": 1, "alpha": [2, 1], "mu": [1, 1]});
        let s: CanonicalSpec<X> = spec_from_json(&v).unwrap();
        assert_eq!(s, CanonicalSpec::nonzero(X::one(), vec![2, 1], vec![1, 1]).unwrap());
        assert_eq!(spec_from_json::<X>(&spec_to_json(&s)).unwrap(), s);
        let u = json!({"case": "unipotent", "epsilon": -1, "alpha": [3], "mu": [1]});
        let su: CanonicalSpec<X> = spec_from_json(&u).unwrap();
        assert_eq!(spec_to_json(&su), u);
        let g =
            json!({"case": "orth-generic", "lambda": {"c": "1/2"}, "exp_lambda": {"a": "2"}, "alpha": [1], "mu": [1]});
        let sg: CanonicalSpec<X> = spec_from_json(&g).unwrap();
        assert_eq!(spec_from_json::<X>(&spec_to_json(&sg)).unwrap(), sg);
        assert!(matches!(
            spec_from_json::<X>(&json!({"case": "nonzero", "lambda": 0, "alpha": [1], "mu": [1]})),
            Err(Error::InvalidSpec(_))
        ));
        assert!(spec_from_json::<X>(&json!({"case": "nilpotent", "alpha": [1, 2], "mu": [1, 1]})).is_err());
        assert!(spec_from_json::<X>(&json!({"case": "odd", "alpha": [1], "mu": [1]})).is_err());
    }

    #[test]
    fn toeplitz_and_solver_documents() {
        let s = SegmentSpec::new(vec![3, 1], vec![1, 2]).unwrap();
        let mut rng = random::rng(11);
        let x = ToeplitzElement::<X>::random(&s, &mut rng);
        let v = toeplitz_to_json(&x);
        assert!(v["blocks"].get("2,1").is_some());
        assert_eq!(toeplitz_from_json::<X>(&v).unwrap(), x);
        let (p, f) = CongruenceProblem::<X>::random(&s, Parity::Standard, &mut rng).unwrap();
        assert_eq!(problem_from_json::<X>(&problem_to_json(&p)).unwrap(), p);
        assert_eq!(free_from_json::<X>(&free_to_json(&f)).unwrap(), f);
        let mut doc = alt_to_json(p.b());
        doc.as_object_mut().unwrap().remove("parity");
        assert_eq!(alt_from_json::<X>(&doc).unwrap(), *p.b());
        assert!(parse_key("0,1").is_err());
        assert!(parity_from_str("odd").is_err());
    }
}
