//! JSON graph documents and the JSON shapes of results.
//!
//! Exact weights are written as `[re_num, re_den, im_num, im_den]` decimal
//! integer strings; float weights as `[re, im]` decimal strings with 17
//! significant digits.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ghz::GhzVerdict;
use crate::graph::{Colour, Edge, FloatGraph, GraphError, Multigraph, VertexColouring, Weight};
use crate::matching::ColouringWeightTable;
use crate::rational::GaussianRational;
use crate::structure::CutSpec;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    MalformedJson,
    UnsupportedVersion,
    SelfLoop,
    EndpointOutOfRange,
    ZeroDenominator,
    ColourOutsideUniverse,
    InvalidNumber,
    WrongArity,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::MalformedJson => "MALFORMED_JSON",
            ErrorCode::UnsupportedVersion => "UNSUPPORTED_VERSION",
            ErrorCode::SelfLoop => "SELF_LOOP",
            ErrorCode::EndpointOutOfRange => "ENDPOINT_OUT_OF_RANGE",
            ErrorCode::ZeroDenominator => "ZERO_DENOMINATOR",
            ErrorCode::ColourOutsideUniverse => "COLOUR_OUTSIDE_UNIVERSE",
            ErrorCode::InvalidNumber => "INVALID_NUMBER",
            ErrorCode::WrongArity => "WRONG_ARITY",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}{}: {message}", code.as_str(), if path.is_empty() { String::new() } else { format!(" at {path}") })]
pub struct ParseError {
    pub code: ErrorCode,
    /// JSON path of the offending value, e.g. `edges[2].w[1]`.
    pub path: String,
    pub message: String,
}

impl ParseError {
    fn new(code: ErrorCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError { code, path: path.into(), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub u: usize,
    pub v: usize,
    pub cu: u32,
    pub cv: u32,
    pub w: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub version: u32,
    pub n: usize,
    pub colour_universe: Vec<u32>,
    pub edges: Vec<EdgeDocument>,
}

/// A weight type with a string-array JSON form.
pub trait WeightRepr: Weight {
    const ARITY: usize;
    fn to_strings(&self) -> Vec<String>;
    fn from_strings(parts: &[String], path: &str) -> Result<Self, ParseError>;

    fn to_json(&self) -> Value {
        json!(self.to_strings())
    }
}

fn big(s: &str, path: String) -> Result<BigInt, ParseError> {
    s.parse::<BigInt>()
        .map_err(|_| ParseError::new(ErrorCode::InvalidNumber, path, format!("{s:?} is not a decimal integer")))
}

impl WeightRepr for GaussianRational {
    const ARITY: usize = 4;

    fn to_strings(&self) -> Vec<String> {
        vec![
            self.re().numer().to_string(),
            self.re().denom().to_string(),
            self.im().numer().to_string(),
            self.im().denom().to_string(),
        ]
    }

    fn from_strings(parts: &[String], path: &str) -> Result<Self, ParseError> {
        let n: Vec<BigInt> = parts
            .iter()
            .enumerate()
            .map(|(i, s)| big(s, format!("{path}[{i}]")))
            .collect::<Result<_, _>>()?;
        for i in [1, 3] {
            if n[i] == BigInt::from(0) {
                return Err(ParseError::new(ErrorCode::ZeroDenominator, format!("{path}[{i}]"), "denominator is zero"));
            }
        }
        let [a, b, c, d]: [BigInt; 4] = n.try_into().expect("arity checked");
        Ok(GaussianRational::new(a, b, c, d).expect("denominators checked"))
    }
}

/// `x` with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl WeightRepr for Complex64 {
    const ARITY: usize = 2;

    fn to_strings(&self) -> Vec<String> {
        vec![format_float(self.re), format_float(self.im)]
    }

    fn from_strings(parts: &[String], path: &str) -> Result<Self, ParseError> {
        let f = |i: usize| {
            parts[i]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| ParseError::new(ErrorCode::InvalidNumber, format!("{path}[{i}]"), format!("{:?} is not a finite decimal", parts[i])))
        };
        Ok(Complex64::new(f(0)?, f(1)?))
    }
}

pub fn to_document<W: WeightRepr>(g: &Multigraph<W>) -> GraphDocument {
    GraphDocument {
        version: FORMAT_VERSION,
        n: g.n(),
        colour_universe: g.colour_universe().iter().map(|c| c.0).collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDocument { u: e.u(), v: e.v(), cu: e.cu().0, cv: e.cv().0, w: e.weight().to_strings() })
            .collect(),
    }
}

pub fn from_document<W: WeightRepr>(doc: &GraphDocument) -> Result<Multigraph<W>, ParseError> {
    if doc.version != FORMAT_VERSION {
        return Err(ParseError::new(ErrorCode::UnsupportedVersion, "version", format!("version {} is not supported", doc.version)));
    }
    let universe: Vec<Colour> = doc.colour_universe.iter().map(|&c| Colour(c)).collect();
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (i, e) in doc.edges.iter().enumerate() {
        let at = |field: &str| format!("edges[{i}].{field}");
        if e.w.len() != W::ARITY {
            return Err(ParseError::new(ErrorCode::WrongArity, at("w"), format!("expected {} parts, got {}", W::ARITY, e.w.len())));
        }
        let w = W::from_strings(&e.w, &at("w"))?;
        for (field, x) in [("u", e.u), ("v", e.v)] {
            if x >= doc.n {
                return Err(ParseError::new(ErrorCode::EndpointOutOfRange, at(field), format!("vertex {x} not below n = {}", doc.n)));
            }
        }
        for (field, c) in [("cu", e.cu), ("cv", e.cv)] {
            if !doc.colour_universe.contains(&c) {
                return Err(ParseError::new(ErrorCode::ColourOutsideUniverse, at(field), format!("colour {c} not in the universe")));
            }
        }
        let edge = Edge::new(e.u, e.v, Colour(e.cu), Colour(e.cv), w).map_err(|err| match err {
            GraphError::SelfLoop(_) => ParseError::new(ErrorCode::SelfLoop, at("v"), err.to_string()),
            other => ParseError::new(ErrorCode::MalformedJson, at(""), other.to_string()),
        })?;
        edges.push(edge);
    }
    Multigraph::new(doc.n, universe, edges).map_err(|e| ParseError::new(ErrorCode::MalformedJson, "", e.to_string()))
}

fn parse_document(text: &str) -> Result<GraphDocument, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::new(ErrorCode::MalformedJson, "", e.to_string()))
}

/// Parses an exact graph document.
pub fn parse(text: &str) -> Result<Multigraph, ParseError> {
    from_document(&parse_document(text)?)
}

/// Parses a float graph document, as written for rescaled graphs.
pub fn parse_float(text: &str) -> Result<FloatGraph, ParseError> {
    from_document(&parse_document(text)?)
}

pub fn serialize<W: WeightRepr>(g: &Multigraph<W>) -> String {
    serde_json::to_string_pretty(&to_document(g)).expect("documents serialize")
}

pub fn colouring_json(vc: &VertexColouring) -> Value {
    json!(vc.as_slice().iter().map(|c| c.0).collect::<Vec<_>>())
}

pub fn verdict_json<W: WeightRepr>(v: &GhzVerdict<W>) -> Value {
    json!({
        "is_ghz": v.is_ghz,
        "is_g_ghz": v.is_g_ghz,
        "dimension": v.dimension,
        "violations": v.violations.iter().map(|x| json!({
            "colouring": colouring_json(&x.colouring),
            "weight": x.weight.to_json(),
            "kind": x.kind,
        })).collect::<Vec<_>>(),
    })
}

pub fn table_json<W: WeightRepr>(t: &ColouringWeightTable<W>) -> Value {
    json!(t
        .evaluations()
        .map(|(vc, e)| json!({
            "colouring": colouring_json(vc),
            "weight": e.weight.to_json(),
            "matchings": e.matchings,
        }))
        .collect::<Vec<_>>())
}

pub fn cut_json(c: &CutSpec) -> Value {
    json!({ "s": c.s, "v1": c.v1, "v2": c.v2, "parity": c.parity })
}
