//! Graph files, JSON output with lossless numbers, and sweep CSV.
//!
//! A graph file is JSON of the form
//!
//! ```json
//! {"vertices": [{"id": "a", "mu": 1}, {"id": "b", "mu": 1}],
//!  "edges": [{"a": "a", "b": "b", "w": 1}],
//!  "functions": {"f": {"a": 1, "b": -0.5}}}
//! ```
//!
//! with each undirected edge listed once. Vertices missing from a function
//! take the value 0.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::graph::{Graph, VertexFunction};
use crate::scalar::Real;
use crate::threshold::SweepPoint;

/// Failures reading or writing files, kept apart from domain errors so the
/// command line can map them to a different exit code.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Domain(#[from] Error),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord<T> {
    id: String,
    mu: T,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord<T> {
    a: String,
    b: String,
    w: T,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de>"))]
struct FileRecord<T> {
    vertices: Vec<VertexRecord<T>>,
    edges: Vec<EdgeRecord<T>>,
    #[serde(default)]
    functions: BTreeMap<String, BTreeMap<String, T>>,
}

/// A parsed graph file.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphFile<T: Real> {
    pub graph: Graph<T>,
    pub functions: BTreeMap<String, VertexFunction<T>>,
}

impl<T: Real> GraphFile<T> {
    pub fn new(graph: Graph<T>) -> Self {
        Self {
            graph,
            functions: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let rec: FileRecord<T> = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
        let ids: Vec<&str> = rec.vertices.iter().map(|v| v.id.as_str()).collect();
        let measure: Vec<T> = rec.vertices.iter().map(|v| v.mu).collect();
        let edges: Vec<(&str, &str, T)> = rec.edges.iter().map(|e| (e.a.as_str(), e.b.as_str(), e.w)).collect();
        let graph = Graph::build(&ids, &edges, &measure)?;
        let mut functions = BTreeMap::new();
        for (name, values) in rec.functions {
            let mut v = vec![T::zero(); graph.m()];
            for (id, x) in values {
                v[graph.vertex_index(&id)?] = x;
            }
            functions.insert(name, graph.function(v)?);
        }
        Ok(Self { graph, functions })
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Serializes back to the file format. Parsing the output yields an equal
    /// value.
    pub fn to_json(&self) -> String {
        let g = &self.graph;
        let rec = FileRecord {
            vertices: g
                .ids()
                .iter()
                .zip(g.measure())
                .map(|(id, &mu)| VertexRecord { id: id.clone(), mu })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    a: g.ids()[e.a].clone(),
                    b: g.ids()[e.b].clone(),
                    w: e.w,
                })
                .collect(),
            functions: self
                .functions
                .iter()
                .map(|(name, f)| {
                    let values = g.ids().iter().cloned().zip(f.iter().copied()).collect();
                    (name.clone(), values)
                })
                .collect(),
        };
        to_json(&rec)
    }
}

/// `%.17g`: the shortest C-style general format with 17 significant digits,
/// which round-trips every `f64`.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// 17 significant digits for `f64`, 9 for `f32`.
struct LosslessFormatter;

impl serde_json::ser::Formatter for LosslessFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            w.write_all(format_g(value, 17).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        if value.is_finite() {
            w.write_all(format_g(value as f64, 9).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }
}

/// Compact JSON with floats written by [`format_g`].
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, LosslessFormatter);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

fn format_real<T: Real>(x: T) -> String {
    let digits = if std::mem::size_of::<T>() <= 4 { 9 } else { 17 };
    format_g(x.as_f64(), digits)
}

pub const CSV_HEADER: &str = "lambda,count,sol_index,sup_norm,jac_sign";

/// Renders sweep results as CSV, ordered by λ and then by sup-norm. A
/// coupling without solutions gives one row with empty solution columns.
pub fn bifurcation_csv<T: Real>(points: &[SweepPoint<T>]) -> String {
    let mut order: Vec<&SweepPoint<T>> = points.iter().collect();
    order.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite couplings"));
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in order {
        let set = &p.solutions;
        let lambda = format_real(p.lambda);
        if set.is_empty() {
            out.push_str(&format!("{lambda},0,,,\n"));
            continue;
        }
        let mut rows: Vec<(T, i32)> = set
            .solutions
            .iter()
            .zip(&set.jacobian_signs)
            .map(|(u, &s)| (u.sup_norm(), s))
            .collect();
        rows.sort_by(|a, b| a.partial_cmp(b).expect("finite norms"));
        for (k, (norm, sign)) in rows.into_iter().enumerate() {
            out.push_str(&format!("{lambda},{},{k},{},{sign}\n", set.len(), format_real(norm)));
        }
    }
    out
}

/// Writes [`bifurcation_csv`] to `path`.
pub fn emit_bifurcation_csv<T: Real>(points: &[SweepPoint<T>], path: &Path) -> Result<(), IoError> {
    std::fs::write(path, bifurcation_csv(points)).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}
