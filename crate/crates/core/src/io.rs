//! On-disk formats: input documents, bare graphs and reports.
//!
//! Input documents are JSON:
//!
//! ```json
//! {
//!   "version": 1,
//!   "bodies": [{"id": "base"}, {"id": "arm", "name": "upper arm"}],
//!   "constraints": [
//!     {"id": "hinge", "kind": "line-line-coincidence", "i": "base", "j": "arm",
//!      "point": [0, 0, "1/2"], "direction": [0, 0, 1]}
//!   ]
//! }
//! ```
//!
//! Bare graphs are edge lists with 1-based vertices:
//!
//! ```text
//! n=3
//! 1 2 black
//! 2 3 red   # comment
//! ```

use std::collections::HashMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::analyzer::AnalysisReport;
use crate::cad::{Body, CadConstraint, CadError, CadFramework, Geometry};
use crate::graph::{BiColoredMultigraph, Color, Edge, EdgeId};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("constraint `{constraint}` references unknown body `{body}`")]
    UnknownBody { constraint: String, body: String },
    #[error(transparent)]
    Cad(#[from] CadError),
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message.
        let message = message.split(" at line ").next().unwrap_or(&message).to_string();
        InputError::Syntax { line: e.line(), column: e.column(), message }
    }
}

/// A body reference: a body id, written as a string or an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BodyRef(pub String);

impl<'de> Deserialize<'de> for BodyRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RefVisitor;
        impl Visitor<'_> for RefVisitor {
            type Value = BodyRef;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a body id")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<BodyRef, E> {
                Ok(BodyRef(v.to_string()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<BodyRef, E> {
                Ok(BodyRef(v.to_string()))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<BodyRef, E> {
                Ok(BodyRef(v.to_string()))
            }
        }
        d.deserialize_any(RefVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDoc {
    pub id: BodyRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintDoc {
    pub id: String,
    pub i: BodyRef,
    pub j: BodyRef,
    #[serde(flatten)]
    pub geometry: Geometry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub version: u32,
    pub bodies: Vec<BodyDoc>,
    #[serde(default)]
    pub constraints: Vec<ConstraintDoc>,
}

impl InputDocument {
    pub fn from_framework(fw: &CadFramework) -> Self {
        let id = |k: usize| BodyRef(fw.bodies()[k].id.clone());
        InputDocument {
            version: FORMAT_VERSION,
            bodies: fw.bodies().iter().map(|b| BodyDoc { id: BodyRef(b.id.clone()), name: b.name.clone() }).collect(),
            constraints: fw
                .constraints()
                .iter()
                .map(|c| ConstraintDoc { id: c.id.clone(), i: id(c.i), j: id(c.j), geometry: c.geometry.clone() })
                .collect(),
        }
    }

    pub fn into_framework(self) -> Result<CadFramework, InputError> {
        if self.version != FORMAT_VERSION {
            return Err(InputError::Version(self.version));
        }
        let index: HashMap<&str, usize> = self.bodies.iter().enumerate().map(|(k, b)| (b.id.0.as_str(), k)).collect();
        let lookup = |c: &ConstraintDoc, r: &BodyRef| {
            index
                .get(r.0.as_str())
                .copied()
                .ok_or_else(|| InputError::UnknownBody { constraint: c.id.clone(), body: r.0.clone() })
        };
        let mut constraints = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            let (i, j) = (lookup(c, &c.i)?, lookup(c, &c.j)?);
            constraints.push(CadConstraint { id: c.id.clone(), i, j, geometry: c.geometry.clone() });
        }
        let bodies = self.bodies.into_iter().map(|b| Body { id: b.id.0, name: b.name }).collect();
        Ok(CadFramework::new(bodies, constraints)?)
    }
}

pub fn parse_document(text: &str) -> Result<CadFramework, InputError> {
    serde_json::from_str::<InputDocument>(text)?.into_framework()
}

pub fn format_document(fw: &CadFramework) -> String {
    serde_json::to_string_pretty(&InputDocument::from_framework(fw)).expect("documents serialize")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct GraphParseError {
    pub line: usize,
    pub message: String,
}

/// Parses the bare-graph format. Edge labels after the color are ignored.
pub fn parse_graph(text: &str) -> Result<BiColoredMultigraph, GraphParseError> {
    let err = |line: usize, message: String| GraphParseError { line, message };
    let mut n = None;
    let mut edges = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some(n) = n else {
            let value = content
                .strip_prefix("n=")
                .or_else(|| content.strip_prefix("n ="))
                .ok_or_else(|| err(line, format!("expected header `n=<int>`, found `{content}`")))?;
            n = Some(value.trim().parse::<usize>().map_err(|_| err(line, format!("invalid vertex count `{value}`")))?);
            continue;
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(err(line, format!("expected `u v black|red`, found `{content}`")));
        }
        let vertex = |s: &str| -> Result<usize, GraphParseError> {
            match s.parse::<usize>() {
                Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                _ => Err(err(line, format!("vertex `{s}` is not in 1..={n}"))),
            }
        };
        let (u, v) = (vertex(fields[0])?, vertex(fields[1])?);
        let color = match fields[2] {
            "black" | "b" => Color::Black,
            "red" | "r" => Color::Red,
            other => return Err(err(line, format!("unknown color `{other}`"))),
        };
        if u == v {
            return Err(err(line, "self-loop".into()));
        }
        edges.push(Edge { id: EdgeId(edges.len()), u, v, color });
    }
    let n = n.ok_or_else(|| err(1, "missing header `n=<int>`".into()))?;
    BiColoredMultigraph::new(n, edges).map_err(|e| err(0, e.to_string()))
}

pub fn format_graph(graph: &BiColoredMultigraph) -> String {
    let mut out = format!("n={}\n", graph.n());
    for e in graph.edges() {
        let color = if e.is_red() { "red" } else { "black" };
        out.push_str(&format!("{} {} {}\n", e.u + 1, e.v + 1, color));
    }
    out
}

pub fn report_to_json(report: &AnalysisReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

pub fn report_from_json(text: &str) -> Result<AnalysisReport, InputError> {
    Ok(serde_json::from_str(text)?)
}
