//! JSON graph and fiber documents.

use std::collections::{BTreeMap, BTreeSet};

use admgraph_core::graph::{Divisor, Edge, GraphError, MetrizedGraph};
use admgraph_core::hyperelliptic::{HyperellipticGraph, Involution};
use admgraph_core::rational::{format_rational, parse_rational, Rational};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub ends: [String; 2],
    pub length: String,
}

/// Swapped ids; anything not listed is fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvolutionEntry {
    #[serde(default)]
    pub vertices: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IssueKind {
    Structure,
    DanglingId,
    DuplicateId,
    BadRational,
}

impl IssueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueKind::Structure => "structure",
            IssueKind::DanglingId => "dangling-id",
            IssueKind::DuplicateId => "duplicate-id",
            IssueKind::BadRational => "bad-rational",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaIssue {
    pub path: String,
    pub kind: IssueKind,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{} schema error(s), first at {}: {}", .0.len(), .0[0].path, .0[0].message)]
    Schema(Vec<SchemaIssue>),
}

/// Parses and checks a document: structure, id references and rational
/// literals. Graph-level properties such as connectivity are not checked.
pub fn parse_graph_document(bytes: &[u8]) -> Result<GraphDocument, DocumentError> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let doc: GraphDocument = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = match e.path().to_string() {
            p if p == "." => "$".to_string(),
            p => p,
        };
        DocumentError::Schema(vec![SchemaIssue {
            path,
            kind: IssueKind::Structure,
            message: e.inner().to_string(),
        }])
    })?;
    let issues = doc.check();
    if issues.is_empty() {
        Ok(doc)
    } else {
        Err(DocumentError::Schema(issues))
    }
}

fn check_rational(issues: &mut Vec<SchemaIssue>, path: String, literal: &str) {
    if let Err(e) = parse_rational(literal) {
        issues.push(SchemaIssue {
            path,
            kind: IssueKind::BadRational,
            message: e.to_string(),
        });
    }
}

fn dangling(path: String, what: &str, id: &str) -> SchemaIssue {
    SchemaIssue {
        path,
        kind: IssueKind::DanglingId,
        message: format!("unknown {what} id {id:?}"),
    }
}

impl GraphDocument {
    fn check(&self) -> Vec<SchemaIssue> {
        let mut issues = Vec::new();
        let mut vertex_ids = BTreeSet::new();
        for (k, v) in self.vertices.iter().enumerate() {
            if !vertex_ids.insert(v.id.as_str()) {
                issues.push(SchemaIssue {
                    path: format!("vertices[{k}].id"),
                    kind: IssueKind::DuplicateId,
                    message: format!("duplicate vertex id {:?}", v.id),
                });
            }
        }
        let mut edge_ids = BTreeSet::new();
        for (k, e) in self.edges.iter().enumerate() {
            if !edge_ids.insert(e.id.as_str()) {
                issues.push(SchemaIssue {
                    path: format!("edges[{k}].id"),
                    kind: IssueKind::DuplicateId,
                    message: format!("duplicate edge id {:?}", e.id),
                });
            }
            for end in &e.ends {
                if !vertex_ids.contains(end.as_str()) {
                    issues.push(dangling(format!("edges[{k}].ends"), "vertex", end));
                }
            }
            check_rational(&mut issues, format!("edges[{k}].length"), &e.length);
        }
        if let Some(inv) = &self.involution {
            for (a, b) in &inv.vertices {
                for id in [a, b] {
                    if !vertex_ids.contains(id.as_str()) {
                        issues.push(dangling(format!("involution.vertices.{a}"), "vertex", id));
                    }
                }
            }
            for (a, b) in &inv.edges {
                for id in [a, b] {
                    if !edge_ids.contains(id.as_str()) {
                        issues.push(dangling(format!("involution.edges.{a}"), "edge", id));
                    }
                }
            }
        }
        if let Some(d) = &self.divisor {
            for (v, c) in d {
                if !vertex_ids.contains(v.as_str()) {
                    issues.push(dangling(format!("divisor.{v}"), "vertex", v));
                }
                check_rational(&mut issues, format!("divisor.{v}"), c);
            }
        }
        issues
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn raw_edges(&self) -> Vec<Edge> {
        self.edges
            .iter()
            .map(|e| {
                let length = parse_rational(&e.length).expect("checked at parse time");
                Edge::new(e.id.clone(), e.ends[0].clone(), e.ends[1].clone(), length)
            })
            .collect()
    }

    pub fn graph(&self) -> Result<MetrizedGraph, GraphError> {
        let edges = self.raw_edges();
        let vertices = self.vertices.iter().map(|v| v.id.clone());
        if edges.iter().any(Edge::is_loop) {
            MetrizedGraph::new_with_loops(vertices, edges)
        } else {
            MetrizedGraph::new(vertices, edges)
        }
    }

    pub fn involution(&self) -> Option<Involution> {
        self.involution
            .as_ref()
            .map(|i| Involution::from_maps(symmetric(&i.vertices), symmetric(&i.edges)))
    }

    pub fn divisor(&self) -> Option<Divisor> {
        self.divisor.as_ref().map(|d| {
            Divisor::from_pairs(
                d.iter()
                    .map(|(v, c)| (v.clone(), parse_rational(c).expect("checked at parse time"))),
            )
        })
    }

    /// Component genera when any vertex carries one; the rest default to 0.
    pub fn genera(&self) -> Option<BTreeMap<String, u32>> {
        if self.vertices.iter().all(|v| v.genus.is_none()) {
            return None;
        }
        Some(
            self.vertices
                .iter()
                .map(|v| (v.id.clone(), v.genus.unwrap_or(0)))
                .collect(),
        )
    }

    pub fn from_parts(
        graph: &MetrizedGraph,
        involution: Option<&Involution>,
        divisor: Option<&Divisor>,
        genera: Option<&BTreeMap<String, u32>>,
    ) -> GraphDocument {
        let vertices = graph
            .vertices()
            .iter()
            .map(|v| VertexEntry {
                id: v.clone(),
                genus: genera.map(|g| g.get(v).copied().unwrap_or(0)),
            })
            .collect();
        let edges = graph
            .edges()
            .iter()
            .map(|e| EdgeEntry {
                id: e.id.clone(),
                ends: [e.u.clone(), e.v.clone()],
                length: format_rational(&e.length),
            })
            .collect();
        let moved = |m: &BTreeMap<String, String>| -> BTreeMap<String, String> {
            m.iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| (a.clone(), b.clone()))
                .collect()
        };
        let involution = involution.map(|i| InvolutionEntry {
            vertices: moved(i.vertex_map()),
            edges: moved(i.edge_map()),
        });
        let divisor = divisor.map(|d| d.iter().map(|(v, c)| (v.clone(), format_rational(c))).collect());
        GraphDocument {
            vertices,
            edges,
            involution,
            divisor,
        }
    }

    pub fn from_hyperelliptic(h: &HyperellipticGraph, divisor: Option<&Divisor>) -> GraphDocument {
        GraphDocument::from_parts(h.graph(), Some(h.involution()), divisor, None)
    }
}

/// Completes a map given one direction per swapped pair.
fn symmetric(m: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    let mut out = m.clone();
    for (a, b) in m {
        out.entry(b.clone()).or_insert_with(|| a.clone());
    }
    out
}

/// Parses an inline divisor such as `{"P":"1","Q":"1/2"}`.
pub fn parse_divisor_literal(text: &str) -> Result<Divisor, String> {
    let map: BTreeMap<String, String> =
        serde_json::from_str(text).map_err(|e| format!("divisor must be a JSON object of rational strings: {e}"))?;
    let mut pairs: Vec<(String, Rational)> = Vec::new();
    for (v, c) in map {
        pairs.push((v, parse_rational(&c).map_err(|e| e.to_string())?));
    }
    Ok(Divisor::from_pairs(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SG: &str = r#"{
  "vertices": [
    {
      "id": "P"
    },
    {
      "id": "Q"
    }
  ],
  "edges": [
    {
      "id": "e1",
      "ends": [
        "P",
        "Q"
      ],
      "length": "1"
    },
    {
      "id": "e2",
      "ends": [
        "P",
        "Q"
      ],
      "length": "1"
    }
  ],
  "involution": {
    "vertices": {},
    "edges": {
      "e1": "e2"
    }
  },
  "divisor": {
    "P": "1",
    "Q": "1"
  }
}
"#;

    #[test]
    fn minimal_sg_parses() {
        let doc = parse_graph_document(SG.as_bytes()).unwrap();
        assert_eq!(doc.vertices.len(), 2);
        assert_eq!(doc.edges.len(), 2);
        let g = doc.graph().unwrap();
        assert_eq!(g.betti_number(), 1);
        let inv = doc.involution().unwrap();
        assert_eq!(inv.edge("e2"), "e1");
    }

    #[test]
    fn canonical_round_trip() {
        let doc = parse_graph_document(SG.as_bytes()).unwrap();
        assert_eq!(doc.to_canonical_string(), SG);
    }

    #[test]
    fn dangling_end_is_located() {
        let text = SG.replacen(
            "\"Q\"\n      ],\n      \"length\": \"1\"",
            "\"R\"\n      ],\n      \"length\": \"1\"",
            1,
        );
        let DocumentError::Schema(issues) = parse_graph_document(text.as_bytes()).unwrap_err() else {
            panic!("expected schema error");
        };
        assert_eq!(issues[0].path, "edges[0].ends");
        assert_eq!(issues[0].kind, IssueKind::DanglingId);
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let text = SG.replacen("\"length\": \"1\"", "\"length\": \"3/0\"", 1);
        let DocumentError::Schema(issues) = parse_graph_document(text.as_bytes()).unwrap_err() else {
            panic!("expected schema error");
        };
        assert_eq!(issues[0].path, "edges[0].length");
        assert_eq!(issues[0].kind, IssueKind::BadRational);
    }

    #[test]
    fn structural_errors_carry_paths() {
        let text = r#"{"vertices":[{"id":"P"}],"edges":[{"id":"e","ends":["P"],"length":"1"}]}"#;
        let DocumentError::Schema(issues) = parse_graph_document(text.as_bytes()).unwrap_err() else {
            panic!("expected schema error");
        };
        assert!(issues[0].path.starts_with("edges[0].ends"), "{}", issues[0].path);
        assert!(matches!(parse_graph_document(b"{"), Err(DocumentError::Syntax { .. })));
    }

    #[test]
    fn divisor_literal() {
        let d = parse_divisor_literal(r#"{"P":"1","Q":"-1/2"}"#).unwrap();
        assert_eq!(d.coefficient("Q"), admgraph_core::rational::rat(-1, 2));
        assert!(parse_divisor_literal(r#"{"P":1}"#).is_err());
    }
}
