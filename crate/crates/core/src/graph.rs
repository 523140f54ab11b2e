//! Side-information graphs.
//!
//! A directed edge `(u, v)` means the user demanding `x_u` already holds `x_v`.
//! Vertex ids are 1-based everywhere in the public surface; iteration is always
//! in ascending id order so that every downstream choice is reproducible.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// 1-based vertex id. Vertex `n` carries message `x_n`.
pub type Vertex = u32;

/// Ordered vertex set.
pub type VertexSet = BTreeSet<Vertex>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("missing `inner:` directive")]
    MissingInnerSet,
    #[error("inner set is empty")]
    EmptyInnerSet,
    #[error("inner vertex {vertex} out of range 1..={n}")]
    InnerOutOfRange { vertex: Vertex, n: u32 },
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: Vertex, n: u32 },
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("graph has no vertices")]
    NoVertices,
    #[error("invalid graph json: {0}")]
    Json(String),
}

/// Directed side-information graph over vertices `1..=n` with a designated
/// inner-vertex set. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct SideInfoGraph {
    n: u32,
    inner: Vec<Vertex>,
    is_inner: Vec<bool>,
    out: Vec<VertexSet>,
    inc: Vec<VertexSet>,
    edge_count: usize,
}

impl SideInfoGraph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range ids.
    pub fn new<I>(n: u32, inner: &[Vertex], edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        if inner.is_empty() {
            return Err(GraphError::EmptyInnerSet);
        }
        let mut is_inner = vec![false; n as usize];
        for &v in inner {
            if v == 0 || v > n {
                return Err(GraphError::InnerOutOfRange { vertex: v, n });
            }
            is_inner[(v - 1) as usize] = true;
        }
        let inner: Vec<Vertex> = inner.iter().copied().collect::<VertexSet>().into_iter().collect();

        let mut out = vec![VertexSet::new(); n as usize];
        let mut inc = vec![VertexSet::new(); n as usize];
        let mut edge_count = 0;
        for (u, v) in edges {
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !out[(u - 1) as usize].insert(v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            inc[(v - 1) as usize].insert(u);
            edge_count += 1;
        }
        Ok(SideInfoGraph { n, inner, is_inner, out, inc, edge_count })
    }

    /// Parses the line-based graph document (see [`parse_graph`]).
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        parse_graph(text)
    }

    pub fn num_vertices(&self) -> u32 {
        self.n
    }

    /// Number of inner vertices, `K`.
    pub fn num_inner(&self) -> usize {
        self.inner.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    /// Inner vertices in ascending order.
    pub fn inner(&self) -> &[Vertex] {
        &self.inner
    }

    pub fn inner_set(&self) -> VertexSet {
        self.inner.iter().copied().collect()
    }

    pub fn is_inner(&self, v: Vertex) -> bool {
        v >= 1 && v <= self.n && self.is_inner[(v - 1) as usize]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v >= 1 && v <= self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        1..=self.n
    }

    pub fn non_inner(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices().filter(move |&v| !self.is_inner(v))
    }

    /// Out-neighborhood of `q`, checked.
    pub fn out_neighbors(&self, q: Vertex) -> Result<&VertexSet, GraphError> {
        if !self.contains(q) {
            return Err(GraphError::VertexOutOfRange { vertex: q, n: self.n });
        }
        Ok(&self.out[(q - 1) as usize])
    }

    /// Out-neighborhood of `q`. Panics when `q` is out of range.
    pub fn out(&self, q: Vertex) -> &VertexSet {
        &self.out[(q - 1) as usize]
    }

    /// In-neighborhood of `q`. Panics when `q` is out of range.
    pub fn inc(&self, q: Vertex) -> &VertexSet {
        &self.inc[(q - 1) as usize]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.contains(u) && self.out[(u - 1) as usize].contains(&v)
    }

    /// All edges, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| self.out(u).iter().map(move |&v| (u, v)))
    }

    /// Canonical JSON document.
    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            n: self.n,
            inner: self.inner.clone(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("graph doc serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        doc.try_into()
    }

    /// Canonical line-based document; `parse_graph(g.to_text()) == g`.
    pub fn to_text(&self) -> String {
        let mut s = format!("n: {}\ninner:", self.n);
        for v in &self.inner {
            s.push_str(&format!(" {v}"));
        }
        s.push('\n');
        for (u, v) in self.edges() {
            s.push_str(&format!("edge: {u} {v}\n"));
        }
        s
    }
}

impl fmt::Debug for SideInfoGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SideInfoGraph")
            .field("n", &self.n)
            .field("inner", &self.inner)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl FromStr for SideInfoGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_graph(s)
    }
}

/// JSON form: `{"n": N, "inner": [..], "edges": [[u,v],..]}`, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: u32,
    pub inner: Vec<Vertex>,
    pub edges: Vec<[Vertex; 2]>,
}

impl TryFrom<GraphDoc> for SideInfoGraph {
    type Error = GraphError;

    fn try_from(doc: GraphDoc) -> Result<Self, Self::Error> {
        SideInfoGraph::new(doc.n, &doc.inner, doc.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

/// Parses the line-based graph format:
///
/// ```text
/// # comment
/// n: 3          (optional; otherwise the largest id mentioned)
/// inner: 1 2    (exactly once)
/// edge: 1 3     (one per edge)
/// ```
pub fn parse_graph(text: &str) -> Result<SideInfoGraph, GraphError> {
    let mut declared_n: Option<(u32, usize)> = None;
    let mut inner: Option<(Vec<Vertex>, usize)> = None;
    let mut edges: Vec<(Vertex, Vertex, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = |reason: &str| GraphError::Malformed { line, reason: reason.to_string() };
        let (key, rest) = trimmed.split_once(':').ok_or_else(|| malformed("expected `key: values`"))?;
        let ids: Vec<Vertex> = rest
            .split_whitespace()
            .map(|t| t.parse::<Vertex>().map_err(|_| malformed(&format!("invalid vertex id `{t}`"))))
            .collect::<Result<_, _>>()?;
        match key.trim() {
            "n" => {
                if declared_n.is_some() {
                    return Err(malformed("`n:` declared twice"));
                }
                match ids.as_slice() {
                    [n] if *n > 0 => declared_n = Some((*n, line)),
                    _ => return Err(malformed("`n:` takes one positive integer")),
                }
            }
            "inner" => {
                if inner.is_some() {
                    return Err(malformed("`inner:` declared twice"));
                }
                if ids.is_empty() {
                    return Err(GraphError::EmptyInnerSet);
                }
                let unique: VertexSet = ids.iter().copied().collect();
                if unique.len() != ids.len() {
                    return Err(malformed("repeated inner vertex"));
                }
                if let Some(&v) = ids.iter().find(|&&v| v == 0) {
                    return Err(GraphError::InnerOutOfRange { vertex: v, n: declared_n.map_or(0, |d| d.0) });
                }
                inner = Some((ids, line));
            }
            "edge" => match ids.as_slice() {
                [u, v] => edges.push((*u, *v, line)),
                _ => return Err(malformed("`edge:` takes exactly two vertex ids")),
            },
            other => return Err(malformed(&format!("unknown directive `{other}`"))),
        }
    }

    let (inner, _) = inner.ok_or(GraphError::MissingInnerSet)?;
    let max_id = edges
        .iter()
        .flat_map(|&(u, v, _)| [u, v])
        .chain(inner.iter().copied())
        .max()
        .unwrap_or(0);
    let n = declared_n.map_or(max_id, |(n, _)| n);
    if let Some(&v) = inner.iter().find(|&&v| v == 0 || v > n) {
        return Err(GraphError::InnerOutOfRange { vertex: v, n });
    }
    let mut seen = BTreeSet::new();
    for &(u, v, line) in &edges {
        if u == 0 || v == 0 || u > n || v > n {
            let vertex = if u == 0 || u > n { u } else { v };
            return Err(GraphError::Malformed { line, reason: GraphError::VertexOutOfRange { vertex, n }.to_string() });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !seen.insert((u, v)) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
    }
    SideInfoGraph::new(n, &inner, edges.into_iter().map(|(u, v, _)| (u, v)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MessageError {
    #[error("expected {expected} messages, got {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("message {vertex} has {found} bytes, expected {expected}")]
    LengthMismatch { vertex: Vertex, expected: usize, found: usize },
    #[error("messages must be at least one byte long")]
    Empty,
}

/// One octet-string per vertex, all of the same length; `x_n` is entry `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct MessageVector {
    values: Vec<Vec<u8>>,
}

impl MessageVector {
    pub fn new(values: Vec<Vec<u8>>) -> Result<Self, MessageError> {
        let len = values.first().map_or(0, Vec::len);
        if len == 0 {
            return Err(MessageError::Empty);
        }
        if let Some(k) = values.iter().position(|m| m.len() != len) {
            return Err(MessageError::LengthMismatch { vertex: k as Vertex + 1, expected: len, found: values[k].len() });
        }
        Ok(MessageVector { values })
    }

    pub fn zeros(n: u32, msg_len: usize) -> Self {
        assert!(msg_len > 0, "messages must be at least one byte long");
        MessageVector { values: vec![vec![0; msg_len]; n as usize] }
    }

    pub fn random<R: rand::Rng + ?Sized>(n: u32, msg_len: usize, rng: &mut R) -> Self {
        let mut msgs = Self::zeros(n, msg_len);
        for m in &mut msgs.values {
            rng.fill_bytes(m);
        }
        msgs
    }

    /// Checks that there is one message per vertex of `g`.
    pub fn check_for(&self, g: &SideInfoGraph) -> Result<(), MessageError> {
        if self.values.len() != g.num_vertices() as usize {
            return Err(MessageError::WrongCount { expected: g.num_vertices() as usize, found: self.values.len() });
        }
        Ok(())
    }

    pub fn num_messages(&self) -> usize {
        self.values.len()
    }

    pub fn msg_len(&self) -> usize {
        self.values[0].len()
    }

    /// `x_v`, 1-based. Panics when `v` is out of range.
    pub fn get(&self, v: Vertex) -> &[u8] {
        &self.values[(v - 1) as usize]
    }

    pub fn values(&self) -> &[Vec<u8>] {
        &self.values
    }
}

impl TryFrom<Vec<Vec<u8>>> for MessageVector {
    type Error = MessageError;

    fn try_from(values: Vec<Vec<u8>>) -> Result<Self, Self::Error> {
        MessageVector::new(values)
    }
}

impl From<MessageVector> for Vec<Vec<u8>> {
    fn from(m: MessageVector) -> Self {
        m.values
    }
}

/// `dst ^= src`, byte by byte.
pub fn xor_into(dst: &mut [u8], src: &[u8]) {
    assert_eq!(dst.len(), src.len(), "xor operands differ in length");
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_document() {
        let g = parse_graph("inner: 1 2\nedge: 1 3\nedge: 3 2\nedge: 2 1").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_inner(), 2);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.inner(), &[1, 2]);
    }

    #[test]
    fn missing_inner_is_an_error() {
        assert_eq!(parse_graph("edge: 1 2\nedge: 2 1"), Err(GraphError::MissingInnerSet));
    }

    #[test]
    fn declared_n_keeps_isolated_vertices() {
        let g = parse_graph("# c\nn: 5\ninner: 1 2\nedge: 1 2\n").unwrap();
        assert_eq!(g.num_vertices(), 5);
        assert!(g.out(5).is_empty());
    }

    #[test]
    fn reports_line_of_malformed_directive() {
        match parse_graph("inner: 1 2\n\nedge: 1\n") {
            Err(GraphError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph("inner: 1 2\nvertex: 3\n") {
            Err(GraphError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_graph("inner: 1 x"), Err(GraphError::Malformed { line: 1, .. })));
    }

    #[test]
    fn rejects_bad_edges_and_inner_ids() {
        assert_eq!(parse_graph("inner: 1 2\nedge: 1 2\nedge: 1 2"), Err(GraphError::DuplicateEdge(1, 2)));
        assert_eq!(parse_graph("inner: 1 2\nedge: 2 2"), Err(GraphError::SelfLoop(2)));
        assert_eq!(
            parse_graph("n: 3\ninner: 1 4\nedge: 1 2"),
            Err(GraphError::InnerOutOfRange { vertex: 4, n: 3 })
        );
        assert!(matches!(parse_graph("n: 3\ninner: 1 2\nedge: 1 7"), Err(GraphError::Malformed { line: 3, .. })));
        assert!(matches!(parse_graph("inner: 1 2\ninner: 3"), Err(GraphError::Malformed { line: 2, .. })));
    }

    #[test]
    fn out_neighbors_are_checked_and_sorted() {
        let g = parse_graph("inner: 1 2\nedge: 1 4\nedge: 1 3\nedge: 3 2\nedge: 4 2").unwrap();
        assert_eq!(g.out_neighbors(1).unwrap().iter().copied().collect::<Vec<_>>(), vec![3, 4]);
        assert!(g.out_neighbors(2).unwrap().is_empty());
        assert_eq!(g.out_neighbors(0), Err(GraphError::VertexOutOfRange { vertex: 0, n: 4 }));
        assert!(g.out_neighbors(5).is_err());
        assert_eq!(g.inc(2).iter().copied().collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    fn json_is_canonical() {
        let g = parse_graph("inner: 2 1\nedge: 2 1\nedge: 1 3\nedge: 3 2").unwrap();
        assert_eq!(g.to_json(), r#"{"n":3,"inner":[1,2],"edges":[[1,3],[2,1],[3,2]]}"#);
        assert_eq!(SideInfoGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn message_vectors_need_uniform_nonempty_entries() {
        assert_eq!(MessageVector::new(vec![]), Err(MessageError::Empty));
        assert_eq!(MessageVector::new(vec![vec![]]), Err(MessageError::Empty));
        assert_eq!(
            MessageVector::new(vec![vec![1, 2], vec![3]]),
            Err(MessageError::LengthMismatch { vertex: 2, expected: 2, found: 1 })
        );
        let m = MessageVector::new(vec![vec![1], vec![2], vec![4]]).unwrap();
        assert_eq!(m.get(3), &[4]);
        let g = parse_graph("inner: 1 2\nedge: 1 2").unwrap();
        assert_eq!(m.check_for(&g), Err(MessageError::WrongCount { expected: 2, found: 3 }));
    }

    #[test]
    fn xor_of_bytes() {
        let mut a = vec![0x01, 0xff];
        xor_into(&mut a, &[0x02, 0x0f]);
        xor_into(&mut a, &[0x04, 0x00]);
        assert_eq!(a, vec![0x07, 0xf0]);
    }
}
