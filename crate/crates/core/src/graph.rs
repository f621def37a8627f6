//! Resolution graphs (plumbing trees): parsing, validation, blow-ups and
//! serialization.
//!
//! Vertex ids are user-chosen and preserved everywhere; internal matrix
//! indices always follow ascending id order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice;

pub type VertexId = u64;

/// Largest magnitude that JSON numbers carry exactly.
const JSON_SAFE: u64 = 1 << 53;

/// A weighted tree of exceptional curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionGraph {
    weights: BTreeMap<VertexId, i64>,
    edges: Vec<(VertexId, VertexId)>,
    root: Option<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphDiagnostics {
    pub is_tree: bool,
    pub is_negative_definite: bool,
    pub leaf_ids: Vec<VertexId>,
    pub node_ids: Vec<VertexId>,
    pub messages: Vec<String>,
}

impl GraphDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.is_tree && self.is_negative_definite && self.messages.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

fn norm(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ResolutionGraph {
    /// Builds a graph from parts, checking id references only.
    pub fn new(
        vertices: impl IntoIterator<Item = (VertexId, i64)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
        root: Option<VertexId>,
    ) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (id, w) in vertices {
            if weights.insert(id, w).is_some() {
                return Err(Error::DuplicateVertex(id));
            }
        }
        let mut es = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if !weights.contains_key(&v) {
                    return Err(Error::UnknownVertex(v));
                }
            }
            es.push(norm(a, b));
        }
        es.sort_unstable();
        if let Some(r) = root {
            if !weights.contains_key(&r) {
                return Err(Error::UnknownRoot(r));
            }
        }
        Ok(Self {
            weights,
            edges: es,
            root,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn root(&self) -> Option<VertexId> {
        self.root
    }

    pub fn with_root(&self, root: Option<VertexId>) -> Result<Self> {
        if let Some(r) = root {
            if !self.contains(r) {
                return Err(Error::UnknownRoot(r));
            }
        }
        Ok(Self {
            root,
            ..self.clone()
        })
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.weights.contains_key(&id)
    }

    /// Vertex ids in ascending order; this is the matrix index order.
    pub fn vertex_ids(&self) -> Vec<VertexId> {
        self.weights.keys().copied().collect()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, i64)> + '_ {
        self.weights.iter().map(|(&k, &v)| (k, v))
    }

    pub fn weight(&self, id: VertexId) -> Option<i64> {
        self.weights.get(&id).copied()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.binary_search(&norm(a, b)).is_ok()
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.weights.keys().position(|&k| k == id)
    }

    pub fn index_map(&self) -> BTreeMap<VertexId, usize> {
        self.weights.keys().enumerate().map(|(i, &k)| (k, i)).collect()
    }

    pub fn neighbors(&self, id: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == id {
                    Some(b)
                } else if b == id {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn valency(&self, id: VertexId) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == id) + usize::from(b == id))
            .sum()
    }

    /// Valency-1 vertices; a lone vertex also counts as a leaf.
    pub fn leaves(&self) -> Vec<VertexId> {
        if self.len() == 1 {
            return self.vertex_ids();
        }
        self.weights
            .keys()
            .copied()
            .filter(|&v| self.valency(v) == 1)
            .collect()
    }

    /// Vertices of valency at least three.
    pub fn nodes(&self) -> Vec<VertexId> {
        self.weights
            .keys()
            .copied()
            .filter(|&v| self.valency(v) >= 3)
            .collect()
    }

    pub fn is_leaf(&self, id: VertexId) -> bool {
        self.contains(id) && (self.len() == 1 || self.valency(id) == 1)
    }

    pub fn is_node(&self, id: VertexId) -> bool {
        self.valency(id) >= 3
    }

    /// A graph without nodes (a chain or a lone vertex).
    pub fn is_string(&self) -> bool {
        self.nodes().is_empty()
    }

    pub fn is_tree(&self) -> bool {
        if self.is_empty() || self.edges.len() + 1 != self.len() {
            return false;
        }
        if self.edges.iter().any(|&(a, b)| a == b) {
            return false;
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([*self.weights.keys().next().unwrap()]);
        while let Some(v) = queue.pop_front() {
            if seen.insert(v) {
                queue.extend(self.neighbors(v).into_iter().filter(|n| !seen.contains(n)));
            }
        }
        seen.len() == self.len()
    }

    /// Vertices on the unique path from `a` to `b`, inclusive.
    pub fn path(&self, a: VertexId, b: VertexId) -> Option<Vec<VertexId>> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut queue = VecDeque::from([a]);
        parent.insert(a, a);
        while let Some(v) = queue.pop_front() {
            if v == b {
                break;
            }
            for n in self.neighbors(v) {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(n) {
                    e.insert(v);
                    queue.push_back(n);
                }
            }
        }
        if !parent.contains_key(&b) {
            return None;
        }
        let mut out = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[&cur];
            out.push(cur);
        }
        out.reverse();
        Some(out)
    }

    /// Vertices reachable from `start` without passing through `blocked`.
    pub fn component_from(&self, start: VertexId, blocked: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            if blocked.contains(&v) || !seen.insert(v) {
                continue;
            }
            for n in self.neighbors(v) {
                if !seen.contains(&n) && !blocked.contains(&n) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// The branch of the tree hanging off `v` through its neighbour `toward`.
    pub fn branch(&self, v: VertexId, toward: VertexId) -> BTreeSet<VertexId> {
        self.component_from(toward, &BTreeSet::from([v]))
    }

    /// Induced subgraph on `ids` (no root).
    pub fn induced(&self, ids: &BTreeSet<VertexId>) -> ResolutionGraph {
        let weights = self
            .weights
            .iter()
            .filter(|(k, _)| ids.contains(k))
            .map(|(&k, &v)| (k, v))
            .collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| ids.contains(a) && ids.contains(b))
            .collect();
        ResolutionGraph {
            weights,
            edges,
            root: None,
        }
    }

    pub fn validate(&self) -> GraphDiagnostics {
        validate(self)
    }

    /// Errors unless the graph is a negative definite tree with negative weights.
    pub fn require_valid(&self) -> Result<()> {
        let d = self.validate();
        if !d.is_tree {
            return Err(Error::InvalidGraph("edge set is not a tree".into()));
        }
        if let Some(m) = d.messages.first() {
            if d.is_negative_definite {
                return Err(Error::InvalidGraph(m.clone()));
            }
        }
        if !d.is_negative_definite {
            return Err(Error::NotNegativeDefinite);
        }
        Ok(())
    }

    fn next_id(&self) -> VertexId {
        self.weights.keys().next_back().map_or(1, |m| m + 1)
    }
}

/// Parses the line-oriented graph format.
pub fn parse_graph(text: &str) -> Result<ResolutionGraph> {
    let mut vertices: Vec<(VertexId, i64, usize, usize)> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId, usize, usize)> = Vec::new();
    let mut root: Option<(VertexId, usize, usize)> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(&(kw_col, kw)) = tokens.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| Error::Syntax {
            line: line_no,
            column,
            message,
        };
        let expect = |n: usize| -> Result<()> {
            if tokens.len() != n + 1 {
                let col = tokens.get(n + 1).map_or(content.trim_end().len() + 1, |t| t.0);
                return Err(syntax(
                    col,
                    format!("`{kw}` takes {n} argument(s), found {}", tokens.len() - 1),
                ));
            }
            Ok(())
        };
        let id_at = |i: usize| -> Result<VertexId> {
            let (col, tok) = tokens[i];
            tok.parse::<VertexId>()
                .map_err(|_| syntax(col, format!("expected a vertex id, found `{tok}`")))
        };
        match kw {
            "vertex" => {
                expect(2)?;
                let id = id_at(1)?;
                let (col, tok) = tokens[2];
                let w = tok
                    .parse::<i64>()
                    .map_err(|_| syntax(col, format!("expected an integer weight, found `{tok}`")))?;
                vertices.push((id, w, line_no, tokens[1].0));
            }
            "edge" => {
                expect(2)?;
                edges.push((id_at(1)?, id_at(2)?, line_no, tokens[1].0));
            }
            "root" => {
                expect(1)?;
                if root.is_some() {
                    return Err(syntax(kw_col, "root declared twice".into()));
                }
                root = Some((id_at(1)?, line_no, tokens[1].0));
            }
            other => return Err(syntax(kw_col, format!("unknown keyword `{other}`"))),
        }
    }

    let mut seen = BTreeSet::new();
    for &(id, ..) in &vertices {
        if !seen.insert(id) {
            return Err(Error::DuplicateVertex(id));
        }
    }
    for &(a, b, ..) in &edges {
        for v in [a, b] {
            if !seen.contains(&v) {
                return Err(Error::UnknownVertex(v));
            }
        }
    }
    if let Some((r, ..)) = root {
        if !seen.contains(&r) {
            return Err(Error::UnknownRoot(r));
        }
    }
    ResolutionGraph::new(
        vertices.into_iter().map(|(id, w, ..)| (id, w)),
        edges.into_iter().map(|(a, b, ..)| (a, b)),
        root.map(|r| r.0),
    )
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Parses the JSON mirror of the text format.
pub fn parse_graph_json(text: &str) -> Result<ResolutionGraph> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let int = |x: &Value| -> Result<i128> {
        match x {
            Value::Number(n) => n
                .as_i64()
                .map(i128::from)
                .or_else(|| n.as_u64().map(i128::from))
                .ok_or_else(|| Error::Json(format!("non-integer number {n}"))),
            Value::String(s) => s
                .parse::<i128>()
                .map_err(|_| Error::Json(format!("expected integer string, found {s:?}"))),
            other => Err(Error::Json(format!("expected integer, found {other}"))),
        }
    };
    let id = |x: &Value| -> Result<VertexId> {
        VertexId::try_from(int(x)?).map_err(|_| Error::Json("vertex id out of range".into()))
    };
    let verts = v
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Json("missing \"vertices\" array".into()))?;
    let mut vertices = Vec::new();
    for item in verts {
        let vid = id(item.get("id").ok_or_else(|| Error::Json("vertex without id".into()))?)?;
        let w = int(item
            .get("weight")
            .ok_or_else(|| Error::Json("vertex without weight".into()))?)?;
        let w = i64::try_from(w).map_err(|_| Error::Json("weight out of range".into()))?;
        vertices.push((vid, w));
    }
    let mut edges = Vec::new();
    if let Some(es) = v.get("edges") {
        let es = es
            .as_array()
            .ok_or_else(|| Error::Json("\"edges\" must be an array".into()))?;
        for e in es {
            match e.as_array().map(Vec::as_slice) {
                Some([a, b]) => edges.push((id(a)?, id(b)?)),
                _ => return Err(Error::Json(format!("malformed edge {e}"))),
            }
        }
    }
    let root = match v.get("root") {
        None | Some(Value::Null) => None,
        Some(r) => Some(id(r)?),
    };
    ResolutionGraph::new(vertices, edges, root)
}

/// Reads either format, sniffing a leading `{` for JSON.
pub fn parse_any(text: &str) -> Result<ResolutionGraph> {
    if text.trim_start().starts_with('{') {
        parse_graph_json(text)
    } else {
        parse_graph(text)
    }
}

pub fn validate(g: &ResolutionGraph) -> GraphDiagnostics {
    let mut messages = Vec::new();
    let is_tree = g.is_tree();
    if !is_tree {
        messages.push(format!(
            "not a tree: {} vertices, {} edges",
            g.len(),
            g.edges.len()
        ));
    }
    for (id, w) in g.vertices() {
        if w >= 0 {
            messages.push(format!("vertex {id} has non-negative weight {w}"));
        }
    }
    let mut dedup = g.edges.clone();
    dedup.dedup();
    if dedup.len() != g.edges.len() {
        messages.push("repeated edge".into());
    }
    if let Some(&(a, _)) = g.edges.iter().find(|(a, b)| a == b) {
        messages.push(format!("self-loop at vertex {a}"));
    }
    if let Some(r) = g.root {
        if !g.is_leaf(r) {
            messages.push(format!("root {r} is not a leaf"));
        }
    }
    let is_negative_definite = !g.is_empty()
        && lattice::is_negative_definite(&lattice::intersection_matrix::<num_bigint::BigInt>(g))
            .unwrap_or(false);
    if !is_negative_definite {
        messages.push("intersection matrix is not negative definite".into());
    }
    GraphDiagnostics {
        is_tree,
        is_negative_definite,
        leaf_ids: g.leaves(),
        node_ids: g.nodes(),
        messages,
    }
}

/// Inserts a `-1` vertex on edge `e`, lowering both endpoint weights by one.
pub fn blow_up_edge(g: &ResolutionGraph, e: (VertexId, VertexId)) -> Result<ResolutionGraph> {
    let (a, b) = norm(e.0, e.1);
    let pos = g
        .edges
        .binary_search(&(a, b))
        .map_err(|_| Error::MissingEdge(e.0, e.1))?;
    let mut out = g.clone();
    let new = g.next_id();
    out.edges.remove(pos);
    out.edges.push((a, new));
    out.edges.push((b, new));
    out.edges.sort_unstable();
    *out.weights.get_mut(&a).unwrap() -= 1;
    *out.weights.get_mut(&b).unwrap() -= 1;
    out.weights.insert(new, -1);
    Ok(out)
}

/// Blows up every node-node edge so that no two nodes are adjacent.
pub fn separate_nodes(g: &ResolutionGraph) -> ResolutionGraph {
    let nodes: BTreeSet<VertexId> = g.nodes().into_iter().collect();
    let adjacent: Vec<(VertexId, VertexId)> = g
        .edges
        .iter()
        .copied()
        .filter(|(a, b)| nodes.contains(a) && nodes.contains(b))
        .collect();
    // Blow-ups keep endpoint valencies, so one pass suffices.
    adjacent
        .into_iter()
        .fold(g.clone(), |acc, e| blow_up_edge(&acc, e).expect("edge present"))
}

pub fn has_adjacent_nodes(g: &ResolutionGraph) -> bool {
    g.edges
        .iter()
        .any(|&(a, b)| g.is_node(a) && g.is_node(b))
}

pub fn serialize(g: &ResolutionGraph, format: Format) -> String {
    match format {
        Format::Text => to_text(g),
        Format::Json => serde_json::to_string_pretty(&to_json(g)).expect("json value"),
    }
}

pub fn to_text(g: &ResolutionGraph) -> String {
    let mut s = String::new();
    for (id, w) in g.vertices() {
        let _ = writeln!(s, "vertex {id} {w}");
    }
    for (a, b) in &g.edges {
        let _ = writeln!(s, "edge {a} {b}");
    }
    if let Some(r) = g.root {
        let _ = writeln!(s, "root {r}");
    }
    s
}

/// JSON number, or decimal string beyond the exactly representable range.
pub fn json_int(v: i128) -> Value {
    if v.unsigned_abs() >= u128::from(JSON_SAFE) {
        Value::String(v.to_string())
    } else {
        json!(v as i64)
    }
}

pub fn to_json(g: &ResolutionGraph) -> Value {
    let vertices: Vec<Value> = g
        .vertices()
        .map(|(id, w)| json!({"id": json_int(id.into()), "weight": json_int(w.into())}))
        .collect();
    let edges: Vec<Value> = g
        .edges
        .iter()
        .map(|&(a, b)| json!([json_int(a.into()), json_int(b.into())]))
        .collect();
    let mut obj = json!({"vertices": vertices, "edges": edges});
    if let Some(r) = g.root {
        obj["root"] = json_int(r.into());
    }
    obj
}
