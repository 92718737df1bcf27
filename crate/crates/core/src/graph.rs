//! Metrized multigraphs, divisors on their vertices, and the combinatorial
//! operations used throughout: contraction, restriction, one-point sums,
//! irreducible (block) decomposition and edge subdivision.
//!
//! Vertex and edge ids are opaque strings. Vertices are kept sorted and edges
//! are kept sorted by id, so every derived structure is deterministic.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Image of every vertex under a contraction.
pub type VertexMap = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub u: String,
    pub v: String,
    pub length: Rational,
}

impl Edge {
    pub fn new(id: impl Into<String>, u: impl Into<String>, v: impl Into<String>, length: Rational) -> Self {
        Edge {
            id: id.into(),
            u: u.into(),
            v: v.into(),
            length,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn touches(&self, x: &str) -> bool {
        self.u == x || self.v == x
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphIssue {
    Empty,
    DuplicateVertex(String),
    DuplicateEdge(String),
    UnknownEndpoint { edge: String, vertex: String },
    NonpositiveLength(String),
    SelfLoop(String),
    Disconnected,
}

impl fmt::Display for GraphIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphIssue::Empty => write!(f, "graph has no vertices"),
            GraphIssue::DuplicateVertex(v) => write!(f, "duplicate vertex id {v:?}"),
            GraphIssue::DuplicateEdge(e) => write!(f, "duplicate edge id {e:?}"),
            GraphIssue::UnknownEndpoint { edge, vertex } => {
                write!(f, "edge {edge:?} references unknown vertex {vertex:?}")
            }
            GraphIssue::NonpositiveLength(e) => write!(f, "nonpositive length on edge {e:?}"),
            GraphIssue::SelfLoop(e) => write!(f, "self-loop on edge {e:?}"),
            GraphIssue::Disconnected => write!(f, "graph is not connected"),
        }
    }
}

/// Outcome of [`validate_graph`]; valid when `issues` is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub connected: bool,
    pub issues: Vec<GraphIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(GraphIssue),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("id {0:?} occurs in both summands of a one-point sum")]
    IdCollision(String),
    #[error("subdivision point must lie strictly inside edge {edge:?}")]
    SubdivisionOutOfRange { edge: String },
    #[error("graph is not connected")]
    Disconnected,
}

/// Checks a raw graph description without building it.
pub fn validate_graph(vertices: &[String], edges: &[Edge]) -> ValidationReport {
    let mut issues = Vec::new();
    if vertices.is_empty() {
        issues.push(GraphIssue::Empty);
    }
    let mut index = BTreeMap::new();
    for v in vertices {
        if index.contains_key(v) {
            issues.push(GraphIssue::DuplicateVertex(v.clone()));
        } else {
            let next = index.len();
            index.insert(v.clone(), next);
        }
    }
    let mut seen_edges = BTreeSet::new();
    let mut uf = UnionFind::new(index.len());
    for e in edges {
        if !seen_edges.insert(e.id.as_str()) {
            issues.push(GraphIssue::DuplicateEdge(e.id.clone()));
        }
        if !e.length.is_positive() {
            issues.push(GraphIssue::NonpositiveLength(e.id.clone()));
        }
        if e.is_loop() {
            issues.push(GraphIssue::SelfLoop(e.id.clone()));
        }
        let mut ok = true;
        for x in [&e.u, &e.v] {
            if !index.contains_key(x) {
                issues.push(GraphIssue::UnknownEndpoint {
                    edge: e.id.clone(),
                    vertex: x.clone(),
                });
                ok = false;
            }
        }
        if ok {
            uf.union(index[&e.u], index[&e.v]);
        }
    }
    let connected = uf.components() <= 1;
    if !connected {
        issues.push(GraphIssue::Disconnected);
    }
    ValidationReport {
        vertex_count: vertices.len(),
        edge_count: edges.len(),
        connected,
        issues,
    }
}

/// A finite connected multigraph with positive rational edge lengths.
///
/// Graphs built with [`MetrizedGraph::new`] never contain self-loops. Loops
/// only appear through [`MetrizedGraph::new_with_loops`] (dual graphs of
/// curves) or as markers left behind by [`contract`]; the analytic code
/// refuses them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetrizedGraph {
    vertices: Vec<String>,
    vertex_index: BTreeMap<String, usize>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<String, usize>,
    ends: Vec<(usize, usize)>,
}

impl MetrizedGraph {
    pub fn new<V: Into<String>>(vertices: impl IntoIterator<Item = V>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        Self::build(vertices.into_iter().map(Into::into).collect(), edges, false)
    }

    /// Like [`MetrizedGraph::new`] but self-loops are accepted.
    pub fn new_with_loops<V: Into<String>>(
        vertices: impl IntoIterator<Item = V>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        Self::build(vertices.into_iter().map(Into::into).collect(), edges, true)
    }

    /// The one-point graph.
    pub fn point(v: impl Into<String>) -> Self {
        Self::new([v.into()], Vec::new()).expect("one-point graph is valid")
    }

    fn build(mut vertices: Vec<String>, mut edges: Vec<Edge>, loops: bool) -> Result<Self, GraphError> {
        let report = validate_graph(&vertices, &edges);
        if let Some(issue) = report.issues.into_iter().find(|i| {
            loops
                .then_some(())
                .map_or(true, |_| !matches!(i, GraphIssue::SelfLoop(_)))
        }) {
            return Err(GraphError::Invalid(issue));
        }
        vertices.sort();
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        let vertex_index: BTreeMap<String, usize> = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let edge_index = edges.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        let ends = edges.iter().map(|e| (vertex_index[&e.u], vertex_index[&e.v])).collect();
        Ok(MetrizedGraph {
            vertices,
            vertex_index,
            edges,
            edge_index,
            ends,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertex_index.contains_key(v)
    }

    pub fn vertex_position(&self, v: &str) -> Option<usize> {
        self.vertex_index.get(v).copied()
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edge_index.get(id).map(|&i| &self.edges[i])
    }

    pub fn edge_position(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// Endpoint positions of the `i`-th edge.
    pub fn edge_ends(&self, i: usize) -> (usize, usize) {
        self.ends[i]
    }

    pub fn require_vertex(&self, v: &str) -> Result<usize, GraphError> {
        self.vertex_position(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
    }

    pub fn require_edge(&self, e: &str) -> Result<usize, GraphError> {
        self.edge_position(e)
            .ok_or_else(|| GraphError::UnknownEdge(e.to_string()))
    }

    /// Number of edge-ends at `v`; a loop counts twice.
    pub fn valence(&self, v: &str) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.u == v) + usize::from(e.v == v))
            .sum()
    }

    /// Positions of the edges touching vertex position `x`.
    pub fn incident(&self, x: usize) -> Vec<usize> {
        self.ends
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == x || b == x)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn loops(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.is_loop())
    }

    pub fn has_loops(&self) -> bool {
        self.loops().next().is_some()
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| &e.length).sum()
    }

    /// First Betti number `#E - #V + 1`.
    pub fn betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn report(&self) -> ValidationReport {
        validate_graph(&self.vertices, &self.edges)
    }

    /// Connected components after removing the edges flagged in `removed`,
    /// as sorted lists of vertex positions, ordered by smallest member.
    pub fn components_without(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.vertices.len());
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if !removed.get(i).copied().unwrap_or(false) {
                uf.union(a, b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.vertices.len() {
            groups.entry(uf.find(x)).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Whether removing the given edge disconnects the graph.
    pub fn is_bridge(&self, i: usize) -> bool {
        let mut removed = vec![false; self.edges.len()];
        removed[i] = true;
        self.components_without(&removed).len() > 1
    }

    /// Copy with every vertex and edge id prefixed, for building disjoint
    /// summands.
    pub fn with_prefix(&self, prefix: &str) -> MetrizedGraph {
        let vertices: Vec<String> = self.vertices.iter().map(|v| format!("{prefix}{v}")).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Edge::new(
                    format!("{prefix}{}", e.id),
                    format!("{prefix}{}", e.u),
                    format!("{prefix}{}", e.v),
                    e.length.clone(),
                )
            })
            .collect();
        Self::build(vertices, edges, true).expect("prefixing preserves validity")
    }

    /// Same graph with edge lengths replaced through `f`.
    pub fn with_lengths(&self, mut f: impl FnMut(&Edge) -> Rational) -> Result<MetrizedGraph, GraphError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.id.clone(), e.u.clone(), e.v.clone(), f(e)))
            .collect();
        Self::build(self.vertices.clone(), edges, self.has_loops())
    }
}

/// Rational-coefficient divisor supported on vertices. Zero coefficients are
/// not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Divisor {
    coefficients: BTreeMap<String, Rational>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::default()
    }

    pub fn from_pairs<K: Into<String>>(pairs: impl IntoIterator<Item = (K, Rational)>) -> Self {
        let mut d = Divisor::zero();
        for (k, c) in pairs {
            d.add(k, &c);
        }
        d
    }

    pub fn coefficient(&self, v: &str) -> Rational {
        self.coefficients.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&mut self, v: impl Into<String>, c: &Rational) {
        let v = v.into();
        let entry = self.coefficients.entry(v.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coefficients.remove(&v);
        }
    }

    pub fn set(&mut self, v: impl Into<String>, c: Rational) {
        let v = v.into();
        if c.is_zero() {
            self.coefficients.remove(&v);
        } else {
            self.coefficients.insert(v, c);
        }
    }

    pub fn degree(&self) -> Rational {
        self.coefficients.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.coefficients.iter()
    }

    /// Errors with the first support vertex missing from `g`.
    pub fn check_supported(&self, g: &MetrizedGraph) -> Result<(), GraphError> {
        match self.coefficients.keys().find(|v| !g.has_vertex(v)) {
            Some(v) => Err(GraphError::UnknownVertex(v.clone())),
            None => Ok(()),
        }
    }
}

/// Canonical divisor of the graph: `(valence(v) - 2) v` at every vertex.
pub fn graph_canonical_divisor(g: &MetrizedGraph) -> Divisor {
    Divisor::from_pairs(g.vertices().iter().map(|v| {
        let k = g.valence(v) as i64 - 2;
        (v.clone(), Rational::from_integer(k.into()))
    }))
}

/// Result of a contraction: the new graph and where each old vertex went.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub graph: MetrizedGraph,
    pub vertex_map: VertexMap,
}

/// Collapses every edge in `s`. A merged vertex is named by its smallest
/// member id. Surviving edges keep ids and lengths; an edge whose endpoints
/// merge stays behind as a loop marker.
pub fn contract<'a>(g: &MetrizedGraph, s: impl IntoIterator<Item = &'a str>) -> Result<Contraction, GraphError> {
    let mut collapse = vec![false; g.edge_count()];
    for id in s {
        collapse[g.require_edge(id)?] = true;
    }
    let mut uf = UnionFind::new(g.vertex_count());
    for (i, &(a, b)) in g.ends.iter().enumerate() {
        if collapse[i] {
            uf.union(a, b);
        }
    }
    // vertices are sorted, so the first member seen is the smallest id
    let mut rep_name: BTreeMap<usize, String> = BTreeMap::new();
    let mut vertex_map = VertexMap::new();
    for (x, name) in g.vertices.iter().enumerate() {
        let root = uf.find(x);
        let target = rep_name.entry(root).or_insert_with(|| name.clone()).clone();
        vertex_map.insert(name.clone(), target);
    }
    let vertices: Vec<String> = rep_name.into_values().collect();
    let edges = g
        .edges
        .iter()
        .zip(&collapse)
        .filter(|(_, &c)| !c)
        .map(|(e, _)| {
            Edge::new(
                e.id.clone(),
                vertex_map[&e.u].clone(),
                vertex_map[&e.v].clone(),
                e.length.clone(),
            )
        })
        .collect();
    let graph = MetrizedGraph::new_with_loops(vertices, edges)?;
    Ok(Contraction { graph, vertex_map })
}

/// Contracts every edge *not* in `s`.
pub fn restrict<'a>(g: &MetrizedGraph, s: impl IntoIterator<Item = &'a str>) -> Result<Contraction, GraphError> {
    let keep: BTreeSet<&str> = s.into_iter().collect();
    for id in &keep {
        g.require_edge(id)?;
    }
    let complement: Vec<&str> = g
        .edges
        .iter()
        .map(|e| e.id.as_str())
        .filter(|id| !keep.contains(id))
        .collect();
    contract(g, complement)
}

/// Pushes a divisor forward along a vertex surjection, summing the
/// coefficients of every fibre. Degree is preserved.
pub fn push_divisor(d: &Divisor, map: &VertexMap) -> Result<Divisor, GraphError> {
    let mut out = Divisor::zero();
    for (v, c) in d.iter() {
        let image = map.get(v).ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
        out.add(image.clone(), c);
    }
    Ok(out)
}

/// Glues `g2` onto `g1` by identifying `v2` with `v1`; the joint keeps the
/// name `v1`. All other ids must be distinct between the summands.
pub fn one_point_sum(g1: &MetrizedGraph, v1: &str, g2: &MetrizedGraph, v2: &str) -> Result<MetrizedGraph, GraphError> {
    g1.require_vertex(v1)?;
    g2.require_vertex(v2)?;
    let rename = |x: &String| if x == v2 { v1.to_string() } else { x.clone() };
    let mut vertices = g1.vertices.clone();
    for x in &g2.vertices {
        if x == v2 {
            continue;
        }
        if g1.has_vertex(x) {
            return Err(GraphError::IdCollision(x.clone()));
        }
        vertices.push(x.clone());
    }
    let mut edges = g1.edges.clone();
    for e in &g2.edges {
        if g1.edge(&e.id).is_some() {
            return Err(GraphError::IdCollision(e.id.clone()));
        }
        edges.push(Edge::new(e.id.clone(), rename(&e.u), rename(&e.v), e.length.clone()));
    }
    MetrizedGraph::build(vertices, edges, g1.has_loops() || g2.has_loops())
}

/// Irreducible components (blocks) of a connected graph.
///
/// Parallel edges stay in one block, each bridge and each loop is a block of
/// its own. Components come out ordered by their smallest vertex id, ties
/// broken by their sorted edge ids. The one-point graph has no components.
pub fn irreducible_decomposition(g: &MetrizedGraph) -> Result<Vec<MetrizedGraph>, GraphError> {
    if !g.report().connected {
        return Err(GraphError::Disconnected);
    }
    let blocks = block_edge_sets(g);
    let mut keyed: Vec<((String, Vec<String>), MetrizedGraph)> = blocks
        .into_iter()
        .map(|edge_ids| {
            let edges: Vec<Edge> = edge_ids.iter().map(|&i| g.edges[i].clone()).collect();
            let verts: BTreeSet<String> = edges.iter().flat_map(|e| [e.u.clone(), e.v.clone()]).collect();
            let key_v = verts.iter().next().cloned().unwrap_or_default();
            let mut key_e: Vec<String> = edges.iter().map(|e| e.id.clone()).collect();
            key_e.sort();
            let sub = MetrizedGraph::build(verts.into_iter().collect(), edges, true)
                .expect("blocks of a valid graph are valid");
            ((key_v, key_e), sub)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, sub)| sub).collect())
}

/// Edge positions of each block (biconnected component).
pub(crate) fn block_edge_sets(g: &MetrizedGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut blocks = Vec::new();
    for (i, &(a, b)) in g.ends.iter().enumerate() {
        if a == b {
            blocks.push(vec![i]);
            continue;
        }
        adjacency[a].push((b, i));
        adjacency[b].push((a, i));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0usize;
    let mut edge_stack: Vec<usize> = Vec::new();
    // iterative DFS: (vertex, parent edge, next adjacency slot)
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        while let Some(&mut (x, parent_edge, ref mut slot)) = stack.last_mut() {
            if *slot < adjacency[x].len() {
                let (y, e) = adjacency[x][*slot];
                *slot += 1;
                if Some(e) == parent_edge {
                    continue;
                }
                if disc[y] == usize::MAX {
                    edge_stack.push(e);
                    disc[y] = time;
                    low[y] = time;
                    time += 1;
                    stack.push((y, Some(e), 0));
                } else if disc[y] < disc[x] {
                    edge_stack.push(e);
                    low[x] = low[x].min(disc[y]);
                }
            } else {
                stack.pop();
                if let (Some(&(p, _, _)), Some(pe)) = (stack.last(), parent_edge) {
                    low[p] = low[p].min(low[x]);
                    if low[x] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push(e);
                            if e == pe {
                                break;
                            }
                        }
                        block.sort_unstable();
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}

/// Result of [`subdivide_edge`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub graph: MetrizedGraph,
    /// The new degree-2 vertex.
    pub vertex: String,
    /// Piece of length `t`, from the edge's first endpoint.
    pub first: String,
    /// Remaining piece, ending at the edge's second endpoint.
    pub second: String,
}

/// Splits edge `e` at distance `t` from its first endpoint through a fresh
/// vertex. The underlying metric space is unchanged.
pub fn subdivide_edge(g: &MetrizedGraph, e: &str, t: &Rational) -> Result<Subdivision, GraphError> {
    let idx = g.require_edge(e)?;
    let edge = &g.edges[idx];
    if !t.is_positive() || t >= &edge.length {
        return Err(GraphError::SubdivisionOutOfRange { edge: e.to_string() });
    }
    let fresh = |base: String, taken: &dyn Fn(&str) -> bool| {
        let mut name = base;
        while taken(&name) {
            name.push('\'');
        }
        name
    };
    let vertex = fresh(format!("{e}~m"), &|s| g.has_vertex(s));
    let first = fresh(format!("{e}~a"), &|s| g.edge(s).is_some());
    let second = fresh(format!("{e}~b"), &|s| g.edge(s).is_some() || s == first);
    let mut vertices = g.vertices.clone();
    vertices.push(vertex.clone());
    let mut edges: Vec<Edge> = g.edges.iter().filter(|x| x.id != e).cloned().collect();
    edges.push(Edge::new(first.clone(), edge.u.clone(), vertex.clone(), t.clone()));
    edges.push(Edge::new(
        second.clone(),
        vertex.clone(),
        edge.v.clone(),
        &edge.length - t,
    ));
    let graph = MetrizedGraph::build(vertices, edges, g.has_loops())?;
    Ok(Subdivision {
        graph,
        vertex,
        first,
        second,
    })
}

/// Plain union-find over `0..n`.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}
