//! Hyperelliptic graphs: involutions, axiom validation, edge classes, size,
//! the weights `w`, and normalization of semistable-fiber dual graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::graph::{block_edge_sets, contract, push_divisor, Divisor, Edge, GraphError, MetrizedGraph, VertexMap};
use crate::rational::{int, min_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperellipticError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("malformed involution: {0}")]
    InvolutionMalformed(String),
    #[error("hyperelliptic axiom ({clause}) fails: {detail}")]
    AxiomViolation { clause: u8, detail: String },
    #[error("vertex {0:?} is fixed by the involution")]
    FixedVertex(String),
    #[error("unknown edge class {0:?}")]
    UnknownClass(String),
    #[error("edge classes must be closed under the involution")]
    NotInvolutionStable,
    #[error("restriction to class {0:?} is not the simple graph")]
    NotSimpleRestriction(String),
    #[error("divisor is not invariant under the involution")]
    DivisorNotInvariant,
    #[error("not a hyperelliptic configuration: {0}")]
    NotHyperellipticConfiguration(String),
}

/// An order-two symmetry of a graph, given on vertices and edges. Ids missing
/// from a map are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Involution {
    vertex_map: BTreeMap<String, String>,
    edge_map: BTreeMap<String, String>,
}

impl Involution {
    pub fn identity() -> Self {
        Involution::default()
    }

    /// Builds the involution from (possibly one-sided) swap lists; every pair
    /// is entered in both directions.
    pub fn from_swaps<'a>(
        vertices: impl IntoIterator<Item = (&'a str, &'a str)>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        let mut inv = Involution::identity();
        for (a, b) in vertices {
            inv.vertex_map.insert(a.to_string(), b.to_string());
            inv.vertex_map.insert(b.to_string(), a.to_string());
        }
        for (a, b) in edges {
            inv.edge_map.insert(a.to_string(), b.to_string());
            inv.edge_map.insert(b.to_string(), a.to_string());
        }
        inv
    }

    /// Raw maps as given; use [`Involution::check`] before trusting them.
    pub fn from_maps(vertex_map: BTreeMap<String, String>, edge_map: BTreeMap<String, String>) -> Self {
        let mut inv = Involution { vertex_map, edge_map };
        inv.vertex_map.retain(|k, v| k != v);
        inv.edge_map.retain(|k, v| k != v);
        inv
    }

    pub fn vertex<'a>(&'a self, v: &'a str) -> &'a str {
        self.vertex_map.get(v).map_or(v, String::as_str)
    }

    pub fn edge<'a>(&'a self, e: &'a str) -> &'a str {
        self.edge_map.get(e).map_or(e, String::as_str)
    }

    /// Non-trivial vertex assignments.
    pub fn vertex_map(&self) -> &BTreeMap<String, String> {
        &self.vertex_map
    }

    /// Non-trivial edge assignments.
    pub fn edge_map(&self) -> &BTreeMap<String, String> {
        &self.edge_map
    }

    /// Checks that the maps only mention ids of `g`, square to the identity,
    /// respect incidences and preserve lengths.
    pub fn check(&self, g: &MetrizedGraph) -> Result<(), HyperellipticError> {
        let bad = |m: String| Err(HyperellipticError::InvolutionMalformed(m));
        for (a, b) in &self.vertex_map {
            if !g.has_vertex(a) || !g.has_vertex(b) {
                return bad(format!("vertex pair {a:?} -> {b:?} is not in the graph"));
            }
            if self.vertex(b) != a {
                return bad(format!("vertex map does not square to the identity at {a:?}"));
            }
        }
        for (a, b) in &self.edge_map {
            if g.edge(a).is_none() || g.edge(b).is_none() {
                return bad(format!("edge pair {a:?} -> {b:?} is not in the graph"));
            }
            if self.edge(b) != a {
                return bad(format!("edge map does not square to the identity at {a:?}"));
            }
        }
        for e in g.edges() {
            let image = g.edge(self.edge(&e.id)).expect("checked above");
            let mut ends = [self.vertex(&e.u), self.vertex(&e.v)];
            let mut target = [image.u.as_str(), image.v.as_str()];
            ends.sort_unstable();
            target.sort_unstable();
            if ends != target {
                return bad(format!(
                    "edge {:?} is not mapped onto an edge with the image endpoints",
                    e.id
                ));
            }
            if image.length != e.length {
                return bad(format!("edge {:?} and its image have different lengths", e.id));
            }
        }
        Ok(())
    }

    /// The involution induced on a contraction by an involution-stable edge
    /// set.
    pub fn transport(&self, contracted: &MetrizedGraph, map: &VertexMap) -> Result<Involution, HyperellipticError> {
        let mut vertex_map = BTreeMap::new();
        for (v, image) in map {
            let target = map
                .get(self.vertex(v))
                .ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
            if let Some(prev) = vertex_map.insert(image.clone(), target.clone()) {
                if &prev != target {
                    return Err(HyperellipticError::NotInvolutionStable);
                }
            }
        }
        let mut edge_map = BTreeMap::new();
        for e in contracted.edges() {
            let image = self.edge(&e.id);
            if contracted.edge(image).is_none() {
                return Err(HyperellipticError::NotInvolutionStable);
            }
            edge_map.insert(e.id.clone(), image.to_string());
        }
        Ok(Involution::from_maps(vertex_map, edge_map))
    }

    /// Whether `d` has the same coefficient at `v` and at its image.
    pub fn fixes_divisor(&self, d: &Divisor) -> bool {
        d.iter().all(|(v, a)| &d.coefficient(self.vertex(v)) == a)
    }
}

/// How an edge meets its image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Disjoint,
    OneJointed,
    TwoJointed,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Disjoint => "disjoint",
            EdgeKind::OneJointed => "one-jointed",
            EdgeKind::TwoJointed => "two-jointed",
        }
    }
}

/// Valence split of a non-fixed vertex by edge kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NuCounts {
    pub nu0: usize,
    pub nu1: usize,
    pub nu: usize,
}

/// A metrized graph with a validated hyperelliptic involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticGraph {
    graph: MetrizedGraph,
    involution: Involution,
    kinds: BTreeMap<String, EdgeKind>,
    classes: BTreeMap<String, Vec<String>>,
    class_of: BTreeMap<String, String>,
}

/// Checks the four hyperelliptic axioms and derives the edge structure.
pub fn validate_hyperelliptic(g: &MetrizedGraph, inv: &Involution) -> Result<HyperellipticGraph, HyperellipticError> {
    HyperellipticGraph::new(g.clone(), inv.clone())
}

impl HyperellipticGraph {
    pub fn new(graph: MetrizedGraph, involution: Involution) -> Result<Self, HyperellipticError> {
        involution.check(&graph)?;
        let axiom = |clause, detail: String| Err(HyperellipticError::AxiomViolation { clause, detail });
        if let Some(l) = graph.loops().next() {
            return axiom(1, format!("edge {:?} is a loop", l.id));
        }
        if let Some(e) = graph.edges().iter().find(|e| involution.edge(&e.id) == e.id) {
            return axiom(2, format!("edge {:?} is mapped to itself", e.id));
        }
        for v in graph.vertices() {
            if involution.vertex(v) != v && graph.valence(v) < 3 {
                return axiom(3, format!("non-fixed vertex {v:?} has fewer than three edges"));
            }
        }
        let orbit = |v: &str| -> String {
            let w = involution.vertex(v);
            if w < v {
                w.to_string()
            } else {
                v.to_string()
            }
        };
        let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut class_of = BTreeMap::new();
        for e in graph.edges() {
            let image = involution.edge(&e.id);
            let name = if image < e.id.as_str() { image } else { e.id.as_str() };
            classes.entry(name.to_string()).or_default().push(e.id.clone());
            class_of.insert(e.id.clone(), name.to_string());
        }
        let quotient_vertices: BTreeSet<String> = graph.vertices().iter().map(|v| orbit(v)).collect();
        let mut uf_index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, v) in quotient_vertices.iter().enumerate() {
            uf_index.insert(v, i);
        }
        let mut uf = crate::graph::UnionFind::new(quotient_vertices.len());
        for (name, members) in &classes {
            let e = graph.edge(&members[0]).expect("member of graph");
            let (a, b) = (orbit(&e.u), orbit(&e.v));
            if a == b {
                return axiom(4, format!("class {name:?} becomes a loop in the quotient"));
            }
            uf.union(uf_index[a.as_str()], uf_index[b.as_str()]);
        }
        if classes.len() + 1 != quotient_vertices.len() || uf.components() != 1 {
            return axiom(4, "the quotient is not a tree".to_string());
        }
        let kinds = graph
            .edges()
            .iter()
            .map(|e| {
                let image = [involution.vertex(&e.u), involution.vertex(&e.v)];
                let ends: BTreeSet<&str> = [e.u.as_str(), e.v.as_str()].into_iter().collect();
                let shared = ends.iter().filter(|x| image.contains(x)).count();
                let kind = match shared {
                    0 => EdgeKind::Disjoint,
                    1 => EdgeKind::OneJointed,
                    _ => EdgeKind::TwoJointed,
                };
                (e.id.clone(), kind)
            })
            .collect();
        for members in classes.values_mut() {
            members.sort();
        }
        Ok(HyperellipticGraph {
            graph,
            involution,
            kinds,
            classes,
            class_of,
        })
    }

    pub fn graph(&self) -> &MetrizedGraph {
        &self.graph
    }

    pub fn involution(&self) -> &Involution {
        &self.involution
    }

    pub fn is_fixed(&self, v: &str) -> bool {
        self.involution.vertex(v) == v
    }

    pub fn fixed_vertices(&self) -> Vec<&str> {
        self.graph
            .vertices()
            .iter()
            .map(String::as_str)
            .filter(|v| self.is_fixed(v))
            .collect()
    }

    pub fn non_fixed_vertices(&self) -> Vec<&str> {
        self.graph
            .vertices()
            .iter()
            .map(String::as_str)
            .filter(|v| !self.is_fixed(v))
            .collect()
    }

    /// One representative per non-fixed vertex orbit (the smaller id).
    pub fn non_fixed_classes(&self) -> Vec<&str> {
        self.non_fixed_vertices()
            .into_iter()
            .filter(|v| *v < self.involution.vertex(v))
            .collect()
    }

    pub fn kind(&self, e: &str) -> Option<EdgeKind> {
        self.kinds.get(e).copied()
    }

    pub fn classify_edges(&self) -> &BTreeMap<String, EdgeKind> {
        &self.kinds
    }

    /// Edge classes keyed by their smaller member id.
    pub fn classes(&self) -> &BTreeMap<String, Vec<String>> {
        &self.classes
    }

    pub fn class_names(&self) -> Vec<&str> {
        self.classes.keys().map(String::as_str).collect()
    }

    pub fn class_of(&self, e: &str) -> Option<&str> {
        self.class_of.get(e).map(String::as_str)
    }

    pub fn class_kind(&self, class: &str) -> Option<EdgeKind> {
        self.classes.get(class).and_then(|m| self.kind(&m[0]))
    }

    pub fn classes_of_kind(&self, kind: EdgeKind) -> Vec<&str> {
        self.class_names()
            .into_iter()
            .filter(|c| self.class_kind(c) == Some(kind))
            .collect()
    }

    pub fn class_length(&self, class: &str) -> Option<&Rational> {
        let members = self.classes.get(class)?;
        Some(&self.graph.edge(&members[0])?.length)
    }

    pub fn class_lengths(&self) -> BTreeMap<String, Rational> {
        self.classes
            .keys()
            .map(|c| (c.clone(), self.class_length(c).expect("class exists").clone()))
            .collect()
    }

    /// Same structure with class lengths replaced.
    pub fn with_class_lengths(&self, lengths: &BTreeMap<String, Rational>) -> Result<Self, HyperellipticError> {
        let graph = self.graph.with_lengths(|e| {
            let class = &self.class_of[&e.id];
            lengths.get(class).cloned().unwrap_or_else(|| e.length.clone())
        })?;
        HyperellipticGraph::new(graph, self.involution.clone())
    }

    pub fn nu_counts(&self, v: &str) -> Result<NuCounts, HyperellipticError> {
        self.graph.require_vertex(v)?;
        if self.is_fixed(v) {
            return Err(HyperellipticError::FixedVertex(v.to_string()));
        }
        let mut nu0 = 0;
        let mut nu1 = 0;
        for e in self.graph.edges().iter().filter(|e| e.touches(v)) {
            match self.kinds[&e.id] {
                EdgeKind::Disjoint => nu0 += 1,
                EdgeKind::OneJointed => nu1 += 1,
                EdgeKind::TwoJointed => {}
            }
        }
        Ok(NuCounts {
            nu0,
            nu1,
            nu: nu0 + nu1,
        })
    }

    /// Irreducible components, each with the restricted involution.
    pub fn components(&self) -> Vec<HyperellipticGraph> {
        let mut blocks: Vec<Vec<usize>> = block_edge_sets(&self.graph);
        blocks.sort_by_key(|b| {
            let mut ids: Vec<&str> = b.iter().map(|&i| self.graph.edges()[i].id.as_str()).collect();
            ids.sort_unstable();
            let min_v = b
                .iter()
                .flat_map(|&i| {
                    let e = &self.graph.edges()[i];
                    [e.u.clone(), e.v.clone()]
                })
                .min()
                .unwrap_or_default();
            (min_v, ids.into_iter().map(String::from).collect::<Vec<_>>())
        });
        blocks
            .into_iter()
            .map(|b| {
                let edges: Vec<Edge> = b.iter().map(|&i| self.graph.edges()[i].clone()).collect();
                let vertices: BTreeSet<String> = edges.iter().flat_map(|e| [e.u.clone(), e.v.clone()]).collect();
                let inv = Involution::from_maps(
                    self.involution
                        .vertex_map
                        .iter()
                        .filter(|(k, _)| vertices.contains(*k))
                        .map(|(k, v)| (k.clone(), v.clone()))
                        .collect(),
                    edges
                        .iter()
                        .map(|e| (e.id.clone(), self.involution.edge(&e.id).to_string()))
                        .collect(),
                );
                let graph = MetrizedGraph::new(vertices, edges).expect("blocks are valid graphs");
                HyperellipticGraph::new(graph, inv).expect("components of a hyperelliptic graph are hyperelliptic")
            })
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        block_edge_sets(&self.graph).len() <= 1
    }

    /// Irreducible and made of exactly two two-jointed edges.
    pub fn is_simple(&self) -> bool {
        self.graph.edge_count() == 2 && self.kinds.values().all(|k| *k == EdgeKind::TwoJointed)
    }

    pub fn is_semisimple(&self) -> bool {
        self.components().iter().all(HyperellipticGraph::is_simple)
    }

    /// Size: 1 per simple component, `#Ed1~ - 1` per other component.
    pub fn size(&self) -> usize {
        if self.graph.edge_count() == 0 {
            return 0;
        }
        if !self.is_irreducible() {
            return self.components().iter().map(HyperellipticGraph::size).sum();
        }
        if self.is_simple() {
            1
        } else {
            self.classes_of_kind(EdgeKind::OneJointed).len().saturating_sub(1)
        }
    }

    /// Quotient by the involution: one vertex per orbit (named by its smaller
    /// id), one edge per class.
    pub fn quotient(&self) -> MetrizedGraph {
        let orbit = |v: &str| {
            let w = self.involution.vertex(v);
            if w < v {
                w.to_string()
            } else {
                v.to_string()
            }
        };
        let vertices: BTreeSet<String> = self.graph.vertices().iter().map(|v| orbit(v)).collect();
        let edges = self
            .classes
            .iter()
            .map(|(c, m)| {
                let e = self.graph.edge(&m[0]).expect("member");
                Edge::new(c.clone(), orbit(&e.u), orbit(&e.v), e.length.clone())
            })
            .collect();
        MetrizedGraph::new(vertices, edges).expect("quotient of a hyperelliptic graph is a tree")
    }

    fn members<'a>(&'a self, classes: &[&str]) -> Result<Vec<&'a str>, HyperellipticError> {
        let mut out = Vec::new();
        for c in classes {
            let m = self
                .classes
                .get(*c)
                .ok_or_else(|| HyperellipticError::UnknownClass(c.to_string()))?;
            out.extend(m.iter().map(String::as_str));
        }
        Ok(out)
    }

    /// Contracts every edge of the given classes.
    pub fn contract_classes(&self, classes: &[&str]) -> Result<(HyperellipticGraph, VertexMap), HyperellipticError> {
        let members = self.members(classes)?;
        let c = contract(&self.graph, members)?;
        let inv = self.involution.transport(&c.graph, &c.vertex_map)?;
        Ok((HyperellipticGraph::new(c.graph, inv)?, c.vertex_map))
    }

    /// Contracts every edge outside the given classes.
    pub fn restrict_classes(&self, classes: &[&str]) -> Result<(HyperellipticGraph, VertexMap), HyperellipticError> {
        let keep: BTreeSet<&str> = classes.iter().copied().collect();
        for c in &keep {
            if !self.classes.contains_key(*c) {
                return Err(HyperellipticError::UnknownClass(c.to_string()));
            }
        }
        let rest: Vec<&str> = self.class_names().into_iter().filter(|c| !keep.contains(c)).collect();
        self.contract_classes(&rest)
    }

    /// `min(a, b)` where `D` pushed to the restriction onto `class` is
    /// `aP + bQ`.
    pub fn w_weight(&self, d: &Divisor, class: &str) -> Result<Rational, HyperellipticError> {
        if !self.involution.fixes_divisor(d) {
            return Err(HyperellipticError::DivisorNotInvariant);
        }
        d.check_supported(&self.graph)?;
        let (r, map) = self.restrict_classes(&[class])?;
        if !r.is_simple() {
            return Err(HyperellipticError::NotSimpleRestriction(class.to_string()));
        }
        let pushed = push_divisor(d, &map)?;
        let vs = r.graph().vertices();
        Ok(min_rational(&pushed.coefficient(&vs[0]), &pushed.coefficient(&vs[1])))
    }

    /// Whether `d` is invariant and has coefficient `nu(v) - 2` at every
    /// non-fixed vertex.
    pub fn has_polarization_shape(&self, d: &Divisor) -> bool {
        self.involution.fixes_divisor(d)
            && self.non_fixed_vertices().into_iter().all(|v| {
                let nu = self.nu_counts(v).expect("non-fixed").nu as i64;
                d.coefficient(v) == int(nu - 2)
            })
    }
}

/// Output of [`normalize_fiber`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedFiber {
    pub graph: HyperellipticGraph,
    /// Non-fixed vertices of valence two that were smoothed away.
    pub removed_vertices: Vec<String>,
    /// Vertices inserted at midpoints of involution-fixed edges.
    pub midpoints: Vec<String>,
}

impl NormalizedFiber {
    /// Moves a divisor on the input graph onto the normalized graph.
    /// Removed vertices must carry coefficient zero.
    pub fn transport_divisor(&self, d: &Divisor) -> Result<Divisor, HyperellipticError> {
        let mut out = Divisor::zero();
        for (v, a) in d.iter() {
            if self.removed_vertices.contains(v) {
                return Err(HyperellipticError::NotHyperellipticConfiguration(format!(
                    "divisor has nonzero coefficient at removed vertex {v:?}"
                )));
            }
            self.graph.graph().require_vertex(v)?;
            out.add(v.clone(), a);
        }
        Ok(out)
    }
}

/// Turns a dual graph with an involution that may fix edges into a
/// hyperelliptic graph with the same underlying metric space: every fixed
/// edge is split at its midpoint, then non-fixed vertices of valence two are
/// smoothed out.
pub fn normalize_fiber(dual: &MetrizedGraph, inv: &Involution) -> Result<NormalizedFiber, HyperellipticError> {
    inv.check(dual)?;
    let config = |m: String| HyperellipticError::NotHyperellipticConfiguration(m);
    let mut vertices: Vec<String> = dual.vertices().to_vec();
    let mut edges: BTreeMap<String, Edge> = dual.edges().iter().map(|e| (e.id.clone(), e.clone())).collect();
    let mut vmap = inv.vertex_map.clone();
    let mut emap = inv.edge_map.clone();
    let mut midpoints = Vec::new();
    let taken = |s: &str, vs: &[String], es: &BTreeMap<String, Edge>| vs.iter().any(|v| v == s) || es.contains_key(s);
    for e in dual.edges() {
        if inv.edge(&e.id) != e.id {
            continue;
        }
        if !e.is_loop() && inv.vertex(&e.u) != e.v {
            return Err(config(format!("fixed edge {:?} does not swap its endpoints", e.id)));
        }
        if e.is_loop() && !inv.vertex(&e.u).eq(e.u.as_str()) {
            return Err(config(format!("fixed loop {:?} sits at a non-fixed vertex", e.id)));
        }
        let fresh = |base: String| {
            let mut name = base;
            while taken(&name, &vertices, &edges) {
                name.push('\'');
            }
            name
        };
        let m = fresh(format!("{}~m", e.id));
        let a = fresh(format!("{}~a", e.id));
        let b = fresh(format!("{}~b", e.id));
        let half = &e.length / int(2);
        edges.remove(&e.id);
        edges.insert(a.clone(), Edge::new(a.clone(), e.u.clone(), m.clone(), half.clone()));
        edges.insert(b.clone(), Edge::new(b.clone(), m.clone(), e.v.clone(), half));
        emap.insert(a.clone(), b.clone());
        emap.insert(b, a);
        vertices.push(m.clone());
        midpoints.push(m);
    }
    let mut removed = Vec::new();
    loop {
        let valence = |v: &str, es: &BTreeMap<String, Edge>| {
            es.values()
                .map(|e| usize::from(e.u == v) + usize::from(e.v == v))
                .sum::<usize>()
        };
        let candidate = vertices
            .iter()
            .find(|v| vmap.get(v.as_str()).is_some_and(|w| w != *v) && valence(v, &edges) == 2);
        let Some(v) = candidate.cloned() else { break };
        let w = vmap[&v].clone();
        let incident = |x: &str, es: &BTreeMap<String, Edge>| -> Vec<String> {
            es.values().filter(|e| e.touches(x)).map(|e| e.id.clone()).collect()
        };
        let at_v = incident(&v, &edges);
        let at_w = incident(&w, &edges);
        if at_v.len() != 2 || at_w.len() != 2 || at_v.iter().any(|e| at_w.contains(e)) {
            return Err(config(format!("cannot smooth valence-two vertex {v:?}")));
        }
        let mut merge = |x: &str, pair: &[String]| -> String {
            let (e1, e2) = (edges.remove(&pair[0]).unwrap(), edges.remove(&pair[1]).unwrap());
            let other = |e: &Edge| if e.u == x { e.v.clone() } else { e.u.clone() };
            let id = if e1.id < e2.id { e1.id.clone() } else { e2.id.clone() };
            edges.insert(
                id.clone(),
                Edge::new(id.clone(), other(&e1), other(&e2), &e1.length + &e2.length),
            );
            id
        };
        let n1 = merge(&v, &at_v);
        let n2 = merge(&w, &at_w);
        for e in at_v.iter().chain(&at_w) {
            emap.remove(e);
        }
        emap.insert(n1.clone(), n2.clone());
        emap.insert(n2, n1);
        vertices.retain(|x| x != &v && x != &w);
        vmap.remove(&v);
        vmap.remove(&w);
        removed.push(v);
        removed.push(w);
    }
    removed.sort();
    midpoints.sort();
    let graph = MetrizedGraph::new_with_loops(vertices, edges.into_values().collect())?;
    let graph = HyperellipticGraph::new(graph, Involution::from_maps(vmap, emap)).map_err(|e| match e {
        HyperellipticError::Graph(g) => HyperellipticError::Graph(g),
        other => config(other.to_string()),
    })?;
    Ok(NormalizedFiber {
        graph,
        removed_vertices: removed,
        midpoints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{irreducible_decomposition, one_point_sum};
    use crate::testkit::{elementary, ladder, simple_graph};

    #[test]
    fn sg_is_simple() {
        let h = simple_graph(int(1));
        assert!(h.is_simple());
        assert!(h.classify_edges().values().all(|k| *k == EdgeKind::TwoJointed));
        assert_eq!(h.size(), 1);
        assert_eq!(h.class_names(), ["e1"]);
        assert!(h.non_fixed_vertices().is_empty());
        assert!(matches!(h.nu_counts("P"), Err(HyperellipticError::FixedVertex(_))));
    }

    #[test]
    fn elementary_two() {
        let h = elementary(2, &[int(1), int(1), int(1)]);
        assert!(h.classify_edges().values().all(|k| *k == EdgeKind::OneJointed));
        assert_eq!(h.size(), 2);
        assert_eq!(h.nu_counts("Q").unwrap(), NuCounts { nu0: 0, nu1: 3, nu: 3 });
        assert!(h.is_irreducible());
        assert_eq!(h.quotient().edge_count(), 3);
    }

    #[test]
    fn restriction_of_elementary_is_sg() {
        let h = elementary(2, &[int(1), int(1), int(1)]);
        let class = h.class_names()[0];
        let (r, _) = h.restrict_classes(&[class]).unwrap();
        assert!(r.is_simple());
        assert_eq!(r.graph().vertex_count(), 2);
    }

    #[test]
    fn identity_involution_fails_axiom_two() {
        let t = MetrizedGraph::new(
            ["A", "B", "C"],
            alloc::vec![
                Edge::new("a", "B", "C", int(1)),
                Edge::new("b", "C", "A", int(1)),
                Edge::new("c", "A", "B", int(1)),
            ],
        )
        .unwrap();
        assert!(matches!(
            validate_hyperelliptic(&t, &Involution::identity()),
            Err(HyperellipticError::AxiomViolation { clause: 2, .. })
        ));
    }

    #[test]
    fn malformed_involutions() {
        let g = simple_graph(int(1)).graph().clone();
        let bad = Involution::from_maps(
            [("P".to_string(), "Q".to_string())].into_iter().collect(),
            [
                ("e1".to_string(), "e2".to_string()),
                ("e2".to_string(), "e1".to_string()),
            ]
            .into_iter()
            .collect(),
        );
        assert!(matches!(bad.check(&g), Err(HyperellipticError::InvolutionMalformed(_))));
        let stretched = MetrizedGraph::new(
            ["P", "Q"],
            alloc::vec![Edge::new("e1", "P", "Q", int(1)), Edge::new("e2", "P", "Q", int(2))],
        )
        .unwrap();
        let swap = Involution::from_swaps([], [("e1", "e2")]);
        assert!(matches!(
            swap.check(&stretched),
            Err(HyperellipticError::InvolutionMalformed(_))
        ));
    }

    #[test]
    fn axiom_three_and_four() {
        // swapped pair u, v joined by two parallel edges: quotient has a loop
        let g = MetrizedGraph::new(
            ["u", "v"],
            alloc::vec![Edge::new("a", "u", "v", int(1)), Edge::new("b", "u", "v", int(1))],
        )
        .unwrap();
        let inv = Involution::from_swaps([("u", "v")], [("a", "b")]);
        assert!(matches!(
            validate_hyperelliptic(&g, &inv),
            Err(HyperellipticError::AxiomViolation { clause: 3, .. })
        ));
        let h = elementary(2, &[int(1), int(1), int(1)]);
        let inv = h.involution().clone();
        let mut edges = h.graph().edges().to_vec();
        edges.push(Edge::new("x", "Q", "Q'", int(1)));
        edges.push(Edge::new("y", "Q", "Q'", int(1)));
        let g = MetrizedGraph::new(h.graph().vertices().to_vec(), edges).unwrap();
        let mut swaps: Vec<(&str, &str)> = inv.edge_map().iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        swaps.push(("x", "y"));
        let inv = Involution::from_swaps([("Q", "Q'")], swaps);
        assert!(matches!(
            validate_hyperelliptic(&g, &inv),
            Err(HyperellipticError::AxiomViolation { clause: 4, .. })
        ));
    }

    #[test]
    fn ladder_classification() {
        let h = ladder();
        for (e, k) in h.classify_edges() {
            let expected = if e.starts_with('e') && e.as_str() != "e0" && e.as_str() != "e0'" {
                EdgeKind::Disjoint
            } else {
                EdgeKind::OneJointed
            };
            assert_eq!(*k, expected, "edge {e}");
        }
        assert_eq!(h.nu_counts("P2").unwrap(), NuCounts { nu0: 2, nu1: 1, nu: 3 });
    }

    #[test]
    fn size_is_additive() {
        let a = simple_graph(int(1));
        let b = simple_graph(int(2));
        let g = one_point_sum(a.graph(), "Q", &b.graph().with_prefix("x"), "xP").unwrap();
        let inv = Involution::from_swaps([], [("e1", "e2"), ("xe1", "xe2")]);
        let h = validate_hyperelliptic(&g, &inv).unwrap();
        assert_eq!(h.size(), 2);
        assert_eq!(h.components().len(), 2);
        assert!(h.is_semisimple());
        assert_eq!(irreducible_decomposition(h.graph()).unwrap().len(), 2);
    }

    #[test]
    fn w_weight_examples() {
        let h = simple_graph(int(1));
        let d = Divisor::from_pairs([("P", int(3)), ("Q", int(-1))]);
        assert_eq!(h.w_weight(&d, "e1").unwrap(), int(-1));
        assert_eq!(h.w_weight(&Divisor::zero(), "e1").unwrap(), int(0));

        let g2 = elementary(2, &[int(1), int(1), int(1)]);
        let mut d = Divisor::from_pairs([("Q", int(1)), ("Q'", int(1))]);
        let a = [int(2), int(0), int(-1)];
        for (i, ai) in a.iter().enumerate() {
            d.add(format!("P{}", i + 1), ai);
        }
        let deg = d.degree();
        for (i, ai) in a.iter().enumerate() {
            let class = g2.class_of(&format!("e{}", i + 1)).unwrap().to_string();
            assert_eq!(g2.w_weight(&d, &class).unwrap(), min_rational(ai, &(&deg - ai)));
        }
        let lopsided = Divisor::from_pairs([("Q", int(1))]);
        assert_eq!(
            g2.w_weight(&lopsided, "e1"),
            Err(HyperellipticError::DivisorNotInvariant)
        );
    }

    #[test]
    fn normalize_midpoint_and_smoothing() {
        // u, u' swapped and joined by a fixed edge of length 2; each also joined
        // to fixed P and R so that both have valence three.
        let g = MetrizedGraph::new(
            ["P", "R", "u", "u'"],
            alloc::vec![
                Edge::new("f", "u", "u'", int(2)),
                Edge::new("p", "u", "P", int(1)),
                Edge::new("p'", "u'", "P", int(1)),
                Edge::new("r", "u", "R", int(1)),
                Edge::new("r'", "u'", "R", int(1)),
            ],
        )
        .unwrap();
        let inv = Involution::from_swaps([("u", "u'")], [("p", "p'"), ("r", "r'")]);
        let n = normalize_fiber(&g, &inv).unwrap();
        assert_eq!(n.midpoints, ["f~m"]);
        assert!(n.removed_vertices.is_empty());
        let h = &n.graph;
        assert_eq!(h.kind("f~a"), Some(EdgeKind::OneJointed));
        assert_eq!(h.graph().edge("f~a").unwrap().length, int(1));
        assert_eq!(h.graph().total_length(), g.total_length());
        assert_eq!(h.size(), 2);

        // idempotent on hyperelliptic input
        let again = normalize_fiber(h.graph(), h.involution()).unwrap();
        assert_eq!(&again.graph, h);

        // a non-fixed valence-two vertex on each of two swapped chains
        let g = MetrizedGraph::new(
            ["P", "R", "S", "u", "u'", "m", "m'"],
            alloc::vec![
                Edge::new("a", "u", "m", int(1)),
                Edge::new("a'", "u'", "m'", int(1)),
                Edge::new("b", "m", "P", int(2)),
                Edge::new("b'", "m'", "P", int(2)),
                Edge::new("r", "u", "R", int(1)),
                Edge::new("r'", "u'", "R", int(1)),
                Edge::new("s", "u", "S", int(1)),
                Edge::new("s'", "u'", "S", int(1)),
            ],
        )
        .unwrap();
        let inv = Involution::from_swaps(
            [("u", "u'"), ("m", "m'")],
            [("a", "a'"), ("b", "b'"), ("r", "r'"), ("s", "s'")],
        );
        let n = normalize_fiber(&g, &inv).unwrap();
        assert_eq!(n.removed_vertices, ["m", "m'"]);
        assert_eq!(n.graph.graph().edge("a").unwrap().length, int(3));
        assert_eq!(n.graph.graph().vertex_count(), 5);
        assert!(n.transport_divisor(&Divisor::from_pairs([("m", int(1))])).is_err());
    }

    #[test]
    fn normalize_fixed_loop() {
        let g = MetrizedGraph::new_with_loops(["v"], alloc::vec![Edge::new("l", "v", "v", int(2))]).unwrap();
        let n = normalize_fiber(&g, &Involution::identity()).unwrap();
        assert!(n.graph.is_simple());
        assert_eq!(n.midpoints, ["l~m"]);
    }

    #[test]
    fn normalize_rejects_pointwise_fixed_edge() {
        let g = MetrizedGraph::new(["P", "Q"], alloc::vec![Edge::new("e", "P", "Q", int(1))]).unwrap();
        assert!(matches!(
            normalize_fiber(&g, &Involution::identity()),
            Err(HyperellipticError::NotHyperellipticConfiguration(_))
        ));
    }
}
