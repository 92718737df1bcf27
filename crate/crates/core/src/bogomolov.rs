//! Semistable fibers: node classification, the counts `xi_j` and `delta_i`,
//! the self-intersection of the relative dualizing sheaf, upper bounds for the
//! admissible constant of a fiber, and the lower bound `r0`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::graph::{contract, push_divisor, subdivide_edge, Divisor, GraphError, MetrizedGraph};
use crate::hyperelliptic::{normalize_fiber, HyperellipticError, Involution};
use crate::potential::{epsilon_numeric, PotentialError};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BogomolovError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hyperelliptic(#[from] HyperellipticError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("genus {0} is below 3; the genus-two bound is a separate, earlier result and is not computed here")]
    GenusBelowThree(u32),
    #[error("fiber genus {0} is below 2")]
    GenusOutOfRange(u32),
    #[error("fiber has no involution")]
    MissingInvolution,
    #[error("involution does not preserve the genus of component {0:?}")]
    InvolutionBreaksGenera(String),
    #[error("node {0:?} is not of type 0")]
    NotTypeZero(String),
    #[error("removing node pair {node:?} leaves {count} components instead of 2")]
    UnexpectedComponentCount { node: String, count: usize },
    #[error("index {index} is out of range for {name} at genus {genus}")]
    IndexOutOfRange { name: &'static str, index: u32, genus: u32 },
    #[error("counts for genus {left} and genus {right} cannot be combined")]
    GenusMismatch { left: u32, right: u32 },
}

/// Dual graph of a semistable fiber: components with geometric genera,
/// nodes as edges (loops allowed), and optionally the hyperelliptic
/// involution (which may fix nodes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberConfiguration {
    graph: MetrizedGraph,
    genera: BTreeMap<String, u32>,
    involution: Option<Involution>,
    genus: u32,
}

impl FiberConfiguration {
    pub fn new(
        graph: MetrizedGraph,
        genera: BTreeMap<String, u32>,
        involution: Option<Involution>,
    ) -> Result<Self, BogomolovError> {
        for v in genera.keys() {
            graph.require_vertex(v)?;
        }
        if let Some(inv) = &involution {
            inv.check(&graph)?;
            for v in graph.vertices() {
                if genera.get(v) != genera.get(inv.vertex(v)) {
                    return Err(BogomolovError::InvolutionBreaksGenera(v.clone()));
                }
            }
        }
        let genus = genera.values().sum::<u32>() + graph.betti_number() as u32;
        if genus < 2 {
            return Err(BogomolovError::GenusOutOfRange(genus));
        }
        Ok(FiberConfiguration {
            graph,
            genera,
            involution,
            genus,
        })
    }

    pub fn graph(&self) -> &MetrizedGraph {
        &self.graph
    }

    pub fn involution(&self) -> Option<&Involution> {
        self.involution.as_ref()
    }

    /// Arithmetic genus of the fiber: sum of component genera plus the
    /// first Betti number of the dual graph.
    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn component_genus(&self, v: &str) -> u32 {
        self.genera.get(v).copied().unwrap_or(0)
    }

    pub fn genera(&self) -> &BTreeMap<String, u32> {
        &self.genera
    }

    /// Arithmetic genus of the subcurve over a connected vertex set after
    /// deleting the flagged edges.
    fn side_genus(&self, side: &[usize], removed: &[bool]) -> u32 {
        let inside = |x: usize| side.contains(&x);
        let edges = (0..self.graph.edge_count())
            .filter(|&i| !removed[i])
            .filter(|&i| {
                let (a, b) = self.graph.edge_ends(i);
                inside(a) && inside(b)
            })
            .count();
        let genera: u32 = side
            .iter()
            .map(|&x| self.component_genus(&self.graph.vertices()[x]))
            .sum();
        genera + (edges + 1 - side.len()) as u32
    }
}

/// Node classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeClass {
    /// Separating node; the smaller side has this arithmetic genus.
    Type(u32),
    /// Non-separating node, with its subtype once the involution is used.
    Type0 { subtype: Option<u32> },
}

pub fn node_type(cfg: &FiberConfiguration, node: &str) -> Result<NodeClass, BogomolovError> {
    let idx = cfg.graph.require_edge(node)?;
    let mut removed = vec![false; cfg.graph.edge_count()];
    removed[idx] = true;
    let parts = cfg.graph.components_without(&removed);
    if parts.len() == 1 {
        return Ok(NodeClass::Type0 { subtype: None });
    }
    let i = parts
        .iter()
        .map(|p| cfg.side_genus(p, &removed))
        .min()
        .expect("two sides");
    Ok(NodeClass::Type(i))
}

pub fn node_subtype(cfg: &FiberConfiguration, node: &str) -> Result<NodeClass, BogomolovError> {
    let inv = cfg.involution.as_ref().ok_or(BogomolovError::MissingInvolution)?;
    if node_type(cfg, node)? != (NodeClass::Type0 { subtype: None }) {
        return Err(BogomolovError::NotTypeZero(node.to_string()));
    }
    let partner = inv.edge(node);
    if partner == node {
        return Ok(NodeClass::Type0 { subtype: Some(0) });
    }
    let mut removed = vec![false; cfg.graph.edge_count()];
    removed[cfg.graph.require_edge(node)?] = true;
    removed[cfg.graph.require_edge(partner)?] = true;
    let parts = cfg.graph.components_without(&removed);
    if parts.len() != 2 {
        return Err(BogomolovError::UnexpectedComponentCount {
            node: node.to_string(),
            count: parts.len(),
        });
    }
    let j = parts
        .iter()
        .map(|p| cfg.side_genus(p, &removed))
        .min()
        .expect("two sides");
    Ok(NodeClass::Type0 { subtype: Some(j) })
}

/// Type, and subtype for type-0 nodes, of every node.
pub fn classify_nodes(cfg: &FiberConfiguration) -> Result<BTreeMap<String, NodeClass>, BogomolovError> {
    cfg.graph
        .edges()
        .iter()
        .map(|e| {
            let class = match node_type(cfg, &e.id)? {
                NodeClass::Type0 { .. } => node_subtype(cfg, &e.id)?,
                t => t,
            };
            Ok((e.id.clone(), class))
        })
        .collect()
}

/// `xi_0` counts nodes, `xi_j` for `j >= 1` counts node pairs, `delta_i`
/// counts nodes of type `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCounts {
    genus: u32,
    xi: Vec<u64>,
    delta: Vec<u64>,
    delta0: Option<u64>,
}

impl InvariantCounts {
    pub fn new(genus: u32) -> Self {
        InvariantCounts {
            genus,
            xi: vec![0; (genus.saturating_sub(1) / 2 + 1) as usize],
            delta: vec![0; (genus / 2) as usize],
            delta0: None,
        }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn xi(&self, j: u32) -> u64 {
        self.xi.get(j as usize).copied().unwrap_or(0)
    }

    /// `delta_i` for `i >= 1`.
    pub fn delta(&self, i: u32) -> u64 {
        if i == 0 {
            return self.delta0.unwrap_or(0);
        }
        self.delta.get(i as usize - 1).copied().unwrap_or(0)
    }

    pub fn delta0(&self) -> Option<u64> {
        self.delta0
    }

    pub fn xi_slice(&self) -> &[u64] {
        &self.xi
    }

    pub fn delta_slice(&self) -> &[u64] {
        &self.delta
    }

    pub fn set_xi(&mut self, j: u32, count: u64) -> Result<(), BogomolovError> {
        let genus = self.genus;
        let slot = self.xi.get_mut(j as usize).ok_or(BogomolovError::IndexOutOfRange {
            name: "xi",
            index: j,
            genus,
        })?;
        *slot = count;
        Ok(())
    }

    pub fn set_delta(&mut self, i: u32, count: u64) -> Result<(), BogomolovError> {
        let genus = self.genus;
        if i == 0 {
            self.delta0 = Some(count);
            return Ok(());
        }
        let slot = self
            .delta
            .get_mut(i as usize - 1)
            .ok_or(BogomolovError::IndexOutOfRange {
                name: "delta",
                index: i,
                genus,
            })?;
        *slot = count;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.xi.iter().chain(&self.delta).all(|&c| c == 0)
    }

    /// Sum of counts over several fibers of the same genus.
    pub fn combine(&self, other: &InvariantCounts) -> Result<InvariantCounts, BogomolovError> {
        if self.genus != other.genus {
            return Err(BogomolovError::GenusMismatch {
                left: self.genus,
                right: other.genus,
            });
        }
        let zip = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(InvariantCounts {
            genus: self.genus,
            xi: zip(&self.xi, &other.xi),
            delta: zip(&self.delta, &other.delta),
            delta0: match (self.delta0, other.delta0) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        })
    }
}

/// Counts of one fiber. A non-fixed node pair whose smaller side has genus
/// zero contributes its two nodes to `xi_0`.
pub fn count_invariants(cfg: &FiberConfiguration) -> Result<InvariantCounts, BogomolovError> {
    let inv = cfg.involution.as_ref().ok_or(BogomolovError::MissingInvolution)?;
    let mut counts = InvariantCounts::new(cfg.genus);
    let mut delta0 = 0u64;
    for (node, class) in classify_nodes(cfg)? {
        match class {
            NodeClass::Type(i) => {
                let c = counts.delta(i) + 1;
                counts.set_delta(i, c)?;
            }
            NodeClass::Type0 { subtype } => {
                delta0 += 1;
                let j = subtype.expect("classified with the involution");
                let partner = inv.edge(&node);
                if j == 0 {
                    let c = counts.xi(0) + 1;
                    counts.set_xi(0, c)?;
                } else if node.as_str() < partner {
                    let c = counts.xi(j) + 1;
                    counts.set_xi(j, c)?;
                }
            }
        }
    }
    counts.set_delta(0, delta0)?;
    Ok(counts)
}

fn require_genus_three(counts: &InvariantCounts) -> Result<Rational, BogomolovError> {
    if counts.genus < 3 {
        return Err(BogomolovError::GenusBelowThree(counts.genus));
    }
    Ok(int(counts.genus.into()))
}

fn c(n: u64) -> Rational {
    Rational::from_integer(n.into())
}

/// Per-count coefficients of one linear functional of the counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coefficients {
    pub xi: Vec<Rational>,
    pub delta: Vec<Rational>,
}

impl Coefficients {
    fn apply(&self, counts: &InvariantCounts) -> Rational {
        let xi: Rational = self.xi.iter().zip(&counts.xi).map(|(a, &n)| a * c(n)).sum();
        let delta: Rational = self.delta.iter().zip(&counts.delta).map(|(a, &n)| a * c(n)).sum();
        xi + delta
    }
}

/// Coefficients of `(omega, omega)`.
pub fn omega_coefficients(genus: u32) -> Result<Coefficients, BogomolovError> {
    if genus < 2 {
        return Err(BogomolovError::GenusOutOfRange(genus));
    }
    let g = int(genus.into());
    let d = int(2) * &g + int(1);
    let counts = InvariantCounts::new(genus);
    let xi = (0..counts.xi.len() as i64)
        .map(|j| {
            if j == 0 {
                (&g - int(1)) / &d
            } else {
                (int(6 * j) * (&g - int(1 + j)) + int(2) * (&g - int(1))) / &d
            }
        })
        .collect();
    let delta = (1..=counts.delta.len() as i64)
        .map(|i| int(12 * i) * (&g - int(i)) / &d - int(1))
        .collect();
    Ok(Coefficients { xi, delta })
}

/// Coefficients of the upper bound on the admissible constant of a fiber.
pub fn epsilon_upper_coefficients(genus: u32) -> Result<Coefficients, BogomolovError> {
    let g = require_genus_three(&InvariantCounts::new(genus))?;
    let counts = InvariantCounts::new(genus);
    let lead = if genus >= 5 {
        int(4) * (&g - int(1)) / (int(3) * &g)
    } else {
        (&g - int(1)) / &g
    };
    let xi = (0..counts.xi.len() as i64)
        .map(|j| {
            if j == 0 {
                int(5) * (&g - int(1)) / (int(12) * &g)
            } else {
                &lead + int(2 * j) * (&g - int(1 + j)) / &g
            }
        })
        .collect();
    let delta = (1..=counts.delta.len() as i64)
        .map(|i| int(4 * i) * (&g - int(1)) / &g - int(1))
        .collect();
    Ok(Coefficients { xi, delta })
}

/// Coefficients of `r0`.
pub fn r0_coefficients(genus: u32) -> Result<Coefficients, BogomolovError> {
    let g = require_genus_three(&InvariantCounts::new(genus))?;
    let counts = InvariantCounts::new(genus);
    let front = (&g - int(1)) * (&g - int(1)) / (&g * (int(2) * &g + int(1)));
    let xi = (0..counts.xi.len() as i64)
        .map(|j| {
            let inner = if j == 0 {
                (int(2) * &g - int(5)) / int(12)
            } else if genus <= 4 {
                int(2 * j) * (&g - int(1 + j)) - int(1)
            } else {
                int(2) * (int(3 * j) * (&g - int(1 + j)) - &g - int(2)) / int(3)
            };
            &front * inner
        })
        .collect();
    let delta = (1..=counts.delta.len() as i64)
        .map(|i| &front * int(4 * i) * (&g - int(i)))
        .collect();
    Ok(Coefficients { xi, delta })
}

pub fn omega_self_intersection(counts: &InvariantCounts) -> Result<Rational, BogomolovError> {
    Ok(omega_coefficients(counts.genus)?.apply(counts))
}

pub fn epsilon_fiber_upper(counts: &InvariantCounts) -> Result<Rational, BogomolovError> {
    Ok(epsilon_upper_coefficients(counts.genus)?.apply(counts))
}

pub fn r0_bound(counts: &InvariantCounts) -> Result<Rational, BogomolovError> {
    Ok(r0_coefficients(counts.genus)?.apply(counts))
}

/// One nonzero count and what it contributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    /// `"xi_j"` or `"delta_i"`.
    pub name: String,
    pub count: u64,
    pub omega: Rational,
    pub epsilon_upper: Rational,
    pub radicand: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicandReport {
    pub genus: u32,
    pub omega: Rational,
    pub epsilon_upper: Rational,
    /// `(g - 1)(omega - epsilon_upper)`.
    pub radicand: Rational,
    pub terms: Vec<Term>,
    pub warning: Option<&'static str>,
}

/// Lower bound for the squared radius, assembled as
/// `(g - 1)((omega, omega) - sum of fiber epsilon bounds)`.
pub fn pairing_radicand(counts: &InvariantCounts) -> Result<RadicandReport, BogomolovError> {
    let g1 = require_genus_three(counts)? - int(1);
    let om = omega_coefficients(counts.genus)?;
    let ep = epsilon_upper_coefficients(counts.genus)?;
    let mut terms = Vec::new();
    let named = counts
        .xi
        .iter()
        .enumerate()
        .map(|(j, &n)| (alloc::format!("xi_{j}"), n, &om.xi[j], &ep.xi[j]))
        .chain(
            counts
                .delta
                .iter()
                .enumerate()
                .map(|(i, &n)| (alloc::format!("delta_{}", i + 1), n, &om.delta[i], &ep.delta[i])),
        );
    for (name, n, o, e) in named {
        if n == 0 {
            continue;
        }
        let omega = o * c(n);
        let epsilon_upper = e * c(n);
        let radicand = &g1 * (&omega - &epsilon_upper);
        terms.push(Term {
            name,
            count: n,
            omega,
            epsilon_upper,
            radicand,
        });
    }
    let omega = om.apply(counts);
    let epsilon_upper = ep.apply(counts);
    let radicand = &g1 * (&omega - &epsilon_upper);
    Ok(RadicandReport {
        genus: counts.genus,
        omega,
        epsilon_upper,
        radicand,
        terms,
        warning: counts.is_zero().then_some("no singular-fiber data"),
    })
}

/// `omega` on the dual graph: `2 g_v - 2 + valence(v)` at each component.
pub fn fiber_polarization(cfg: &FiberConfiguration) -> Divisor {
    Divisor::from_pairs(cfg.graph.vertices().iter().map(|v| {
        let k = 2 * i64::from(cfg.component_genus(v)) - 2 + cfg.graph.valence(v) as i64;
        (v.clone(), int(k))
    }))
}

/// Exact admissible constant of a fiber, split into the type-0 part (a
/// hyperelliptic graph after normalization) and the separating part (a
/// tree).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberEpsilon {
    pub type0: Rational,
    pub separating: Rational,
    pub total: Rational,
}

pub fn fiber_epsilon(cfg: &FiberConfiguration) -> Result<FiberEpsilon, BogomolovError> {
    let inv = cfg.involution.as_ref().ok_or(BogomolovError::MissingInvolution)?;
    let omega = fiber_polarization(cfg);
    let mut separating_nodes = Vec::new();
    let mut other_nodes = Vec::new();
    for e in cfg.graph.edges() {
        match node_type(cfg, &e.id)? {
            NodeClass::Type(_) => separating_nodes.push(e.id.as_str()),
            NodeClass::Type0 { .. } => other_nodes.push(e.id.as_str()),
        }
    }

    let g1 = contract(&cfg.graph, separating_nodes)?;
    let inv1 = inv.transport(&g1.graph, &g1.vertex_map)?;
    let d1 = push_divisor(&omega, &g1.vertex_map)?;
    let normalized = normalize_fiber(&g1.graph, &inv1)?;
    let d1 = normalized.transport_divisor(&d1)?;
    let type0 = epsilon_numeric(normalized.graph.graph(), &d1)?.0;

    let g2 = contract(&cfg.graph, other_nodes)?;
    let d2 = push_divisor(&omega, &g2.vertex_map)?;
    let separating = epsilon_numeric(&g2.graph, &d2)?.0;

    Ok(FiberEpsilon {
        total: &type0 + &separating,
        type0,
        separating,
    })
}

/// Admissible constant of the fiber computed on the dual graph itself, loops
/// split at their midpoints.
pub fn fiber_epsilon_direct(cfg: &FiberConfiguration) -> Result<Rational, BogomolovError> {
    let mut g = cfg.graph.clone();
    loop {
        let Some(l) = g.loops().next().cloned() else { break };
        g = subdivide_edge(&g, &l.id, &(&l.length / int(2)))?.graph;
    }
    Ok(epsilon_numeric(&g, &fiber_polarization(cfg))?.0)
}

/// `r0` of a family: counts summed over all its singular fibers.
pub fn family_r0(fibers: &[FiberConfiguration]) -> Result<Rational, BogomolovError> {
    let Some(first) = fibers.first() else {
        return Ok(Rational::zero());
    };
    let mut total = InvariantCounts::new(first.genus);
    for f in fibers {
        total = total.combine(&count_invariants(f)?)?;
    }
    r0_bound(&total)
}

/// Positive coefficient check used in tests and reports: every `r0`
/// coefficient is positive for the given genus.
pub fn r0_coefficients_positive(genus: u32) -> Result<bool, BogomolovError> {
    let co = r0_coefficients(genus)?;
    Ok(co.xi.iter().chain(&co.delta).all(|x| x > &Rational::zero()))
}
